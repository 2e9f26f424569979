#pragma once

#include <mpfr.h>

#include <concepts>
#include <string>
#include <string_view>

namespace flatcircle {

// Working precision in bits for newly created values on this thread.
unsigned default_precision();
void set_default_precision(unsigned bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

// Binary floating point with a per-value precision. Results of binary
// operations take the larger precision of the two operands.
class Real {
 public:
  Real();
  template <std::integral I>
  Real(I v) : Real() {
    if constexpr (std::is_signed_v<I>)
      mpfr_set_si(v_, static_cast<long>(v), MPFR_RNDN);
    else
      mpfr_set_ui(v_, static_cast<unsigned long>(v), MPFR_RNDN);
  }
  template <std::floating_point F>
  Real(F v) : Real() {
    mpfr_set_d(v_, static_cast<double>(v), MPFR_RNDN);
  }
  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  ~Real();

  // Parses a decimal (or scientific) literal. Throws ConfigError on junk.
  static Real parse(std::string_view text, unsigned bits = default_precision());
  static Real with_precision(unsigned bits);
  static Real pow2(long e, unsigned bits = default_precision());

  unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(v_)); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // log of |x| in double, valid far outside the double exponent range.
  double log_abs() const;
  // Round-trip decimal rendering in scientific notation.
  std::string str() const;
  std::string str(int digits) const;
  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

 private:
  explicit Real(unsigned bits, int);
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
Real pow(const Real& x, const Real& y);
Real floor(const Real& x);
// x - floor(x), in [0, 1).
Real frac(const Real& x);
const Real& min(const Real& a, const Real& b);
const Real& max(const Real& a, const Real& b);

}  // namespace flatcircle
