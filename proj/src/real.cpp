#include "flatcircle/real.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "flatcircle/error.hpp"

namespace flatcircle {

namespace {
thread_local unsigned tl_precision = 512;
constexpr unsigned kMinBits = 64;
}  // namespace

unsigned default_precision() { return tl_precision; }

void set_default_precision(unsigned bits) {
  if (bits < kMinBits) throw DomainError("precision must be at least 64 bits, got " + std::to_string(bits));
  tl_precision = bits;
}

PrecisionScope::PrecisionScope(unsigned bits) : saved_(tl_precision) { set_default_precision(bits); }
PrecisionScope::~PrecisionScope() { tl_precision = saved_; }

Real::Real() { mpfr_init2(v_, tl_precision); mpfr_set_zero(v_, 1); }

Real::Real(unsigned bits, int) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }

Real::Real(const Real& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
  if (this != &o) {
    if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::with_precision(unsigned bits) {
  if (bits < kMinBits) throw DomainError("precision must be at least 64 bits");
  return Real(bits, 0);
}

Real Real::parse(std::string_view text, unsigned bits) {
  Real r = with_precision(bits);
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty() || mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0 || !r.is_finite())
    throw ConfigError("not a decimal number: '" + std::string(text) + "'");
  return r;
}

Real Real::pow2(long e, unsigned bits) {
  Real r = with_precision(bits);
  mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
  return r;
}

double Real::log_abs() const {
  long e = 0;
  double m = mpfr_get_d_2exp(&e, v_, MPFR_RNDN);
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

std::string Real::str() const {
  int digits = static_cast<int>(std::ceil(static_cast<double>(precision()) * 0.30102999566398120)) + 1;
  return str(digits);
}

std::string Real::str(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

namespace {
mpfr_prec_t wider(const Real& a, const Real& b) {
  return std::max(mpfr_get_prec(a.get()), mpfr_get_prec(b.get()));
}
}  // namespace

Real& Real::operator+=(const Real& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  if (mpfr_get_prec(o.v_) > mpfr_get_prec(v_)) mpfr_prec_round(v_, mpfr_get_prec(o.v_), MPFR_RNDN);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(*this);
  mpfr_neg(r.v_, r.v_, MPFR_RNDN);
  return r;
}

Real operator+(const Real& a, const Real& b) {
  Real r(static_cast<unsigned>(wider(a, b)), 0);
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(static_cast<unsigned>(wider(a, b)), 0);
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(static_cast<unsigned>(wider(a, b)), 0);
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r(static_cast<unsigned>(wider(a, b)), 0);
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real abs(const Real& x) {
  Real r(x);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}
Real sqrt(const Real& x) {
  Real r(x);
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real log(const Real& x) {
  Real r(x);
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real exp(const Real& x) {
  Real r(x);
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real pow(const Real& x, const Real& y) {
  Real r = Real::with_precision(std::max(x.precision(), y.precision()));
  mpfr_pow(r.get(), x.get(), y.get(), MPFR_RNDN);
  return r;
}
Real floor(const Real& x) {
  Real r(x);
  mpfr_floor(r.get(), x.get());
  return r;
}
Real frac(const Real& x) {
  Real r(x);
  mpfr_frac(r.get(), x.get(), MPFR_RNDN);
  if (r.sign() < 0) {
    r += Real(1);
    if (r >= Real(1)) mpfr_set_zero(r.get(), 1);
  }
  return r;
}
const Real& min(const Real& a, const Real& b) { return b < a ? b : a; }
const Real& max(const Real& a, const Real& b) { return a < b ? b : a; }

}  // namespace flatcircle
