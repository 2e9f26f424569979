#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatcircle/flat_map.hpp"

namespace flatcircle {

// Partial quotients a_1..a_d and convergents p_k/q_k for k = 0..d,
// with p_0/q_0 = 0/1 and p_1/q_1 = 1/a_1.
struct ContinuedFraction {
  std::vector<std::int64_t> a;  // a[k-1] holds a_k
  std::vector<std::int64_t> p;
  std::vector<std::int64_t> q;

  static ContinuedFraction from_quotients(std::span<const std::int64_t> quotients);
  int depth() const { return static_cast<int>(a.size()); }
  std::int64_t quotient(int k) const;  // a_k, 1 <= k <= depth
  void push(std::int64_t next);
};

// The rotation number the offset is tuned towards.
class RotationTarget {
 public:
  static RotationTarget golden();
  static RotationTarget silver();
  // Purely periodic expansion [0; c_1, ..., c_m, c_1, ...].
  static RotationTarget periodic(std::vector<std::int64_t> period);
  // A finite decimal; only the quotients it pins down are used.
  static RotationTarget decimal(std::string_view text);
  // "golden", "silver", "cf:1,2,3" or "dec:0.4142".
  static RotationTarget parse(std::string_view text);

  std::string name() const { return name_; }
  bool bounded_type() const { return !decimal_; }
  // Expansion up to the first convergent whose denominator exceeds max_q
  // (or as deep as the decimal determines).
  ContinuedFraction expand(std::int64_t max_q) const;
  Real value(unsigned bits) const;

 private:
  std::string name_;
  std::vector<std::int64_t> period_;
  bool decimal_ = false;
  std::string decimal_text_;
  std::vector<std::int64_t> decimal_quotients_;
};

enum class Comparison { less, greater, straddles };

// Lazily extended lift orbit of the offset, x_0 = omega, x_{k+1} = F(x_k).
class LiftedOrbit {
 public:
  explicit LiftedOrbit(const FlatMap& m) : map_(m) {}
  const Real& at(std::size_t i);
  const FlatMap& map() const { return map_; }

 private:
  const FlatMap& map_;
  std::deque<Real> x_;  // references stay valid while extending
};

// Sign of rho(f) - p/q from F^q(x) - x - p over the orbit of the plateau and
// its endpoints, refined once on a uniform mesh when inconclusive.
Comparison compare_rho_rational(LiftedOrbit& orbit, std::int64_t p, std::int64_t q);
Comparison compare_rho_rational(const FlatMap& m, std::int64_t p, std::int64_t q);

// Certified continued fraction of rho(f) to the given depth. Throws
// DomainError when rho is rational within that depth.
ContinuedFraction rotation_number(const FlatMap& m, int depth, std::int64_t max_quotient = 100000);

struct TuneOptions {
  unsigned tol_bits = 256;
  std::int64_t max_q = 5000;
  int min_depth = 1;
  bool check_monotone = true;
};

struct TuneResult {
  FlatMap map;
  ContinuedFraction cf;  // certified partial quotients
  int certified_depth = 0;
  int steps = 0;
  bool window_resolved = false;  // agreed with every convergent up to max_q
};

TuneResult tune_offset(const Real& flat_length, const Real& exponent, const RotationTarget& target,
                       const TuneOptions& opts = {});

// Times t at which f^t(x0) comes strictly closer to x0 than at any earlier t.
std::vector<std::int64_t> closest_return_times(const FlatMap& m, const CirclePoint& x0, std::int64_t horizon);

struct OrderCheck {
  bool pass = true;
  std::int64_t first_mismatch = -1;
};

// Compares the cyclic order of f^i(omega), 0 <= i < count, with that of
// (i + 1) rho mod 1.
OrderCheck order_isomorphism_check(const FlatMap& m, const Real& rho, std::int64_t count);

}  // namespace flatcircle
