#pragma once

#include <cstdint>
#include <vector>

#include "flatcircle/circle.hpp"
#include "flatcircle/real.hpp"

namespace flatcircle {

// Shape of the smooth branch: t^l / (t^l + (1-t)^l) on [0, 1].
Real branch_shape(const Real& t, const Real& l);
Real branch_shape_inverse(const Real& y, const Real& l);

// Circle map that collapses the flat interval (0, u) to the offset omega and
// maps its complement diffeomorphically onto the circle minus that point.
// u = 0 is allowed (no flat interval).
class FlatMap {
 public:
  FlatMap(Real flat_length, Real exponent, Real offset);

  const Real& flat_length() const { return u_; }
  const Real& exponent() const { return l_; }
  const Real& offset() const { return omega_; }
  unsigned precision() const { return omega_.precision(); }
  bool is_rigid() const { return u_.is_zero() && l_ == Real(1); }
  CircleArc flat_arc() const;

  CirclePoint forward(const CirclePoint& x) const;
  // Degree-one lift, monotone, F(x + 1) = F(x) + 1.
  Real lift(const Real& x) const;
  // Preimage of an arc. Throws DomainError when the offset is interior to it.
  CircleArc inverse_arc(const CircleArc& a) const;
  // First derivative on the smooth branch (x outside the closed flat interval).
  Real derivative(const Real& x) const;
  // Closed form Schwarzian derivative on the smooth branch.
  Real schwarzian(const Real& x) const;

 private:
  Real branch_coordinate(const Real& x) const;  // (x - u) / (1 - u)
  Real u_, l_, omega_;
  Real one_minus_u_;
};

struct SchwarzianReport {
  int samples = 0;
  int nonnegative = 0;
  double max_value = 0;  // largest (least negative) value seen
};

// Evaluates the Schwarzian at seeded uniform points of the smooth branch.
SchwarzianReport schwarzian_sign_check(const FlatMap& m, int samples, std::uint64_t seed);

}  // namespace flatcircle
