#include "flatcircle/flat_map.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "flatcircle/error.hpp"

namespace flatcircle {

Real branch_shape(const Real& t, const Real& l) {
  if (t.sign() <= 0) return Real(0);
  if (t >= Real(1)) return Real(1);
  Real r = (Real(1) - t) / t;
  return Real(1) / (Real(1) + pow(r, l));
}

Real branch_shape_inverse(const Real& y, const Real& l) {
  if (y.sign() <= 0) return Real(0);
  if (y >= Real(1)) return Real(1);
  Real s = pow(y / (Real(1) - y), Real(1) / l);
  return s / (Real(1) + s);
}

FlatMap::FlatMap(Real flat_length, Real exponent, Real offset)
    : u_(std::move(flat_length)), l_(std::move(exponent)), omega_(std::move(offset)) {
  if (l_ < Real(1)) throw DomainError("exponent must be at least 1, got " + l_.str(12));
  if (u_.sign() < 0 || u_ >= Real(1)) throw DomainError("flat length must lie in [0, 1), got " + u_.str(12));
  if (omega_.sign() < 0 || omega_ >= Real(1)) omega_ = frac(omega_);
  one_minus_u_ = Real(1) - u_;
}

CircleArc FlatMap::flat_arc() const {
  if (u_.is_zero()) throw DomainError("map has no flat interval");
  return CircleArc(CirclePoint(Real(0)), u_);
}

Real FlatMap::branch_coordinate(const Real& x) const { return (x - u_) / one_minus_u_; }

Real FlatMap::lift(const Real& x) const {
  Real k = floor(x);
  Real r = x - k;
  Real out = k + omega_;
  if (r > u_) out += branch_shape(branch_coordinate(r), l_);
  return out;
}

CirclePoint FlatMap::forward(const CirclePoint& x) const { return CirclePoint(lift(x.pos())); }

CircleArc FlatMap::inverse_arc(const CircleArc& a) const {
  Real t0 = frac(a.left.pos() - omega_);
  Real t1 = t0 + a.length;
  if (t1 > Real(1)) throw DomainError("offset lies inside the arc; preimage is not an arc");
  Real lo = u_ + one_minus_u_ * branch_shape_inverse(t0, l_);
  Real hi = u_ + one_minus_u_ * branch_shape_inverse(t1, l_);
  return CircleArc(CirclePoint(lo), hi - lo);
}

Real FlatMap::derivative(const Real& x) const {
  Real r = frac(x);
  if (r <= u_) throw DomainError("derivative requested on the flat interval");
  Real t = branch_coordinate(r);
  Real q = (Real(1) - t) / t;
  Real ql = pow(q, l_);
  Real d = Real(1) + ql;
  return l_ * ql / q / (d * d * t * t) / one_minus_u_;
}

Real FlatMap::schwarzian(const Real& x) const {
  Real r = frac(x);
  if (r <= u_) throw DomainError("Schwarzian requested on the flat interval");
  Real t = branch_coordinate(r);
  Real w = t * (Real(1) - t) * one_minus_u_;
  return (Real(1) - l_ * l_) / (Real(2) * w * w);
}

SchwarzianReport schwarzian_sign_check(const FlatMap& m, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SchwarzianReport rep;
  rep.max_value = -std::numeric_limits<double>::infinity();
  const Real span = Real(1) - m.flat_length();
  for (int i = 0; i < samples; ++i) {
    double t = unit(rng);
    if (t == 0.0) continue;
    Real x = m.flat_length() + span * Real(t);
    Real s = m.schwarzian(x);
    ++rep.samples;
    if (s.sign() >= 0) ++rep.nonnegative;
    rep.max_value = std::max(rep.max_value, s.to_double());
  }
  return rep;
}

}  // namespace flatcircle
