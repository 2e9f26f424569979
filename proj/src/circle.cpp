#include "flatcircle/circle.hpp"

#include "flatcircle/error.hpp"

namespace flatcircle {

CircleArc::CircleArc(const CirclePoint& l, const Real& len) : left(l), length(len) {
  if (len.sign() <= 0 || len >= Real(1)) throw DomainError("arc length must lie in (0, 1), got " + len.str(12));
}

bool CircleArc::contains_interior(const CirclePoint& p) const {
  Real t = ccw_offset(left, p);
  return t.sign() > 0 && t < length;
}

Real ccw_offset(const CirclePoint& a, const CirclePoint& b) { return frac(b.pos() - a.pos()); }

Real circle_dist(const CirclePoint& a, const CirclePoint& b) {
  Real d = abs(a.pos() - b.pos());
  return min(d, Real(1) - d);
}

Real dist_point_arc(const CirclePoint& p, const CircleArc& a, EndMode mode) {
  if (a.contains_interior(p)) throw DomainError("point lies inside the arc");
  Real d = min(circle_dist(p, a.left), circle_dist(p, a.right()));
  if (mode == EndMode::far) d += a.length;
  return d;
}

Real dist_arc_arc(const CircleArc& a, const CircleArc& b, ArcArcMode mode) {
  Real ab = ccw_offset(a.left, b.left) - a.length;  // gap after a, before b
  Real ba = ccw_offset(b.left, a.left) - b.length;  // gap after b, before a
  if (ab.sign() < 0 || ba.sign() < 0) throw DomainError("arcs overlap");
  Real d = min(ab, ba);
  if (mode == ArcArcMode::closed_open || mode == ArcArcMode::closed_closed) d += a.length;
  if (mode == ArcArcMode::open_closed || mode == ArcArcMode::closed_closed) d += b.length;
  return d;
}

}  // namespace flatcircle
