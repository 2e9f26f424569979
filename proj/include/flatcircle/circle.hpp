#pragma once

#include "flatcircle/real.hpp"

namespace flatcircle {

// A point of R/Z, stored as its representative in [0, 1).
class CirclePoint {
 public:
  CirclePoint() = default;
  explicit CirclePoint(const Real& x) : x_(frac(x)) {}
  const Real& pos() const { return x_; }

 private:
  Real x_;
};

// Arc running counterclockwise from `left` for `length` (0 < length < 1).
struct CircleArc {
  CirclePoint left;
  Real length;

  CircleArc() = default;
  CircleArc(const CirclePoint& l, const Real& len);
  // Right endpoint as an unreduced coordinate, left.pos() + length.
  Real right_unwrapped() const { return left.pos() + length; }
  CirclePoint right() const { return CirclePoint(right_unwrapped()); }
  // True when p lies strictly inside the arc.
  bool contains_interior(const CirclePoint& p) const;
};

enum class EndMode { near, far };
enum class ArcArcMode { open_open, closed_open, open_closed, closed_closed };

Real circle_dist(const CirclePoint& a, const CirclePoint& b);
// Counterclockwise travel from a to b, in [0, 1).
Real ccw_offset(const CirclePoint& a, const CirclePoint& b);
// Length of the shortest interval joining p to the arc. `far` adds the arc
// length. Throws DomainError when p lies inside the arc.
Real dist_point_arc(const CirclePoint& p, const CircleArc& a, EndMode mode = EndMode::near);
// Length of the open gap between two disjoint arcs along the shorter side.
// Closed modes include the corresponding arc. Throws DomainError on overlap.
Real dist_arc_arc(const CircleArc& a, const CircleArc& b, ArcArcMode mode = ArcArcMode::open_open);

}  // namespace flatcircle
