#include "flatcircle/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "flatcircle/error.hpp"

namespace flatcircle {

namespace {

Real tiling_tolerance(unsigned bits) { return Real::pow2(-static_cast<long>(bits) + 32, bits); }

}  // namespace

// ------------------------------------------------------------------ orbits

ForwardOrbit::ForwardOrbit(const FlatMap& m, std::int64_t horizon) {
  if (horizon < 1) throw DomainError("orbit horizon must be positive");
  pts_.reserve(static_cast<size_t>(horizon));
  CirclePoint x(m.offset());
  for (std::int64_t k = 1; k <= horizon; ++k) {
    if (!m.flat_length().is_zero() && x.pos() <= m.flat_length())
      throw InconsistencyError("orbit of the flat interval re-entered it at step " + std::to_string(k) +
                               "; rotation number is rational");
    pts_.push_back(x);
    x = m.forward(x);
  }
}

const CirclePoint& ForwardOrbit::point(std::int64_t k) const {
  if (k < 1 || k > horizon()) throw DomainError("orbit index " + std::to_string(k) + " outside computed horizon");
  return pts_[static_cast<size_t>(k - 1)];
}

PreimageSet::PreimageSet(const FlatMap& m, std::int64_t count) {
  if (count < 1) throw DomainError("preimage count must be positive");
  arcs_.reserve(static_cast<size_t>(count));
  arcs_.push_back(m.flat_arc());
  std::map<Real, std::int64_t> by_left;
  by_left.emplace(arcs_[0].left.pos(), 0);
  for (std::int64_t i = 1; i < count; ++i) {
    CircleArc a = m.inverse_arc(arcs_.back());
    // Preimages live in (u, 1), so no arc wraps past 0.
    auto next = by_left.upper_bound(a.left.pos());
    auto prev = std::prev(next);
    const CircleArc& before = arcs_[static_cast<size_t>(prev->second)];
    bool clash = before.right_unwrapped() > a.left.pos();
    if (next != by_left.end()) clash = clash || a.right_unwrapped() > next->first;
    if (a.right_unwrapped() > Real(1)) clash = true;
    if (clash)
      throw InconsistencyError("preimage " + std::to_string(i) + " overlaps an earlier preimage");
    by_left.emplace(a.left.pos(), i);
    arcs_.push_back(std::move(a));
  }
}

const CircleArc& PreimageSet::arc(std::int64_t i) const {
  if (i < 0 || i >= size()) throw DomainError("preimage index " + std::to_string(i) + " outside computed range");
  return arcs_[static_cast<size_t>(i)];
}

// --------------------------------------------------------------- partitions

const char* kind_name(ElementKind k) {
  switch (k) {
    case ElementKind::preimage: return "preimage";
    case ElementKind::long_gap: return "long";
    case ElementKind::short_gap: return "short";
  }
  return "?";
}

std::vector<Real> DynamicalPartition::gap_lengths() const {
  std::vector<Real> out;
  for (const auto& e : elements)
    if (e.kind != ElementKind::preimage) out.push_back(e.arc.length);
  return out;
}

std::string DynamicalPartition::to_csv() const {
  std::ostringstream os;
  os << "type,index,left,length\n";
  for (const auto& e : elements)
    os << kind_name(e.kind) << ',' << e.index << ',' << e.arc.left.pos().str() << ',' << e.arc.length.str() << '\n';
  return os.str();
}

DynamicalPartition build_partition(const FlatMap& m, const PreimageSet& pre, const ContinuedFraction& cf, int n) {
  if (n < 1) throw DomainError("partition level must be at least 1");
  if (cf.depth() < n + 1)
    throw PrecisionExhausted("rotation number certified to depth " + std::to_string(cf.depth()) + ", level " +
                             std::to_string(n) + " needs depth " + std::to_string(n + 1));
  DynamicalPartition P;
  P.level = n;
  P.qn = cf.q[static_cast<size_t>(n)];
  P.qn1 = cf.q[static_cast<size_t>(n) + 1];
  const std::int64_t N = P.qn + P.qn1;
  if (pre.size() < N) throw DomainError("level " + std::to_string(n) + " needs " + std::to_string(N) + " preimages");

  std::vector<std::int64_t> order(static_cast<size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::int64_t a, std::int64_t b) { return pre.arc(a).left.pos() < pre.arc(b).left.pos(); });
  if (order[0] != 0) throw InconsistencyError("flat interval is not the first element");

  const unsigned bits = m.precision();
  const Real tiny = Real::pow2(-static_cast<long>(bits) + 32, bits);
  P.long_at.assign(static_cast<size_t>(P.qn1), SIZE_MAX);
  P.short_at.assign(static_cast<size_t>(P.qn), SIZE_MAX);
  Real total(0);
  for (size_t k = 0; k < order.size(); ++k) {
    const std::int64_t ia = order[k];
    const std::int64_t ib = order[(k + 1) % order.size()];
    const CircleArc& a = pre.arc(ia);
    P.elements.push_back({ElementKind::preimage, ia, a});
    total += a.length;
    Real end = k + 1 < order.size() ? pre.arc(ib).left.pos() : Real(1);
    Real len = end - a.right_unwrapped();
    if (len <= tiny)
      throw PrecisionExhausted("gap at level " + std::to_string(n) + " between preimages " + std::to_string(ia) +
                               " and " + std::to_string(ib) + " is below working precision");
    const std::int64_t diff = ia > ib ? ia - ib : ib - ia;
    const std::int64_t gi = std::min(ia, ib);
    ElementKind kind;
    if (diff == P.qn) {
      kind = ElementKind::long_gap;
      if (gi >= P.qn1 || P.long_at[static_cast<size_t>(gi)] != SIZE_MAX)
        throw InconsistencyError("unexpected long gap index " + std::to_string(gi));
      P.long_at[static_cast<size_t>(gi)] = P.elements.size();
    } else if (diff == P.qn1) {
      kind = ElementKind::short_gap;
      if (gi >= P.qn || P.short_at[static_cast<size_t>(gi)] != SIZE_MAX)
        throw InconsistencyError("unexpected short gap index " + std::to_string(gi));
      P.short_at[static_cast<size_t>(gi)] = P.elements.size();
    } else {
      throw InconsistencyError("gap between preimages " + std::to_string(ia) + " and " + std::to_string(ib) +
                               " has index difference " + std::to_string(diff));
    }
    P.elements.push_back({kind, gi, CircleArc(a.right(), len)});
    total += len;
  }
  if (abs(total - Real(1)) > tiling_tolerance(bits))
    throw InconsistencyError("level " + std::to_string(n) + " does not tile the circle");
  for (auto pos : P.long_at)
    if (pos == SIZE_MAX) throw InconsistencyError("missing long gap");
  for (auto pos : P.short_at)
    if (pos == SIZE_MAX) throw InconsistencyError("missing short gap");

  // The long gap next to U lies on its left for even levels.
  const Element& last = P.elements.back();
  const Element& second = P.elements[1];
  const bool left_side = last.kind == ElementKind::long_gap && last.index == 0;
  const bool right_side = second.kind == ElementKind::long_gap && second.index == 0;
  if ((n % 2 == 0 && !left_side) || (n % 2 == 1 && !right_side))
    throw InconsistencyError("level " + std::to_string(n) + " has the wrong orientation around U");

  // f carries I_i onto I_{i-1}.
  const Real tol = Real::pow2(-static_cast<long>(bits) + 40, bits);
  auto pulls_back = [&](const Element& g, const Element& img) {
    return circle_dist(m.forward(g.arc.left), img.arc.left) <= tol &&
           circle_dist(m.forward(g.arc.right()), img.arc.right()) <= tol;
  };
  for (std::int64_t i = 1; i < P.qn1; ++i)
    if (!pulls_back(P.long_gap(i), P.long_gap(i - 1)))
      throw InconsistencyError("long gap " + std::to_string(i) + " does not map onto its successor");
  for (std::int64_t i = 1; i < P.qn; ++i)
    if (!pulls_back(P.short_gap(i), P.short_gap(i - 1)))
      throw InconsistencyError("short gap " + std::to_string(i) + " does not map onto its successor");
  return P;
}

// --------------------------------------------------------------- refinement

namespace {

// For each coarse element, the half-open range of fine elements inside it.
std::vector<std::pair<size_t, size_t>> nest(const DynamicalPartition& coarse, const DynamicalPartition& fine,
                                            const Real& tol) {
  std::vector<std::pair<size_t, size_t>> out;
  size_t j = 0;
  for (const auto& e : coarse.elements) {
    const Real lo = e.arc.left.pos();
    const Real hi = e.arc.right_unwrapped();
    size_t start = j;
    while (j < fine.elements.size() && fine.elements[j].arc.left.pos() < hi - tol) {
      const auto& f = fine.elements[j];
      if (f.arc.left.pos() < lo - tol || f.arc.right_unwrapped() > hi + tol)
        throw InconsistencyError("level " + std::to_string(fine.level) + " element straddles a level " +
                                 std::to_string(coarse.level) + " boundary");
      ++j;
    }
    out.emplace_back(start, j);
  }
  if (j != fine.elements.size()) throw InconsistencyError("finer partition extends past the circle");
  return out;
}

}  // namespace

RefinementReport refine_check(const DynamicalPartition& coarse, const DynamicalPartition& fine,
                              const ContinuedFraction& cf) {
  const int n = coarse.level;
  if (fine.level != n + 1) throw DomainError("refinement compares consecutive levels");
  RefinementReport rep;
  rep.level = n;
  const std::int64_t a = cf.quotient(n + 2);
  const unsigned bits = coarse.elements[0].arc.length.precision();
  const Real tol = Real::pow2(-static_cast<long>(bits) + 40, bits);
  auto fail = [&](size_t pos, std::string why) {
    if (rep.pass) {
      rep.pass = false;
      rep.first_offender = static_cast<std::int64_t>(pos);
      rep.detail = std::move(why);
    }
  };

  auto ranges = nest(coarse, fine, tol);
  for (size_t pos = 0; pos < coarse.elements.size(); ++pos) {
    const Element& e = coarse.elements[pos];
    auto [s, t] = ranges[pos];
    int gaps = 0;
    for (size_t j = s; j < t; ++j) gaps += fine.elements[j].kind != ElementKind::preimage;
    rep.max_gap_split = std::max(rep.max_gap_split, gaps);

    if (e.kind == ElementKind::preimage) {
      if (t - s != 1 || fine.elements[s].kind != ElementKind::preimage || fine.elements[s].index != e.index)
        fail(pos, "preimage " + std::to_string(e.index) + " is not kept");
      continue;
    }
    if (e.kind == ElementKind::short_gap) {
      const Element& c = fine.elements[s];
      if (t - s != 1 || c.kind != ElementKind::long_gap || c.index != e.index ||
          abs(c.arc.length - e.arc.length) > tol)
        fail(pos, "short gap " + std::to_string(e.index) + " is not carried to the next level");
      continue;
    }
    std::vector<std::int64_t> pre, lng, shrt;
    for (size_t j = s; j < t; ++j) {
      const Element& c = fine.elements[j];
      (c.kind == ElementKind::preimage ? pre : c.kind == ElementKind::long_gap ? lng : shrt).push_back(c.index);
    }
    std::vector<std::int64_t> want_pre, want_long;
    for (std::int64_t k = 1; k <= a; ++k) want_pre.push_back(e.index + coarse.qn + k * coarse.qn1);
    for (std::int64_t k = 0; k < a; ++k) want_long.push_back(e.index + coarse.qn + k * coarse.qn1);
    std::sort(pre.begin(), pre.end());
    std::sort(lng.begin(), lng.end());
    if (pre != want_pre || lng != want_long || shrt != std::vector<std::int64_t>{e.index})
      fail(pos, "long gap " + std::to_string(e.index) + " splits as " + std::to_string(pre.size()) + " preimages, " +
                    std::to_string(lng.size()) + " long and " + std::to_string(shrt.size()) + " short gaps");
  }
  return rep;
}

SplitReport two_level_split(const DynamicalPartition& coarse, const DynamicalPartition& finer2,
                            const ContinuedFraction& cf) {
  const int m = coarse.level;
  if (finer2.level != m + 2) throw DomainError("two-level split compares levels m and m + 2");
  SplitReport rep;
  rep.level = m;
  rep.bound = cf.quotient(m + 2) * (cf.quotient(m + 3) + 1) + 1;
  const unsigned bits = coarse.elements[0].arc.length.precision();
  auto ranges = nest(coarse, finer2, Real::pow2(-static_cast<long>(bits) + 40, bits));
  for (size_t pos = 0; pos < coarse.elements.size(); ++pos) {
    if (coarse.elements[pos].kind == ElementKind::preimage) continue;
    int gaps = 0;
    for (size_t j = ranges[pos].first; j < ranges[pos].second; ++j)
      gaps += finer2.elements[j].kind != ElementKind::preimage;
    rep.max_split = std::max(rep.max_split, gaps);
  }
  rep.pass = rep.max_split <= rep.bound;
  return rep;
}

GapStatistics gap_statistics(const DynamicalPartition& p) {
  GapStatistics s;
  s.level = p.level;
  bool first_gap = true, first_pre = true, first_ratio = true;
  const size_t N = p.elements.size();
  for (size_t k = 0; k < N; ++k) {
    const Element& e = p.elements[k];
    if (e.kind == ElementKind::preimage) {
      if (first_pre || e.arc.length > s.max_preimage) s.max_preimage = e.arc.length;
      first_pre = false;
      for (size_t nb : {(k + N - 1) % N, (k + 1) % N}) {
        Real r = e.arc.length / p.elements[nb].arc.length;
        if (first_ratio || r < s.min_preimage_to_gap) s.min_preimage_to_gap = r;
        first_ratio = false;
      }
    } else {
      if (first_gap || e.arc.length > s.max_gap) s.max_gap = e.arc.length;
      if (first_gap || e.arc.length < s.min_gap) s.min_gap = e.arc.length;
      first_gap = false;
    }
  }
  return s;
}

}  // namespace flatcircle
