#include "flatcircle/scalings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "flatcircle/error.hpp"
#include "flatcircle/stats.hpp"

namespace flatcircle {

namespace {

Real underflow_floor(unsigned bits) { return Real::pow2(-static_cast<long>(bits) + 32, bits); }

std::size_t at_index(std::int64_t n) { return static_cast<std::size_t>(n); }

// Open interval on the shorter side between two disjoint arcs.
std::pair<Real, Real> between(const CircleArc& x, const CircleArc& y) {
  Real xy = ccw_offset(x.left, y.left) - x.length;
  Real yx = ccw_offset(y.left, x.left) - y.length;
  if (xy <= yx) return {x.right_unwrapped(), xy};
  return {y.right_unwrapped(), yx};
}

// min/max over eight equal pieces of |f^k piece| / |piece|.
double distortion_spread(const FlatMap& m, const Real& start, const Real& len, std::int64_t k) {
  constexpr int pieces = 8;
  std::vector<CirclePoint> ends;
  for (int j = 0; j <= pieces; ++j) {
    CirclePoint p(start + len * Real(j) / Real(pieces));
    for (std::int64_t t = 0; t < k; ++t) p = m.forward(p);
    ends.push_back(p);
  }
  const Real piece = len / Real(pieces);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (int j = 0; j < pieces; ++j) {
    double d = (ccw_offset(ends[j], ends[j + 1]) / piece).to_double();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi > 0 ? lo / hi : 0.0;
}

// Position of the element of p containing x.
std::size_t locate(const DynamicalPartition& p, const Real& x) {
  auto it = std::upper_bound(p.elements.begin(), p.elements.end(), x,
                             [](const Real& v, const Element& e) { return v < e.arc.left.pos(); });
  return static_cast<std::size_t>(std::distance(p.elements.begin(), it)) - 1;
}

}  // namespace

Real MapGeometry::to_flat(std::int64_t k) const { return dist_point_arc(orbit.point(k), pre.arc(0)); }

std::optional<bool> LevelScalings::alpha_exceeds_tau() const {
  if (!alpha || !tau) return std::nullopt;
  return *alpha > *tau;
}

const LevelScalings& ScalingSeries::at(int n) const {
  if (n < 1 || n > max_level()) throw DomainError("scaling level " + std::to_string(n) + " not computed");
  return levels[static_cast<size_t>(n - 1)];
}

ScalingSeries compute_scalings(const MapGeometry& g, int n_max) {
  if (g.cf.depth() < n_max)
    throw PrecisionExhausted("rotation number certified to depth " + std::to_string(g.cf.depth()) +
                             ", scalings need depth " + std::to_string(n_max));
  const auto& q = g.cf.q;
  const Real tiny = underflow_floor(g.map.precision());
  const CircleArc& U = g.pre.arc(0);
  ScalingSeries out;
  for (int n = 1; n <= n_max; ++n) {
    LevelScalings L;
    L.level = n;
    const std::int64_t qn = q[at_index(n)], qn1 = q[at_index(n - 1)];
    Real d_n = g.to_flat(qn), d_n1 = g.to_flat(qn1);
    const CircleArc& back = g.pre.arc(qn);
    Real gap = dist_arc_arc(back, U);
    if (d_n < tiny || d_n1 < tiny || gap < tiny || back.length < tiny) {
      L.skipped = true;
      L.note = "distance below working precision";
      out.levels.push_back(std::move(L));
      continue;
    }
    L.sigma = d_n / d_n1;
    L.alpha = gap / (gap + back.length);
    if (n >= 2) {
      const std::int64_t qn2 = q[at_index(n - 2)];
      Real d_n2 = g.to_flat(qn2);
      if (d_n2 < tiny) {
        L.skipped = true;
        L.note = "distance below working precision";
      } else {
        L.tau = d_n / d_n2;
        L.s = dist_arc_arc(g.pre.arc(qn2), U, ArcArcMode::closed_closed) / U.length;
      }
    }
    out.levels.push_back(std::move(L));
  }
  return out;
}

Real poin(const Real& a, const Real& b, const Real& c, const Real& d) {
  if (!(a < b && b < c && c < d)) throw DomainError("Poin needs a < b < c < d");
  return (d - a) * (c - b) / ((c - a) * (d - b));
}

CrossRatioReport cross_ratio_expansion_check(const FlatMap& m, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CrossRatioReport rep;
  rep.min_factor = std::numeric_limits<double>::infinity();
  const Real& u = m.flat_length();
  const Real span = Real(1) - u;
  Real worst_factor;
  while (rep.samples < samples) {
    std::array<double, 4> t{unit(rng), unit(rng), unit(rng), unit(rng)};
    std::sort(t.begin(), t.end());
    if (t[0] <= 0.0 || t[0] == t[1] || t[1] == t[2] || t[2] == t[3]) continue;
    Real a = u + span * Real(t[0]), b = u + span * Real(t[1]);
    Real c = u + span * Real(t[2]), d = u + span * Real(t[3]);
    Real before = poin(a, b, c, d);
    Real after = poin(m.lift(a), m.lift(b), m.lift(c), m.lift(d));
    Real factor = after / before;
    ++rep.samples;
    if (after <= before) ++rep.contractions;
    double f = factor.to_double();
    rep.max_deviation = std::max(rep.max_deviation, std::fabs((factor - Real(1)).to_double()));
    if (rep.worst.empty() || factor < worst_factor) {
      worst_factor = factor;
      rep.min_factor = f;
      rep.worst = {DistortionSample{a, b, c, d, before, after}};
    }
  }
  return rep;
}

KoebeReport koebe_distortion_report(const MapGeometry& g, int n_max) {
  KoebeReport rep;
  rep.constant = std::numeric_limits<double>::infinity();
  const auto& q = g.cf.q;
  for (int n = 2; n <= n_max && n + 1 <= g.cf.depth(); ++n) {
    const std::int64_t qn = q[at_index(n)], qn1 = q[at_index(n + 1)], qm = q[at_index(n - 1)];
    // f^(q_{n+1} - q_n) on the gap between -q_{n+1} and -q_{n+1} + q_n.
    {
      auto [start, len] = between(g.pre.arc(qn1), g.pre.arc(qn1 - qn));
      const std::int64_t k = qn1 - qn;
      KoebeRow row{n, "long_gap", k, distortion_spread(g.map, start, len, k)};
      rep.constant = std::min(rep.constant, row.min_ratio);
      rep.rows.push_back(row);
    }
    // f^(q_n - q_{n-1} - 1) on the gap between -q_n + q_{n-1} + 1 and -q_n + 1.
    if (qn - qm - 1 >= 1) {
      auto [start, len] = between(g.pre.arc(qn - qm - 1), g.pre.arc(qn - 1));
      const std::int64_t k = qn - qm - 1;
      KoebeRow row{n, "short_gap", k, distortion_spread(g.map, start, len, k)};
      rep.constant = std::min(rep.constant, row.min_ratio);
      rep.rows.push_back(row);
    }
  }
  if (rep.rows.empty()) rep.constant = 0;
  return rep;
}

void RatioRange::add(double v) {
  if (empty) min = max = v, empty = false;
  min = std::min(min, v);
  max = std::max(max, v);
}

ComparabilityReport comparability_report(const MapGeometry& g, std::span<const DynamicalPartition> parts,
                                         const ScalingSeries& series) {
  ComparabilityReport rep;
  const auto& q = g.cf.q;
  const CircleArc& U = g.pre.arc(0);
  for (const auto& P : parts) {
    const int n = P.level;
    ComparabilityLevel L;
    L.level = n;
    std::vector<const Element*> gaps;
    for (const auto& e : P.elements)
      if (e.kind != ElementKind::preimage) gaps.push_back(&e);
    for (size_t k = 0; k < gaps.size(); ++k)
      L.adjacent_gaps.add((gaps[k]->arc.length / gaps[(k + 1) % gaps.size()]->arc.length).to_double());
    L.flat_neighbours = (P.long_gap(0).arc.length / P.short_gap(0).arc.length).to_double();
    if (n >= 2 && n <= g.cf.depth()) {
      const std::int64_t qn = q[at_index(n)], qm = q[at_index(n - 1)], a = g.cf.quotient(n);
      for (std::int64_t i = 0; i <= a; ++i) {
        const CircleArc& arc = g.pre.arc(qn - i * qm);
        L.preimage_to_gap.add((arc.length / dist_arc_arc(arc, U, ArcArcMode::closed_open)).to_double());
      }
      if (n - 1 <= series.max_level() && series.at(n - 1).alpha) {
        const Real& alpha_prev = *series.at(n - 1).alpha;
        for (std::int64_t i = 0; i < a; ++i) {
          const CircleArc& outer = g.pre.arc(qn - (i + 1) * qm);
          const CircleArc& inner = g.pre.arc(qn - i * qm);
          Real w = dist_arc_arc(outer, inner) / inner.length;
          L.gap_over_alpha.add((w / alpha_prev).to_double());
        }
      }
    }
    if (n >= 4) {
      auto merge = [](RatioRange& into, const RatioRange& r) {
        if (!r.empty) into.add(r.min), into.add(r.max);
      };
      merge(rep.adjacent_gaps, L.adjacent_gaps);
      rep.flat_neighbours.add(*L.flat_neighbours);
      merge(rep.preimage_to_gap, L.preimage_to_gap);
      merge(rep.gap_over_alpha, L.gap_over_alpha);
    }
    rep.levels.push_back(std::move(L));
  }
  return rep;
}

double SigmaTable::operator()(double t) const {
  double t0 = 0, s0 = 0;
  for (const auto& [t1, s1] : points) {
    if (t <= t1) return t1 == t0 ? s1 : s0 + (s1 - s0) * (t - t0) / (t1 - t0);
    t0 = t1, s0 = s1;
  }
  return s0;
}

PowerInequality power_inequality(const Real& x, const Real& y, const Real& l) {
  if (!(x > y) || y.sign() < 0) throw DomainError("power inequality needs x > y >= 0");
  PowerInequality p;
  const Real xl = pow(x, l);
  p.lhs = (xl - pow(y, l)) / xl;
  const Real r = (x - y) / x;
  p.rhs = r * (l - l * (l - Real(1)) / Real(2) * r);
  p.holds = p.lhs >= p.rhs;
  return p;
}

RecursionCheck scaling_recursion_check(const MapGeometry& g, const ScalingSeries& series, int n_max,
                                        const std::optional<SigmaTable>& table) {
  const Real& l = g.map.exponent();
  if (!(l > Real(1) && l <= Real(2))) throw DomainError("recursion check needs 1 < l <= 2");
  const auto& q = g.cf.q;
  const CircleArc& U = g.pre.arc(0);
  const Real bound_x = Real::parse("0.55");
  RecursionCheck out;
  n_max = std::min({n_max, series.max_level(), g.cf.depth()});
  for (int n = 3; n <= n_max; ++n) {
    RecursionLevel R;
    R.level = n;
    const auto &S = series.at(n), &S1 = series.at(n - 1), &S2 = series.at(n - 2);
    if (!S.alpha || !S.sigma || !S1.s || !S1.alpha || !S2.alpha || !S2.sigma) {
      R.note = "inputs not computable";
      out.levels.push_back(std::move(R));
      continue;
    }
    const std::int64_t qn = q[at_index(n)], qm = q[at_index(n - 1)], qm2 = q[at_index(n - 2)];
    const std::int64_t a = g.cf.quotient(n);

    // Intermediate ratios.
    for (std::int64_t k = 1; k <= a; ++k) {
      const CircleArc& arc = g.pre.arc(qn - k * qm);
      Real d = dist_point_arc(g.orbit.point(k * qm), arc);
      R.delta.push_back(d / (d + arc.length));
      Real gap = dist_arc_arc(arc, U, ArcArcMode::open_closed);
      R.s_k.push_back((gap + arc.length) / gap);
    }
    const CircleArc& back2 = g.pre.arc(qm2);
    Real to_u = dist_arc_arc(back2, U);  // |(-q_{n-2}, 0)|
    Real to_u_closed = to_u + back2.length;
    Real inner = dist_point_arc(g.orbit.point(a * qm), back2);
    R.nu = (to_u_closed / g.to_flat(qm)) * (to_u_closed / (inner + back2.length));
    R.mu = inner / to_u;
    {
      PowerInequality pi = power_inequality(to_u, to_u - inner, l);
      R.power_holds = pi.lhs >= pi.rhs - underflow_floor(g.map.precision());
    }

    // Distortion constants.
    double c_n = 1, k_prod = 1;
    if (table) {
      double rho = 0, sum_c = 0;
      for (std::int64_t j = 0; j <= qm2 - 2; ++j) {
        rho = std::max(rho, circle_dist(g.orbit.point(a * qm + 1 + j), g.orbit.point(1 + j)).to_double());
        sum_c += g.pre.arc(qm2 - 1 - j).length.to_double();
      }
      c_n = std::exp((*table)(rho) * sum_c);
      for (std::int64_t i = 0; i < a; ++i) {
        double tau_in = 0, sum_k = 0;
        for (std::int64_t j = 0; j <= qm - 2; ++j) {
          const CircleArc& far = g.pre.arc(qm - 1 - j);
          tau_in = std::max(tau_in, dist_point_arc(g.orbit.point(i * qm + 1 + j), far, EndMode::far).to_double());
          sum_k += g.pre.arc(qn - i * qm - 1 - j).length.to_double();
        }
        k_prod *= std::exp((*table)(tau_in) * sum_k);
      }
    }
    R.c_n = c_n;
    R.k_product = k_prod;

    const Real& s1 = *S1.s;
    const Real& a1 = *S1.alpha;
    const Real& a2 = *S2.alpha;
    Real x = Real(2) * (l - Real(1)) / l * s1 * a1;
    R.x = x.to_double();
    Real cx = x * Real(c_n);
    if (cx >= Real(1)) {
      R.note = "quadratic root not real";
      out.levels.push_back(std::move(R));
      continue;
    }
    R.computable = true;
    ++out.computable_levels;
    R.x_within_bound = x <= bound_x;
    Real root_c = Real(1) + sqrt(Real(1) - cx);
    Real root_1 = Real(1) + sqrt(Real(1) - x);
    Real m_tilde = s1 * s1 * (Real(2) / l) / root_c / (Real(1) - a2) * (*S.sigma / *S2.sigma);
    R.t_factor = (root_1 / root_c).to_double();
    R.t_within_bound = R.t_factor <= 1.0 + 1.3 * (c_n - 1.0) + 1e-12;
    R.m_tilde = m_tilde;
    R.lhs = pow(*S.alpha, l);
    R.rhs = Real(k_prod) * Real(c_n) * m_tilde * a2 * a2;
    R.pass = *R.lhs <= *R.rhs;
    if (!*R.pass) out.all_pass = false;
    if (!R.x_within_bound) out.all_x_bounded = false;
    out.levels.push_back(std::move(R));
  }
  return out;
}

DisjointnessReport disjointness_sum_check(const MapGeometry& g, std::span<const DynamicalPartition> parts) {
  DisjointnessReport rep;
  const auto& q = g.cf.q;
  auto level = [&](int n) -> const DynamicalPartition* {
    for (const auto& p : parts)
      if (p.level == n) return &p;
    return nullptr;
  };
  std::vector<double> xs, ys;
  for (const auto& P : parts) {
    const int n = P.level;
    const DynamicalPartition* coarse = level(n - 2);
    const DynamicalPartition* prev = level(n - 1);
    if (!coarse || !prev || n > g.cf.depth()) continue;
    const std::int64_t qn = q[at_index(n)], qm = q[at_index(n - 1)];
    if (qm < 2) continue;
    const std::int64_t a = g.cf.quotient(n);
    DisjointnessLevel L;
    L.level = n;
    Real widest(0);
    for (const auto& e : prev->elements)
      if (e.kind != ElementKind::preimage) widest = max(widest, e.arc.length);
    for (std::int64_t i = 0; i < a; ++i) {
      std::vector<const CircleArc*> arcs;
      Real sum(0);
      for (std::int64_t j = 0; j <= qm - 2; ++j) {
        const CircleArc& arc = g.pre.arc(qn - i * qm - 1 - j);
        arcs.push_back(&arc);
        sum += arc.length;

        // The open stretch from point i q_{n-1} + 1 + j to the arc -q_{n-1} + 1 + j
        // must sit inside one gap of level n - 2, next to that arc.
        const CirclePoint& p = g.orbit.point(i * qm + 1 + j);
        const std::int64_t target = qm - 1 - j;
        const CircleArc& far = g.pre.arc(target);
        const std::size_t pos = locate(*coarse, p.pos());
        const Element& home = coarse->elements[pos];
        const std::size_t N = coarse->elements.size();
        bool ok = home.kind != ElementKind::preimage;
        if (ok) {
          const bool forward = ccw_offset(p, far.left) <= ccw_offset(far.right(), p);
          const Element& nb = coarse->elements[forward ? (pos + 1) % N : (pos + N - 1) % N];
          ok = nb.kind == ElementKind::preimage && nb.index == target;
        }
        if (!ok) ++L.containment_failures;
      }
      std::sort(arcs.begin(), arcs.end(),
                [](const CircleArc* x, const CircleArc* y) { return x->left.pos() < y->left.pos(); });
      for (size_t k = 0; k + 1 < arcs.size(); ++k)
        if (arcs[k]->right_unwrapped() > arcs[k + 1]->left.pos()) ++L.overlaps;
      if (sum > widest) L.sum_below_gap = false;
      L.sums.push_back(sum.to_double());
    }
    rep.overlaps += L.overlaps;
    rep.containment_failures += L.containment_failures;
    if (n >= 4 && !L.sums.empty()) {
      xs.push_back(n);
      ys.push_back(std::log(*std::max_element(L.sums.begin(), L.sums.end())));
    }
    rep.levels.push_back(std::move(L));
  }
  if (xs.size() >= 2) {
    LinearFit f = fit_line(xs, ys);
    rep.lambda_hat = std::exp(f.slope);
    rep.r_squared = f.r_squared;
  }
  return rep;
}

}  // namespace flatcircle
