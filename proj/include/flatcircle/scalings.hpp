#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flatcircle/partition.hpp"

namespace flatcircle {

// Geometry of one tuned map: the map, its certified expansion, the forward
// orbit of U and enough preimages for the requested levels.
struct MapGeometry {
  const FlatMap& map;
  const ContinuedFraction& cf;
  const ForwardOrbit& orbit;
  const PreimageSet& pre;

  // |(0, k)|: distance from orbit point k to the nearer end of U.
  Real to_flat(std::int64_t k) const;
};

struct LevelScalings {
  int level = 0;
  std::optional<Real> tau;    // |(0,q_n)| / |(0,q_{n-2})|
  std::optional<Real> alpha;  // |(-q_n,0)| / |[-q_n,0)|
  std::optional<Real> sigma;  // |(0,q_n)| / |(0,q_{n-1})|
  std::optional<Real> s;      // |[-q_{n-2},0]| / |U|
  bool skipped = false;
  std::string note;
  // Present when both alpha and tau are.
  std::optional<bool> alpha_exceeds_tau() const;
};

struct ScalingSeries {
  std::vector<LevelScalings> levels;  // levels[n - 1] is level n
  const LevelScalings& at(int n) const;
  int max_level() const { return static_cast<int>(levels.size()); }
};

ScalingSeries compute_scalings(const MapGeometry& g, int n_max);

// Poin(a,b,c,d) = |d-a||b-c| / (|c-a||d-b|) for a < b < c < d.
Real poin(const Real& a, const Real& b, const Real& c, const Real& d);

struct DistortionSample {
  Real a, b, c, d;
  Real before, after;
};

struct CrossRatioReport {
  int samples = 0;
  int contractions = 0;      // after <= before
  double min_factor = 0;     // min over samples of after / before
  double max_deviation = 0;  // max |after / before - 1|
  std::vector<DistortionSample> worst;  // the sample with the smallest factor
};

// Seeded quadruples inside the smooth branch, mapped through the lift.
CrossRatioReport cross_ratio_expansion_check(const FlatMap& m, int samples, std::uint64_t seed);

struct KoebeRow {
  int level = 0;
  std::string family;      // "long_gap" or "short_gap"
  std::int64_t iterate = 0;
  double min_ratio = 0;    // min over sub-interval pairs of (|f^k A|/|f^k B|) / (|A|/|B|)
};

struct KoebeReport {
  std::vector<KoebeRow> rows;
  double constant = 0;  // smallest ratio seen
};

KoebeReport koebe_distortion_report(const MapGeometry& g, int n_max);

struct RatioRange {
  double min = 0, max = 0;
  bool empty = true;
  void add(double v);
};

struct ComparabilityLevel {
  int level = 0;
  RatioRange adjacent_gaps;  // |G_k| / |G_{k+1}| over neighbouring gaps
  std::optional<double> flat_neighbours;  // |I_0^n| / |I_0^{n+1}|
  RatioRange preimage_to_gap;  // |-q_n + i q_{n-1}| / |[-q_n + i q_{n-1}, 0)|
  RatioRange gap_over_alpha;   // omega_i / alpha_{n-1}
};

struct ComparabilityReport {
  std::vector<ComparabilityLevel> levels;
  // Ranges over levels >= 4.
  RatioRange adjacent_gaps, flat_neighbours, preimage_to_gap, gap_over_alpha;
};

ComparabilityReport comparability_report(const MapGeometry& g, std::span<const DynamicalPartition> parts,
                                         const ScalingSeries& series);

// Piecewise linear upper bound for the distortion function, with value 0 at 0.
struct SigmaTable {
  std::vector<std::pair<double, double>> points;  // (t, sigma(t)), increasing t
  double operator()(double t) const;
};

struct RecursionLevel {
  int level = 0;
  bool computable = false;
  double x = 0;  // 2(l-1)/l s_{n-1} alpha_{n-1}
  bool x_within_bound = false;  // x <= 0.55
  std::optional<Real> m_tilde, lhs, rhs;
  std::optional<bool> pass;
  std::vector<Real> delta, s_k;  // delta_n(k), s_n(k), k = 1..a_n
  Real nu, mu;                   // nu_{n-2}, mu_{n-2}
  bool power_holds = true;       // elementary power inequality at the mu step
  double t_factor = 1;           // T_n(l)
  bool t_within_bound = true;    // T_n <= 1 + 1.3 (C_n - 1)
  double c_n = 1;
  double k_product = 1;
  std::string note;
};

struct RecursionCheck {
  std::vector<RecursionLevel> levels;
  bool all_pass = true;        // inequality at computable levels
  bool all_x_bounded = true;   // x <= 0.55 at computable levels
  int computable_levels = 0;
};

// (x^l - y^l) / x^l against r (l - l(l-1)/2 r) with r = (x - y) / x, x > y >= 0.
struct PowerInequality {
  Real lhs, rhs;
  bool holds = false;
};
PowerInequality power_inequality(const Real& x, const Real& y, const Real& l);

// Requires 1 < l <= 2. Without a table K_{i,n} = C_n = 1.
RecursionCheck scaling_recursion_check(const MapGeometry& g, const ScalingSeries& series, int n_max,
                                        const std::optional<SigmaTable>& table = std::nullopt);

struct DisjointnessLevel {
  int level = 0;
  std::vector<double> sums;  // per i
  int overlaps = 0;
  int containment_failures = 0;
  bool sum_below_gap = true;  // sum <= largest gap of level n - 1
};

struct DisjointnessReport {
  std::vector<DisjointnessLevel> levels;
  int overlaps = 0;
  int containment_failures = 0;
  double lambda_hat = 0;  // exp of the fitted slope of log max_i sum
  double r_squared = 0;
};

// parts[k] must hold level k + 1.
DisjointnessReport disjointness_sum_check(const MapGeometry& g, std::span<const DynamicalPartition> parts);

}  // namespace flatcircle
