#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flatcircle/partition.hpp"
#include "flatcircle/pipeline.hpp"

namespace flatcircle {

// Root s of sum |G|^s = 1, given the natural logs of the lengths, found by
// bisection on [0, 1] to 40 bits.
double cover_exponent(std::span<const double> log_lengths);

struct CoverExponent {
  int level = 0;
  double s_star = 0;
  std::vector<std::pair<double, double>> probes;  // (s, sum |G|^s) for s = 0.1..0.9
};
CoverExponent cover_exponent(const DynamicalPartition& p);

enum class MassRule { initial, long_child, short_child, carried };
const char* rule_name(MassRule r);

struct GapMass {
  mpq_class mass;
  MassRule rule;
};

// Masses of the gaps of levels 1..n_max. Level-1 gaps share the mass
// equally. A long gap I_i^n hands half its mass to the short gap of level
// n + 1 with the same index and splits the other half evenly over its
// a_{n+2} long children; a short gap passes its mass unchanged to the long
// gap it becomes.
class MassMeasure {
 public:
  MassMeasure(std::span<const DynamicalPartition> parts, const ContinuedFraction& cf);

  int levels() const { return static_cast<int>(long_.size()); }
  const GapMass& long_mass(int level, std::int64_t i) const;
  const GapMass& short_mass(int level, std::int64_t i) const;
  mpq_class total(int level) const;
  // Exact check of mu(G) <= 2^(-g/2), g the generation of the gap.
  bool decay_bound_holds(int* first_bad_level = nullptr) const;

 private:
  std::vector<std::vector<GapMass>> long_, short_;
};

// Largest alpha with mu(G) <= |G|^alpha for every listed set: the minimum
// of log mu / log |G|.
double min_mass_exponent(std::span<const double> log_masses, std::span<const double> log_lengths);

struct FrostmanResult {
  double alpha_hat = 0;  // min over all gaps of log mu(G) / log |G|
  int alpha_level = 0;   // level where the minimum is attained
  double c_hat = 0;      // sup over test intervals of mu(I) / |I|^alpha_hat
  std::int64_t intervals = 0;
};

// Test intervals: all arcs with endpoints on element boundaries of the two
// deepest levels, plus `random_intervals` seeded arcs, whose mass is bounded
// by the deepest gaps they meet.
FrostmanResult frostman_exponent(const MassMeasure& mu, std::span<const DynamicalPartition> parts,
                                 std::uint64_t seed, int random_intervals = 1000);

struct SoleSplitLevel {
  int level = 0;
  int min_children = 0;   // gaps of level n inside a gap of level n - 2
  int max_children = 0;
  double max_ratio = 0;   // max |A^n| / |A^{n-2}|
  std::optional<double> ratio_over_alpha;  // max_ratio / alpha_{n-1}
};

struct SoleSplitReport {
  std::vector<SoleSplitLevel> levels;
  bool every_gap_splits = true;
  double c_hat = 0;          // max over levels of ratio_over_alpha
  double alpha_rate = 0;     // max over levels >= 6 of alpha_n^(1/n)
};

SoleSplitReport sole_split_check(std::span<const DynamicalPartition> parts, const ScalingSeries& series);

enum class Verdict { bounded, degenerate, undecided };
const char* verdict_name(Verdict v);

struct SweepThresholds {
  double tau_floor = 0.15;      // bounded when min tau over levels >= 4 stays above
  double slope_sigmas = 2.0;    // degenerate when slope + k * stderr < 0
};

struct DimensionEstimate {
  std::vector<CoverExponent> cover;  // levels 1..n_max
  FrostmanResult frostman;
  double gap_base = 0;               // exp of the fitted slope of log min gap
  bool mass_conserved = true;
  bool mass_decay_bound = true;
};

DimensionEstimate estimate_dimension(const MapAnalysis& a, std::uint64_t seed, int random_intervals = 1000);

struct SweepRow {
  std::string exponent;  // decimal text of l
  Verdict verdict = Verdict::undecided;
  std::vector<double> tau;       // levels 2..n_max
  double tau_min = 0;            // over levels >= 4
  double log_tau_slope = 0, log_tau_slope_se = 0;
  std::vector<double> s_star;    // levels 1..n_max
  double alpha_hat = 0;
  std::optional<double> one_plus_alpha;  // l > 2 only
  std::string error;             // set when this grid point failed
};

Verdict classify(const std::vector<double>& tau_from_level2, const SweepThresholds& th, double* tau_min = nullptr,
                 double* slope = nullptr, double* slope_se = nullptr);

// One row per exponent; a failing grid point records its error and the
// sweep continues. Rows are computed concurrently but returned in grid order.
std::vector<SweepRow> phase_transition_sweep(const std::vector<std::string>& exponents, const AnalysisOptions& base,
                                             const SweepThresholds& th, std::uint64_t seed, int threads = 0);

struct CherryBound {
  double saddle_ratio = 0;  // |lambda_2| / lambda_1, the critical exponent of the return map
  double alpha_hat = 0;
  double lower_bound = 0;   // 1 + alpha_hat
  bool exceeds_one = false;
};

// Dimension bound for the quasiminimal set of a Cherry flow whose saddle has
// eigenvalues -saddle_stable < 0 < saddle_unstable. Requires
// saddle_stable > 2 saddle_unstable.
CherryBound cherry_quasiminimal_dimension(double saddle_stable, double saddle_unstable, double alpha_hat);

}  // namespace flatcircle
