#include "flatcircle/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "flatcircle/error.hpp"
#include "flatcircle/stats.hpp"

namespace flatcircle {

// ------------------------------------------------------------ cover exponent

namespace {

// log sum_i exp(s * x_i), stable for very negative x_i.
double log_power_sum(std::span<const double> log_lengths, double s) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : log_lengths) top = std::max(top, s * x);
  double acc = 0;
  for (double x : log_lengths) acc += std::exp(s * x - top);
  return top + std::log(acc);
}

double log_of(const mpq_class& v) {
  long en = 0, ed = 0;
  double mn = mpz_get_d_2exp(&en, v.get_num_mpz_t());
  double md = mpz_get_d_2exp(&ed, v.get_den_mpz_t());
  return std::log(mn / md) + static_cast<double>(en - ed) * std::log(2.0);
}

}  // namespace

double cover_exponent(std::span<const double> log_lengths) {
  if (log_lengths.empty()) throw DomainError("cover exponent of an empty family");
  for (double x : log_lengths)
    if (!(x < 0)) throw DomainError("cover exponent needs lengths below 1");
  double lo = 0, hi = 1;
  if (log_power_sum(log_lengths, hi) >= 0) return 1.0;
  if (log_power_sum(log_lengths, lo) <= 0) return 0.0;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (log_power_sum(log_lengths, mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

CoverExponent cover_exponent(const DynamicalPartition& p) {
  std::vector<double> logs;
  for (const auto& e : p.elements)
    if (e.kind != ElementKind::preimage) logs.push_back(e.arc.length.log_abs());
  CoverExponent c;
  c.level = p.level;
  c.s_star = cover_exponent(logs);
  for (int k = 1; k <= 9; ++k) {
    double s = k / 10.0;
    c.probes.emplace_back(s, std::exp(log_power_sum(logs, s)));
  }
  return c;
}

// ---------------------------------------------------------------- measure

const char* rule_name(MassRule r) {
  switch (r) {
    case MassRule::initial: return "initial";
    case MassRule::long_child: return "long-child";
    case MassRule::short_child: return "short-child";
    case MassRule::carried: return "carried";
  }
  return "?";
}

MassMeasure::MassMeasure(std::span<const DynamicalPartition> parts, const ContinuedFraction& cf) {
  if (parts.empty() || parts[0].level != 1) throw DomainError("mass measure starts from level 1");
  {
    const auto& P = parts[0];
    mpq_class share(1, static_cast<unsigned long>(P.long_count() + P.short_count()));
    long_.emplace_back(P.long_count(), GapMass{share, MassRule::initial});
    short_.emplace_back(P.short_count(), GapMass{share, MassRule::initial});
  }
  for (size_t k = 1; k < parts.size(); ++k) {
    const auto& coarse = parts[k - 1];
    const auto& fine = parts[k];
    if (fine.level != coarse.level + 1) throw DomainError("mass measure needs consecutive levels");
    RefinementReport r = refine_check(coarse, fine, cf);
    if (!r.pass) throw InconsistencyError("refinement failed at level " + std::to_string(r.level) + ": " + r.detail);
    const std::int64_t a = cf.quotient(coarse.level + 2);
    std::vector<GapMass> lng(fine.long_count(), GapMass{0, MassRule::initial});
    std::vector<GapMass> shrt(fine.short_count(), GapMass{0, MassRule::initial});
    std::vector<char> seen_long(fine.long_count(), 0), seen_short(fine.short_count(), 0);
    auto claim = [](std::vector<char>& seen, std::int64_t i) {
      if (i < 0 || i >= static_cast<std::int64_t>(seen.size()) || seen[static_cast<size_t>(i)])
        throw InconsistencyError("gap " + std::to_string(i) + " receives mass twice");
      seen[static_cast<size_t>(i)] = 1;
    };
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(coarse.long_count()); ++i) {
      const mpq_class& m = long_.back()[static_cast<size_t>(i)].mass;
      mpq_class child = m / (2 * a);
      for (std::int64_t j = 0; j < a; ++j) {
        const std::int64_t c = i + coarse.qn + j * coarse.qn1;
        claim(seen_long, c);
        lng[static_cast<size_t>(c)] = {child, MassRule::long_child};
      }
      claim(seen_short, i);
      shrt[static_cast<size_t>(i)] = {m / 2, MassRule::short_child};
    }
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(coarse.short_count()); ++i) {
      claim(seen_long, i);
      lng[static_cast<size_t>(i)] = {short_.back()[static_cast<size_t>(i)].mass, MassRule::carried};
    }
    if (std::count(seen_long.begin(), seen_long.end(), 0) || std::count(seen_short.begin(), seen_short.end(), 0))
      throw InconsistencyError("some gap of level " + std::to_string(fine.level) + " received no mass");
    long_.push_back(std::move(lng));
    short_.push_back(std::move(shrt));
    if (total(fine.level) != 1) throw InconsistencyError("mass not conserved at level " + std::to_string(fine.level));
  }
}

const GapMass& MassMeasure::long_mass(int level, std::int64_t i) const {
  return long_.at(static_cast<size_t>(level - 1)).at(static_cast<size_t>(i));
}

const GapMass& MassMeasure::short_mass(int level, std::int64_t i) const {
  return short_.at(static_cast<size_t>(level - 1)).at(static_cast<size_t>(i));
}

mpq_class MassMeasure::total(int level) const {
  mpq_class t = 0;
  for (const auto& g : long_.at(static_cast<size_t>(level - 1))) t += g.mass;
  for (const auto& g : short_.at(static_cast<size_t>(level - 1))) t += g.mass;
  return t;
}

bool MassMeasure::decay_bound_holds(int* first_bad_level) const {
  for (int n = 1; n <= levels(); ++n) {
    auto ok = [](const mpq_class& m, int gen) {
      mpq_class sq = m * m;
      mpz_class p2;
      mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(gen));
      return sq * p2 <= 1;
    };
    bool good = true;
    for (const auto& g : long_[static_cast<size_t>(n - 1)]) good = good && ok(g.mass, n);
    for (const auto& g : short_[static_cast<size_t>(n - 1)]) good = good && ok(g.mass, n + 1);
    if (!good) {
      if (first_bad_level) *first_bad_level = n;
      return false;
    }
  }
  return true;
}

// --------------------------------------------------------------- frostman

double min_mass_exponent(std::span<const double> log_masses, std::span<const double> log_lengths) {
  if (log_masses.size() != log_lengths.size() || log_masses.empty())
    throw DomainError("mass exponent needs matching non-empty inputs");
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < log_masses.size(); ++i) {
    if (!(log_lengths[i] < 0)) throw DomainError("mass exponent needs lengths below 1");
    best = std::min(best, log_masses[i] / log_lengths[i]);
  }
  return best;
}

FrostmanResult frostman_exponent(const MassMeasure& mu, std::span<const DynamicalPartition> parts,
                                 std::uint64_t seed, int random_intervals) {
  if (parts.empty() || static_cast<int>(parts.size()) > mu.levels())
    throw DomainError("Frostman estimate needs partitions covered by the measure");
  FrostmanResult res;
  res.alpha_hat = std::numeric_limits<double>::infinity();
  for (const auto& P : parts) {
    for (const auto& e : P.elements) {
      if (e.kind == ElementKind::preimage) continue;
      const GapMass& g = e.kind == ElementKind::long_gap ? mu.long_mass(P.level, e.index)
                                                         : mu.short_mass(P.level, e.index);
      double r = log_of(g.mass) / e.arc.length.log_abs();
      if (r < res.alpha_hat) res.alpha_hat = r, res.alpha_level = P.level;
    }
  }

  const DynamicalPartition& D = parts.back();
  const size_t M = D.elements.size();
  std::vector<mpq_class> W(M + 1);
  std::vector<Real> Lam(M + 1);
  W[0] = 0;
  Lam[0] = Real(0);
  for (size_t k = 0; k < M; ++k) {
    const Element& e = D.elements[k];
    mpq_class w = 0;
    if (e.kind == ElementKind::long_gap) w = mu.long_mass(D.level, e.index).mass;
    if (e.kind == ElementKind::short_gap) w = mu.short_mass(D.level, e.index).mass;
    W[k + 1] = W[k] + w;
    Lam[k + 1] = Lam[k] + e.arc.length;
  }
  const double a = res.alpha_hat;
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const mpq_class& m, double log_len) {
    ++res.intervals;
    if (m <= 0) return;
    best = std::max(best, log_of(m) - a * log_len);
  };
  // Element boundaries of the deepest level include those of the level above.
  for (size_t i = 0; i < M; ++i) {
    for (size_t j = i + 1; j <= M; ++j) {
      if (i == 0 && j == M) continue;
      mpq_class inside = W[j] - W[i];
      Real len = Lam[j] - Lam[i];
      consider(inside, len.log_abs());
      consider(1 - inside, (Real(1) - len).log_abs());
    }
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double min_log = 0;
  for (const auto& e : D.elements) min_log = std::min(min_log, e.arc.length.log_abs());
  auto element_at = [&](const Real& x) {
    auto it = std::upper_bound(Lam.begin(), Lam.begin() + static_cast<long>(M), x);
    return static_cast<size_t>(std::distance(Lam.begin(), it)) - 1;
  };
  for (int r = 0; r < random_intervals; ++r) {
    double left = unit(rng);
    double log_len = min_log + (std::log(0.5) - min_log) * unit(rng);
    Real lo(left);
    Real hi = frac(lo + Real(std::exp(log_len)));
    size_t k0 = element_at(lo), k1 = element_at(hi);
    mpq_class m = k0 <= k1 ? mpq_class(W[k1 + 1] - W[k0]) : mpq_class(W[M] - W[k0] + W[k1 + 1]);
    consider(m, log_len);
  }
  res.c_hat = std::exp(best);
  return res;
}

// ------------------------------------------------------------- sole split

SoleSplitReport sole_split_check(std::span<const DynamicalPartition> parts, const ScalingSeries& series) {
  SoleSplitReport rep;
  for (size_t k = 2; k < parts.size(); ++k) {
    const auto& coarse = parts[k - 2];
    const auto& fine = parts[k];
    SoleSplitLevel L;
    L.level = fine.level;
    L.min_children = std::numeric_limits<int>::max();
    const unsigned bits = coarse.elements[0].arc.length.precision();
    const Real tol = Real::pow2(-static_cast<long>(bits) + 40, bits);
    size_t j = 0;
    for (const auto& e : coarse.elements) {
      const Real hi = e.arc.right_unwrapped() - tol;
      int children = 0;
      Real widest(0);
      while (j < fine.elements.size() && fine.elements[j].arc.left.pos() < hi) {
        const auto& f = fine.elements[j++];
        if (f.kind == ElementKind::preimage) continue;
        ++children;
        widest = max(widest, f.arc.length);
      }
      if (e.kind == ElementKind::preimage) continue;
      L.min_children = std::min(L.min_children, children);
      L.max_children = std::max(L.max_children, children);
      L.max_ratio = std::max(L.max_ratio, (widest / e.arc.length).to_double());
    }
    if (L.min_children < 2) rep.every_gap_splits = false;
    if (L.level - 1 <= series.max_level() && series.at(L.level - 1).alpha) {
      L.ratio_over_alpha = L.max_ratio / series.at(L.level - 1).alpha->to_double();
      rep.c_hat = std::max(rep.c_hat, *L.ratio_over_alpha);
    }
    rep.levels.push_back(L);
  }
  for (const auto& S : series.levels)
    if (S.level >= 6 && S.alpha)
      rep.alpha_rate = std::max(rep.alpha_rate, std::pow(S.alpha->to_double(), 1.0 / S.level));
  return rep;
}

// ----------------------------------------------------------------- sweep

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::degenerate: return "degenerate";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

Verdict classify(const std::vector<double>& tau, const SweepThresholds& th, double* tau_min, double* slope,
                 double* slope_se) {
  std::vector<double> xs, ys;
  double lo = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < tau.size(); ++k) {
    const int level = static_cast<int>(k) + 2;
    if (level < 4 || !(tau[k] > 0)) continue;
    lo = std::min(lo, tau[k]);
    xs.push_back(level);
    ys.push_back(std::log(tau[k]));
  }
  if (xs.size() < 3) throw DomainError("classification needs at least three levels from 4 on");
  LinearFit f = fit_line(xs, ys);
  if (tau_min) *tau_min = lo;
  if (slope) *slope = f.slope;
  if (slope_se) *slope_se = f.slope_stderr;
  if (lo >= th.tau_floor) return Verdict::bounded;
  if (f.slope + th.slope_sigmas * f.slope_stderr < 0) return Verdict::degenerate;
  return Verdict::undecided;
}

DimensionEstimate estimate_dimension(const MapAnalysis& a, std::uint64_t seed, int random_intervals) {
  PrecisionScope scope(a.options().precision);
  const int n_max = a.options().n_max;
  auto parts = a.partitions(n_max);
  DimensionEstimate d;
  std::vector<double> xs, ys;
  for (const auto& P : parts) {
    d.cover.push_back(cover_exponent(P));
    if (P.level >= 2) {
      xs.push_back(P.level);
      ys.push_back(gap_statistics(P).min_gap.log_abs());
    }
  }
  d.gap_base = std::exp(fit_line(xs, ys).slope);
  MassMeasure mu(parts, a.cf());
  for (int n = 1; n <= mu.levels(); ++n) d.mass_conserved = d.mass_conserved && mu.total(n) == 1;
  d.mass_decay_bound = mu.decay_bound_holds();
  d.frostman = frostman_exponent(mu, parts, seed, random_intervals);
  return d;
}

std::vector<SweepRow> phase_transition_sweep(const std::vector<std::string>& exponents, const AnalysisOptions& base,
                                             const SweepThresholds& th, std::uint64_t seed, int threads) {
  auto one = [&](const std::string& l) {
    SweepRow row;
    row.exponent = l;
    try {
      PrecisionScope scope(base.precision);
      AnalysisOptions opts = base;
      opts.exponent = l;
      auto a = MapAnalysis::run(opts);
      for (int n = 2; n <= opts.n_max; ++n) {
        const auto& S = a->scalings().at(n);
        row.tau.push_back(S.tau ? S.tau->to_double() : 0.0);
      }
      row.verdict = classify(row.tau, th, &row.tau_min, &row.log_tau_slope, &row.log_tau_slope_se);
      DimensionEstimate d = estimate_dimension(*a, seed);
      for (const auto& c : d.cover) row.s_star.push_back(c.s_star);
      row.alpha_hat = d.frostman.alpha_hat;
      if (Real::parse(l, base.precision) > Real(2)) row.one_plus_alpha = 1.0 + row.alpha_hat;
    } catch (const Error& e) {
      row.error = e.what();
    }
    return row;
  };
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<SweepRow> rows(exponents.size());
  for (size_t start = 0; start < exponents.size(); start += static_cast<size_t>(threads)) {
    std::vector<std::future<SweepRow>> batch;
    const size_t end = std::min(exponents.size(), start + static_cast<size_t>(threads));
    for (size_t i = start; i < end; ++i) batch.push_back(std::async(std::launch::async, one, exponents[i]));
    for (size_t i = start; i < end; ++i) rows[i] = batch[i - start].get();
  }
  return rows;
}

CherryBound cherry_quasiminimal_dimension(double saddle_stable, double saddle_unstable, double alpha_hat) {
  if (!(saddle_unstable > 0) || !(saddle_stable > 0)) throw DomainError("saddle eigenvalue moduli must be positive");
  CherryBound b;
  b.saddle_ratio = saddle_stable / saddle_unstable;
  if (!(b.saddle_ratio > 2))
    throw DomainError("dimension bound needs |stable eigenvalue| > 2 x unstable eigenvalue (critical exponent > 2)");
  b.alpha_hat = alpha_hat;
  b.lower_bound = 1.0 + alpha_hat;
  b.exceeds_one = alpha_hat > 0;
  return b;
}

}  // namespace flatcircle
