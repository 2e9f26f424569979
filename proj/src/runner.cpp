#include "flatcircle/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "flatcircle/error.hpp"
#include "json.hpp"

namespace flatcircle {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

const char* const kVersion = "0.1.0";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(const Real& v) { return v.str(); }

std::string opt(const std::optional<Real>& v) { return v ? v->str() : std::string(); }

// Decimal text from a JSON string or number.
std::string decimal_text(const json& v, const char* key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ConfigError(std::string("'") + key + "' must be a decimal string or a number");
}

template <class T>
T integer(const json& v, const char* key) {
  try {
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<T>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      T out{};
      auto res = std::from_chars(s.data(), s.data() + s.size(), out);
      if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return out;
    }
  } catch (const json::exception&) {
  }
  throw ConfigError(std::string("'") + key + "' must be an integer");
}

double real_number(const json& v, const char* key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    double out = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return out;
  }
  throw ConfigError(std::string("'") + key + "' must be a number");
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c = {"tune",      "scalings", "partition", "distortion",
                                             "dimension", "sweep",    "cherry",    "verify"};
  return c;
}

RunStatus status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain:
    case ErrorKind::config: return RunStatus::config;
    case ErrorKind::precision: return RunStatus::precision;
    case ErrorKind::inconsistency: return RunStatus::invariant_failed;
    case ErrorKind::io: return RunStatus::other;
  }
  return RunStatus::other;
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::invariant_failed: return "invariant-failed";
    case RunStatus::config: return "config-error";
    case RunStatus::precision: return "precision-exhausted";
    case RunStatus::other: return "error";
  }
  return "error";
}

// State of one run: checks, results and artifacts, flushed into the manifest.
class Session {
 public:
  explicit Session(const RunConfig& cfg) : cfg_(cfg) {
    if (!cfg.out.empty()) {
      std::error_code ec;
      fs::create_directories(cfg.out, ec);
      if (ec) throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());
    }
  }

  const RunConfig& cfg() const { return cfg_; }
  json& results() { return results_; }

  void check(const std::string& name, bool pass, const std::string& detail) {
    checks_.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    lines_.push_back(std::string(pass ? "PASS " : "FAIL ") + name + ": " + detail);
    failed_ = failed_ || !pass;
  }
  void note(const std::string& line) { lines_.push_back(line); }

  void write(const std::string& name, const std::string& content) {
    if (cfg_.out.empty()) return;
    const fs::path p = fs::path(cfg_.out) / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f) throw IoError("cannot write " + p.string());
    artifacts_.push_back(name);
    lines_.push_back("wrote " + p.string());
  }

  bool failed() const { return failed_; }

  RunResult finish(RunStatus status, const std::string& error) {
    if (!error.empty()) lines_.push_back("ERROR " + error);
    json m;
    m["tool"] = "flatcircle";
    m["version"] = kVersion;
    m["command"] = cfg_.command;
    m["config"] = json::parse(cfg_.to_json());
    m["status"] = static_cast<int>(status);
    m["status_name"] = status_name(status);
    if (!error.empty()) m["error"] = error;
    m["checks"] = checks_;
    m["results"] = results_;
    m["artifacts"] = artifacts_;
    RunResult r{status, {}};
    if (!cfg_.out.empty()) {
      const fs::path p = fs::path(cfg_.out) / "manifest.json";
      std::ofstream f(p, std::ios::binary);
      f << m.dump(2) << '\n';
      if (!f && status == RunStatus::ok) {
        status = RunStatus::other;
        r.status = status;
        lines_.push_back("ERROR cannot write " + p.string());
      }
    }
    for (const auto& l : lines_) r.summary += l + '\n';
    return r;
  }

 private:
  const RunConfig& cfg_;
  json checks_ = json::array();
  json results_ = json::object();
  json artifacts_ = json::array();
  std::vector<std::string> lines_;
  bool failed_ = false;
};

AnalysisOptions analysis_options(const RunConfig& cfg) {
  AnalysisOptions o;
  o.flat_length = cfg.flat_length;
  o.exponent = cfg.exponent;
  o.target = RotationTarget::parse(cfg.target);
  o.precision = cfg.precision_bits;
  o.n_max = cfg.n_max;
  o.tune.tol_bits = cfg.tune_bits;
  o.tune.max_q = cfg.max_q;
  return o;
}

bool in_recursion_range(const Real& l) { return l > Real(1) && l <= Real(2); }

// ------------------------------------------------------------------- tune

void combinatorics_checks(Session& s, const FlatMap& m, const ContinuedFraction& cf, const RotationTarget& target) {
  const int d = cf.depth();
  const std::int64_t horizon = cf.q[static_cast<size_t>(d)];
  std::vector<std::int64_t> expected = {1};
  for (int k = 1; k <= d; ++k)
    if (cf.q[static_cast<size_t>(k)] != expected.back()) expected.push_back(cf.q[static_cast<size_t>(k)]);
  auto got = closest_return_times(m, CirclePoint(m.offset()), horizon);
  std::string shown;
  for (size_t i = 0; i < got.size() && i < 12; ++i) shown += (i ? "," : "") + std::to_string(got[i]);
  if (got.size() > 12) shown += ",...";
  s.check("closest returns are the convergent denominators", got == expected,
          shown + " up to " + std::to_string(horizon));
  s.results()["closest_returns"] = got;

  const std::int64_t count = d >= 2 ? cf.q[static_cast<size_t>(d - 1)] : 1;
  OrderCheck oc = order_isomorphism_check(m, target.value(m.precision()), count);
  s.check("orbit order matches the rotation", oc.pass,
          std::to_string(count) + " points" +
              (oc.pass ? std::string() : ", first mismatch at " + std::to_string(oc.first_mismatch)));
}

json tune_json(const RunConfig& cfg, const TuneResult& t) {
  json j;
  j["flat_length"] = cfg.flat_length;
  j["exponent"] = cfg.exponent;
  j["target"] = cfg.target;
  j["precision_bits"] = cfg.precision_bits;
  j["omega"] = num(t.map.offset());
  j["partial_quotients"] = t.cf.a;
  j["q_sequence"] = t.cf.q;
  j["certified_depth"] = t.certified_depth;
  j["bisection_steps"] = t.steps;
  j["window_resolved"] = t.window_resolved;
  return j;
}

void run_tune(Session& s) {
  const RunConfig& cfg = s.cfg();
  PrecisionScope scope(cfg.precision_bits);
  RotationTarget target = RotationTarget::parse(cfg.target);
  TuneOptions opts;
  opts.tol_bits = std::min(cfg.tune_bits, cfg.precision_bits - 32);
  opts.max_q = cfg.max_q;
  TuneResult t = tune_offset(Real::parse(cfg.flat_length), Real::parse(cfg.exponent), target, opts);
  s.results()["tune"] = tune_json(cfg, t);
  s.note("omega " + t.map.offset().str(40));
  s.note("certified depth " + std::to_string(t.certified_depth));
  combinatorics_checks(s, t.map, t.cf, target);
  json j = tune_json(cfg, t);
  j["closest_returns"] = s.results()["closest_returns"];
  s.write("tune.json", j.dump(2) + "\n");
}

// -------------------------------------------------------------- partition

void partition_checks(Session& s, const MapAnalysis& a, bool write) {
  const int n_max = a.options().n_max;
  bool counts = true;
  for (int n = 1; n <= n_max; ++n) {
    const auto& P = a.partition(n);
    counts = counts && static_cast<std::int64_t>(P.long_count()) == P.qn1 &&
             static_cast<std::int64_t>(P.short_count()) == P.qn;
    if (write) {
      char name[32];
      std::snprintf(name, sizeof name, "partition_level_%02d.csv", n);
      s.write(name, P.to_csv());
    }
  }
  s.check("partitions tile the circle", true, "levels 1.." + std::to_string(n_max + 1) + " built and checked");
  s.check("gap counts", counts, "q_{n+1} long and q_n short gaps at levels 1.." + std::to_string(n_max));

  bool refine = true;
  int max_split = 0;
  std::string where;
  for (int n = 1; n <= n_max; ++n) {
    RefinementReport r = refine_check(a.partition(n), a.partition(n + 1), a.cf());
    max_split = std::max(max_split, r.max_gap_split);
    if (!r.pass && refine) where = ", level " + std::to_string(n) + ": " + r.detail;
    refine = refine && r.pass;
  }
  s.check("refinement follows the partial quotients", refine, "max gaps per gap " + std::to_string(max_split) + where);

  bool split = true;
  json rows = json::array();
  for (int n = 1; n + 2 <= n_max + 1; ++n) {
    SplitReport r = two_level_split(a.partition(n), a.partition(n + 2), a.cf());
    split = split && r.pass;
    rows.push_back({{"level", n}, {"max_split", r.max_split}, {"bound", r.bound}});
  }
  s.check("two-level split bound", split, "levels 1.." + std::to_string(n_max - 1));
  s.results()["two_level_split"] = rows;

  json stats = json::array();
  for (int n = 1; n <= n_max; ++n) {
    GapStatistics g = gap_statistics(a.partition(n));
    stats.push_back({{"level", n}, {"max_gap", num(g.max_gap)}, {"min_gap", num(g.min_gap)},
                     {"max_preimage", num(g.max_preimage)}});
  }
  s.results()["gap_statistics"] = stats;
}

// --------------------------------------------------------------- scalings

void scalings_checks(Session& s, const MapAnalysis& a) {
  const int n_max = a.options().n_max;
  const ScalingSeries& S = a.scalings();
  const Real l = a.map().exponent();
  const bool recursion = in_recursion_range(l);
  std::optional<RecursionCheck> rec;
  if (recursion) rec = scaling_recursion_check(a.geometry(), S, n_max);

  std::ostringstream csv;
  csv << "level,tau,alpha,sigma,s,alpha_gt_tau,x,m_tilde,lhs,rhs,recursion_pass\n";
  std::vector<int> alpha_fail;
  bool chained = true;
  const Real tol = Real::pow2(-static_cast<long>(a.options().precision) + 32);
  for (int n = 1; n <= n_max; ++n) {
    const LevelScalings& L = S.at(n);
    auto ex = L.alpha_exceeds_tau();
    if (ex && !*ex) alpha_fail.push_back(n);
    if (n >= 3 && L.tau && L.sigma && S.at(n - 1).sigma)
      chained = chained && abs(*L.tau - *L.sigma * *S.at(n - 1).sigma) <= tol;
    csv << n << ',' << opt(L.tau) << ',' << opt(L.alpha) << ',' << opt(L.sigma) << ',' << opt(L.s) << ','
        << (ex ? (*ex ? "1" : "0") : "");
    const RecursionLevel* R = nullptr;
    if (rec)
      for (const auto& r : rec->levels)
        if (r.level == n) R = &r;
    if (R && R->computable)
      csv << ',' << num(R->x) << ',' << opt(R->m_tilde) << ',' << opt(R->lhs) << ',' << opt(R->rhs) << ','
          << (R->pass ? (*R->pass ? "1" : "0") : "");
    else
      csv << ",,,,,";
    csv << '\n';
  }
  s.write("scalings.csv", csv.str());

  std::string fails;
  for (int n : alpha_fail) fails += (fails.empty() ? "" : ",") + std::to_string(n);
  s.check("alpha_n > tau_n at every level", alpha_fail.empty(),
          alpha_fail.empty() ? "levels 2.." + std::to_string(n_max) : "fails at n=" + fails);
  s.check("tau_n = sigma_n sigma_{n-1}", chained, "within 2^-(P-32)");

  std::vector<double> tau;
  for (int n = 2; n <= n_max; ++n) tau.push_back(S.at(n).tau ? S.at(n).tau->to_double() : 0.0);
  if (n_max >= 6) {
    double tmin = 0, slope = 0, se = 0;
    Verdict v = classify(tau, s.cfg().thresholds, &tmin, &slope, &se);
    s.results()["tau_trend"] = {{"verdict", verdict_name(v)}, {"tau_min", num(tmin)}, {"log_slope", num(slope)},
                                {"log_slope_stderr", num(se)}};
  }

  if (rec) {
    bool pass = true, xb = true, power = true;
    int checked = 0;
    std::string worst;
    for (const auto& r : rec->levels) {
      if (!r.computable || r.level < 6) continue;
      ++checked;
      if (r.pass && !*r.pass) pass = false, worst += " n=" + std::to_string(r.level);
      if (!r.x_within_bound) xb = false;
      if (!r.power_holds) power = false;
    }
    double xmax = 0;
    for (const auto& r : rec->levels)
      if (r.computable && r.level >= 6) xmax = std::max(xmax, r.x);
    s.check("recursion inequality", checked > 0 && pass,
            std::to_string(checked) + " computable levels from n=6" + (worst.empty() ? "" : ", fails at" + worst));
    s.check("recursion a-priori bound x <= 0.55", checked > 0 && xb, "max x " + num(xmax));
    if (l >= Real(2)) s.check("power inequality at the mu step", power, "levels from n=6");

    DisjointnessReport d = disjointness_sum_check(a.geometry(), a.partitions(n_max));
    s.check("disjoint pullbacks", d.overlaps == 0 && d.containment_failures == 0,
            std::to_string(d.overlaps) + " overlaps, " + std::to_string(d.containment_failures) +
                " containment failures");
    s.check("pullback sums decay", d.lambda_hat < 1,
            "fitted rate " + num(d.lambda_hat) + ", R^2 " + num(d.r_squared));
    json lv = json::array();
    for (const auto& r : rec->levels)
      lv.push_back({{"level", r.level},
                    {"computable", r.computable},
                    {"x", num(r.x)},
                    {"nu", r.computable ? num(r.nu) : ""},
                    {"mu", r.computable ? num(r.mu) : ""},
                    {"t_factor", num(r.t_factor)},
                    {"note", r.note}});
    s.results()["recursion"] = lv;
    s.results()["disjointness"] = {{"lambda_hat", num(d.lambda_hat)}, {"r_squared", num(d.r_squared)}};
  } else {
    s.note("recursion check skipped: needs 1 < l <= 2");
  }

  if (l > Real(2)) {
    ComparabilityReport c = comparability_report(a.geometry(), a.partitions(n_max), S);
    std::ostringstream cc;
    cc << "level,adjacent_min,adjacent_max,flat_neighbours,preimage_to_gap_min,preimage_to_gap_max,"
          "gap_over_alpha_min,gap_over_alpha_max\n";
    auto range = [](const RatioRange& r) { return r.empty ? std::string(",") : num(r.min) + "," + num(r.max); };
    for (const auto& L : c.levels)
      cc << L.level << ',' << range(L.adjacent_gaps) << ',' << (L.flat_neighbours ? num(*L.flat_neighbours) : "")
         << ',' << range(L.preimage_to_gap) << ',' << range(L.gap_over_alpha) << '\n';
    s.write("comparability.csv", cc.str());
    s.note("comparability (levels >= 4): adjacent gaps " + range(c.adjacent_gaps) + ", flat neighbours " +
           range(c.flat_neighbours));
  } else {
    s.note("comparability report skipped: needs l > 2");
  }
}

// ------------------------------------------------------------- distortion

void distortion_checks(Session& s, const MapAnalysis& a) {
  const RunConfig& cfg = s.cfg();
  CrossRatioReport cr = cross_ratio_expansion_check(a.map(), cfg.cross_ratio_samples, cfg.seed);
  s.check("cross-ratio expansion", cr.contractions == 0,
          std::to_string(cr.contractions) + " contractions in " + std::to_string(cr.samples) +
              " quadruples, min factor " + num(cr.min_factor));
  SchwarzianReport sw = schwarzian_sign_check(a.map(), cfg.schwarzian_samples, cfg.seed);
  s.check("negative Schwarzian", sw.nonnegative == 0,
          std::to_string(sw.nonnegative) + " of " + std::to_string(sw.samples) + " samples nonnegative, max " +
              num(sw.max_value));
  KoebeReport k = koebe_distortion_report(a.geometry(), a.options().n_max);
  std::ostringstream csv;
  csv << "level,family,iterate,min_ratio\n";
  for (const auto& r : k.rows) csv << r.level << ',' << r.family << ',' << r.iterate << ',' << num(r.min_ratio) << '\n';
  s.write("koebe.csv", csv.str());
  s.check("bounded ratio distortion", k.constant > 0, "constant " + num(k.constant));
  s.results()["distortion"] = {{"cross_ratio_min_factor", num(cr.min_factor)},
                               {"cross_ratio_max_deviation", num(cr.max_deviation)},
                               {"schwarzian_max", num(sw.max_value)},
                               {"koebe_constant", num(k.constant)}};
}

// -------------------------------------------------------------- dimension

DimensionEstimate dimension_checks(Session& s, const MapAnalysis& a) {
  const RunConfig& cfg = s.cfg();
  const int n_max = a.options().n_max;
  const Real l = a.map().exponent();
  DimensionEstimate d = estimate_dimension(a, cfg.seed, cfg.random_intervals);
  std::ostringstream csv;
  csv << "level,s_star,cover_sum_at_0.5\n";
  for (const auto& c : d.cover) {
    double half = 0;
    for (const auto& [sv, sum] : c.probes)
      if (std::fabs(sv - 0.5) < 1e-9) half = sum;
    csv << c.level << ',' << num(c.s_star) << ',' << num(half) << '\n';
  }
  s.write("dimension.csv", csv.str());
  const double s_last = d.cover.back().s_star;
  json j = {{"alpha_hat", num(d.frostman.alpha_hat)},
            {"alpha_level", d.frostman.alpha_level},
            {"c_hat", num(d.frostman.c_hat)},
            {"test_intervals", d.frostman.intervals},
            {"gap_base", num(d.gap_base)},
            {"s_star_last", num(s_last)}};
  s.results()["dimension"] = j;
  s.write("dimension.json", j.dump(2) + "\n");

  s.check("mass conserved", d.mass_conserved, "exact rational total 1 at levels 1.." + std::to_string(n_max));
  s.check("mass decay bound", d.mass_decay_bound, "mu(G)^2 2^g <= 1 for every gap");
  if (l > Real(2)) {
    s.check("Frostman exponent positive", d.frostman.alpha_hat > 0, "alpha_hat " + num(d.frostman.alpha_hat));
    s.check("lower bound below upper estimate", d.frostman.alpha_hat <= s_last + 0.05,
            num(d.frostman.alpha_hat) + " <= " + num(s_last) + " + 0.05");
  } else {
    bool dec = true;
    for (size_t k = 4; k < d.cover.size(); ++k) dec = dec && d.cover[k].s_star < d.cover[k - 1].s_star;
    s.check("cover exponent decreasing from level 4", dec,
            num(d.cover[std::min<size_t>(3, d.cover.size() - 1)].s_star) + " -> " + num(s_last));
    SoleSplitReport ss = sole_split_check(a.partitions(n_max), a.scalings());
    s.check("every gap splits over two levels", ss.every_gap_splits,
            "ratio/alpha constant " + num(ss.c_hat) + ", alpha rate " + num(ss.alpha_rate));
  }
  return d;
}

// ------------------------------------------------------------------ sweep

void run_sweep(Session& s) {
  const RunConfig& cfg = s.cfg();
  AnalysisOptions base = analysis_options(cfg);
  auto rows = phase_transition_sweep(cfg.exponent_grid, base, cfg.thresholds, cfg.seed, cfg.threads);
  std::ostringstream csv;
  csv << "l,verdict,tau_min,log_tau_slope,log_tau_slope_stderr,alpha_hat,one_plus_alpha";
  for (int n = 1; n <= cfg.n_max; ++n) csv << ",s_star_" << n;
  csv << ",error\n";
  json out = json::array();
  int errors = 0;
  for (const auto& r : rows) {
    const bool ok = r.error.empty();
    errors += !ok;
    csv << r.exponent << ',' << (ok ? verdict_name(r.verdict) : "error") << ',' << (ok ? num(r.tau_min) : "") << ','
        << (ok ? num(r.log_tau_slope) : "") << ',' << (ok ? num(r.log_tau_slope_se) : "") << ','
        << (ok ? num(r.alpha_hat) : "") << ',' << (r.one_plus_alpha ? num(*r.one_plus_alpha) : "");
    for (int n = 1; n <= cfg.n_max; ++n)
      csv << ',' << (static_cast<size_t>(n) <= r.s_star.size() ? num(r.s_star[static_cast<size_t>(n - 1)]) : "");
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    csv << ',' << err << '\n';
    out.push_back({{"l", r.exponent}, {"verdict", ok ? verdict_name(r.verdict) : "error"}, {"error", r.error}});
    s.note("l=" + r.exponent + " " + (ok ? std::string(verdict_name(r.verdict)) + " tau_min " + num(r.tau_min) +
                                               " alpha_hat " + num(r.alpha_hat)
                                         : "error: " + r.error));
  }
  s.write("sweep.csv", csv.str());
  s.results()["sweep"] = out;
  s.check("sweep rows computed", errors == 0, std::to_string(rows.size() - errors) + " of " +
                                                  std::to_string(rows.size()) + " grid points");
}

// ----------------------------------------------------------------- cherry

void run_cherry(Session& s) {
  const RunConfig& cfg = s.cfg();
  PrecisionScope scope(cfg.precision_bits);
  if (!(Real::parse(cfg.exponent) > Real(2)))
    throw DomainError("Cherry flow bound needs l = |lambda_2|/lambda_1 > 2, got l = " + cfg.exponent);
  auto a = MapAnalysis::run(analysis_options(cfg));
  DimensionEstimate d = estimate_dimension(*a, cfg.seed, cfg.random_intervals);
  CherryBound b = cherry_quasiminimal_dimension(Real::parse(cfg.exponent).to_double(), 1.0, d.frostman.alpha_hat);
  json j = {{"saddle_ratio", cfg.exponent},
            {"alpha_hat", num(b.alpha_hat)},
            {"transversal_dimension", "1"},
            {"lower_bound", num(b.lower_bound)},
            {"exceeds_one", b.exceeds_one}};
  s.results()["cherry"] = j;
  s.write("cherry.json", j.dump(2) + "\n");
  s.check("quasiminimal set dimension above 1", b.exceeds_one, "HD(Q) >= 1 + " + num(b.alpha_hat));
}

void run_analysis_command(Session& s) {
  const RunConfig& cfg = s.cfg();
  auto a = MapAnalysis::run(analysis_options(cfg));
  PrecisionScope scope(cfg.precision_bits);
  s.results()["tune"] = tune_json(cfg, a->tuned());
  const std::string& c = cfg.command;
  if (c == "partition") {
    partition_checks(s, *a, true);
  } else if (c == "scalings") {
    scalings_checks(s, *a);
  } else if (c == "distortion") {
    distortion_checks(s, *a);
  } else if (c == "dimension") {
    dimension_checks(s, *a);
  } else if (c == "verify") {
    combinatorics_checks(s, a->map(), a->cf(), analysis_options(cfg).target);
    partition_checks(s, *a, false);
    scalings_checks(s, *a);
    distortion_checks(s, *a);
    dimension_checks(s, *a);
  }
}

}  // namespace

// ----------------------------------------------------------------- config

RunConfig RunConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "command") {
      if (!v.is_string()) throw ConfigError("'command' must be a string");
      c.command = v.get<std::string>();
    } else if (k == "l") {
      c.exponent = decimal_text(v, "l");
    } else if (k == "l_grid") {
      if (!v.is_array() || v.empty()) throw ConfigError("'l_grid' must be a non-empty array");
      c.exponent_grid.clear();
      for (const auto& e : v) c.exponent_grid.push_back(decimal_text(e, "l_grid"));
    } else if (k == "u") {
      c.flat_length = decimal_text(v, "u");
    } else if (k == "target") {
      if (!v.is_string()) throw ConfigError("'target' must be a string");
      c.target = v.get<std::string>();
    } else if (k == "precision_bits") {
      c.precision_bits = integer<unsigned>(v, "precision_bits");
    } else if (k == "n_max") {
      c.n_max = integer<int>(v, "n_max");
    } else if (k == "seed") {
      c.seed = integer<std::uint64_t>(v, "seed");
    } else if (k == "out") {
      if (!v.is_string()) throw ConfigError("'out' must be a string");
      c.out = v.get<std::string>();
    } else if (k == "tune_bits") {
      c.tune_bits = integer<unsigned>(v, "tune_bits");
    } else if (k == "max_q") {
      c.max_q = integer<std::int64_t>(v, "max_q");
    } else if (k == "tau_floor") {
      c.thresholds.tau_floor = real_number(v, "tau_floor");
    } else if (k == "slope_sigmas") {
      c.thresholds.slope_sigmas = real_number(v, "slope_sigmas");
    } else if (k == "threads") {
      c.threads = integer<int>(v, "threads");
    } else if (k == "cross_ratio_samples") {
      c.cross_ratio_samples = integer<int>(v, "cross_ratio_samples");
    } else if (k == "schwarzian_samples") {
      c.schwarzian_samples = integer<int>(v, "schwarzian_samples");
    } else if (k == "random_intervals") {
      c.random_intervals = integer<int>(v, "random_intervals");
    } else {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  return c;
}

std::string RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["l"] = exponent;
  j["l_grid"] = exponent_grid;
  j["u"] = flat_length;
  j["target"] = target;
  j["precision_bits"] = precision_bits;
  j["n_max"] = n_max;
  j["seed"] = seed;
  j["out"] = out;
  j["tune_bits"] = tune_bits;
  j["max_q"] = max_q;
  j["tau_floor"] = num(thresholds.tau_floor);
  j["slope_sigmas"] = num(thresholds.slope_sigmas);
  j["threads"] = threads;
  j["cross_ratio_samples"] = cross_ratio_samples;
  j["schwarzian_samples"] = schwarzian_samples;
  j["random_intervals"] = random_intervals;
  return j.dump();
}

void RunConfig::validate() const {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    throw ConfigError("unknown command '" + command + "'");
  if (precision_bits < 64 || precision_bits > (1u << 20))
    throw ConfigError("precision_bits must lie in [64, 2^20]");
  PrecisionScope scope(precision_bits);
  const Real l = Real::parse(exponent);
  if (l < Real(1)) throw ConfigError("l = " + exponent + " is below 1: the non-dissipative case is out of scope");
  const Real u = Real::parse(flat_length);
  if (u.sign() < 0 || u >= Real(1)) throw ConfigError("u must lie in [0, 1)");
  if (u.is_zero() && command != "tune") throw ConfigError("u = 0 is only accepted by the tune command");
  for (const auto& g : exponent_grid)
    if (!(Real::parse(g) > Real(1))) throw ConfigError("sweep exponents must exceed 1, got " + g);
  RotationTarget::parse(target);
  if (n_max < 2 || n_max > 40) throw ConfigError("n_max must lie in [2, 40]");
  if ((command == "dimension" || command == "sweep" || command == "verify" || command == "cherry") && n_max < 6)
    throw ConfigError("n_max must be at least 6 for trend and dimension estimates");
  if (tune_bits < 16) throw ConfigError("tune_bits must be at least 16");
  if (max_q < 2) throw ConfigError("max_q must be at least 2");
  if (cross_ratio_samples < 1 || schwarzian_samples < 1 || random_intervals < 0)
    throw ConfigError("sample counts must be positive");
  if (!(thresholds.tau_floor > 0) || !(thresholds.slope_sigmas >= 0))
    throw ConfigError("tau_floor must be positive and slope_sigmas non-negative");
}

// -------------------------------------------------------------------- run

RunResult run(const RunConfig& cfg) {
  std::optional<Session> s;
  try {
    s.emplace(cfg);
  } catch (const Error& e) {
    return RunResult{RunStatus::other, std::string("ERROR ") + e.what() + "\n"};
  }
  try {
    cfg.validate();
    if (cfg.command == "tune")
      run_tune(*s);
    else if (cfg.command == "sweep")
      run_sweep(*s);
    else if (cfg.command == "cherry")
      run_cherry(*s);
    else
      run_analysis_command(*s);
  } catch (const Error& e) {
    return s->finish(status_of(e.kind()), e.what());
  } catch (const std::exception& e) {
    return s->finish(RunStatus::other, e.what());
  }
  return s->finish(s->failed() ? RunStatus::invariant_failed : RunStatus::ok, "");
}

}  // namespace flatcircle
