// Acceptance suite. Drives the command line tool, reads back its artifacts and
// prints one line per criterion: "criterion N: PASS|FAIL <detail>".
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flatcircle/dimension.hpp"
#include "flatcircle/real.hpp"
#include "flatcircle/stats.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using flatcircle::PrecisionScope;
using flatcircle::Real;

namespace {

// Pinned tolerances and limits.
constexpr unsigned kTunePrecision = 256;
constexpr double kTuneSecondsPerMap = 60;
constexpr int kOrderPoints = 144;
constexpr int kLevels = 10;
constexpr double kTauFloor = 0.15;
constexpr double kPhaseSeconds = 600;
constexpr double kCantorTolerance = 0.01;
constexpr double kAlphaStability = 0.20;
constexpr double kSandwichSlack = 0.05;
constexpr int kCrossRatioSamples = 10000;
constexpr int kSchwarzianSamples = 1000;
constexpr double kRecursionXBound = 0.55;
constexpr std::int64_t kSplitBoundGolden = 3;  // a_n (a_{n+1} + 1) + 1 with every a = 1

std::string g_cli;
fs::path g_work;

struct Outcome {
  int code = -1;
  std::string output;
  double seconds = 0;
};

Outcome cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" -q " + args + " 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) o.output.append(buf, n);
  const int st = pclose(pipe);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(slurp(p));
  } catch (const json::exception&) {
    return json();
  }
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int col(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv read_csv(const fs::path& p) {
  Csv c;
  std::istringstream in(slurp(p));
  std::string line;
  if (std::getline(in, line)) c.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) c.rows.push_back(split(line));
  return c;
}

const json* find_check(const json& manifest, const std::string& name) {
  if (!manifest.contains("checks")) return nullptr;
  for (const auto& c : manifest["checks"])
    if (c["name"] == name) return &c;
  return nullptr;
}

// Collects failures of one criterion.
class Verdict {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& what) { notes_.push_back(what); }
  // A named check from a manifest must exist and pass.
  void manifest_check(const json& m, const std::string& name, const std::string& context) {
    const json* c = find_check(m, name);
    if (!c) return expect(false, context + ": no '" + name + "' check");
    expect((*c)["pass"].get<bool>(), context + ": " + name + " (" + (*c)["detail"].get<std::string>() + ")");
  }
  bool pass() const { return failures_.empty(); }
  std::string detail() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    if (failures_.empty())
      for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return s;
  }

 private:
  std::vector<std::string> failures_, notes_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

fs::path fresh(const std::string& name) {
  fs::path p = g_work / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ------------------------------------------------------------------------

Verdict criterion_tuning() {
  Verdict v;
  const std::vector<std::int64_t> want = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  for (const char* l : {"1.5", "2", "3"}) {
    fs::path dir = fresh(std::string("c1_l") + l);
    Outcome o = cli("tune --l " + std::string(l) + " --precision-bits " + std::to_string(kTunePrecision) +
                    " --out " + dir.string());
    const std::string ctx = std::string("l=") + l;
    v.expect(o.code == 0, ctx + ": exit " + std::to_string(o.code));
    v.expect(o.seconds <= kTuneSecondsPerMap, ctx + ": took " + fmt(o.seconds) + " s");
    json t = read_json(dir / "tune.json");
    std::vector<std::int64_t> got;
    if (t.contains("closest_returns"))
      for (const auto& x : t["closest_returns"])
        if (x.get<std::int64_t>() <= 89) got.push_back(x.get<std::int64_t>());
    v.expect(got == want, ctx + ": closest returns up to 89 differ");
    json m = read_json(dir / "manifest.json");
    v.manifest_check(m, "orbit order matches the rotation", ctx);
    if (const json* c = find_check(m, "orbit order matches the rotation")) {
      const std::int64_t points = std::stoll((*c)["detail"].get<std::string>());
      v.expect(points >= kOrderPoints, ctx + ": order checked on only " + std::to_string(points) + " points");
    }
    v.note(ctx + " " + fmt(std::round(o.seconds * 100) / 100) + " s");
  }
  return v;
}

Verdict criterion_partitions() {
  Verdict v;
  PrecisionScope scope(512);
  for (const char* l : {"2", "3"}) {
    fs::path dir = fresh(std::string("c2_l") + l);
    Outcome o = cli("partition --l " + std::string(l) + " --n-max " + std::to_string(kLevels) + " --out " +
                    dir.string());
    const std::string ctx = std::string("l=") + l;
    v.expect(o.code == 0, ctx + ": exit " + std::to_string(o.code));
    json m = read_json(dir / "manifest.json");
    for (const char* name : {"partitions tile the circle", "gap counts", "refinement follows the partial quotients",
                             "two-level split bound"})
      v.manifest_check(m, name, ctx);

    // Independent reading of the written levels.
    const Real tol = Real::pow2(-(512 - 32));
    std::int64_t q0 = 1, q1 = 2;  // q_1, q_2 for the golden mean
    for (int n = 1; n <= kLevels; ++n) {
      char name[32];
      std::snprintf(name, sizeof name, "partition_level_%02d.csv", n);
      Csv c = read_csv(dir / name);
      Real total(0);
      std::int64_t lng = 0, shrt = 0;
      for (const auto& r : c.rows) {
        total += Real::parse(r.at(3));
        lng += r.at(0) == "long";
        shrt += r.at(0) == "short";
      }
      v.expect(abs(total - Real(1)) <= tol, ctx + ": level " + std::to_string(n) + " does not tile");
      v.expect(lng == q1 && shrt == q0, ctx + ": level " + std::to_string(n) + " has " + std::to_string(lng) +
                                            " long and " + std::to_string(shrt) + " short gaps");
      const std::int64_t next = q0 + q1;
      q0 = q1;
      q1 = next;
    }
    if (m.contains("results"))
      for (const auto& r : m["results"]["two_level_split"])
        v.expect(r["max_split"].get<std::int64_t>() <= kSplitBoundGolden,
                 ctx + ": two-level split " + r["max_split"].dump() + " at level " + r["level"].dump());
    v.note(ctx + " levels 1.." + std::to_string(kLevels) + " tile, count and refine");
  }
  return v;
}

std::vector<double> tau_column(const Csv& c) {
  std::vector<double> tau(kLevels + 1, std::nan(""));
  const int lc = c.col("level"), tc = c.col("tau");
  for (const auto& r : c.rows) {
    const int n = std::stoi(r.at(lc));
    if (n <= kLevels && !r.at(tc).empty()) tau[n] = flatcircle::Real::parse(r.at(tc)).to_double();
  }
  return tau;
}

Verdict criterion_phase_transition() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> alpha_failures_total;
  for (const char* l : {"1.5", "2", "3", "4"}) {
    fs::path dir = fresh(std::string("c3_l") + l);
    Outcome o = cli("scalings --l " + std::string(l) + " --n-max " + std::to_string(kLevels) + " --out " +
                    dir.string());
    const std::string ctx = std::string("l=") + l;
    v.expect(o.code == 0 || o.code == 1, ctx + ": exit " + std::to_string(o.code));
    Csv c = read_csv(dir / "scalings.csv");
    std::vector<double> tau = tau_column(c);
    const double lv = std::stod(l);
    if (lv <= 2) {
      for (int n = 6; n <= kLevels; ++n)
        v.expect(tau[n] / tau[n - 2] < 1, ctx + ": tau_" + std::to_string(n) + "/tau_" + std::to_string(n - 2) +
                                              " = " + fmt(tau[n] / tau[n - 2]));
      std::vector<double> xs, ys;
      for (int n = 2; n <= kLevels; ++n) xs.push_back(n), ys.push_back(std::log(tau[n]));
      const double slope = flatcircle::fit_line(xs, ys).slope;
      v.expect(slope < 0, ctx + ": log tau slope " + fmt(slope));
      v.note(ctx + " log tau slope " + fmt(slope));
    } else {
      double lo = 1e300;
      for (int n = 4; n <= kLevels; ++n) lo = std::min(lo, tau[n]);
      v.expect(lo >= kTauFloor, ctx + ": min tau " + fmt(lo) + " below floor " + fmt(kTauFloor));
      v.note(ctx + " min tau " + fmt(lo));
    }
    std::string bad;
    const int ac = c.col("alpha_gt_tau");
    for (const auto& r : c.rows)
      if (r.at(ac) == "0") bad += (bad.empty() ? "" : ",") + r.at(0);
    v.expect(bad.empty(), ctx + ": alpha_n > tau_n fails at n=" + bad);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.expect(secs <= kPhaseSeconds, "took " + fmt(secs) + " s");
  return v;
}

std::vector<double> s_star_column(const fs::path& p) {
  Csv c = read_csv(p);
  std::vector<double> s(kLevels + 1, std::nan(""));
  for (const auto& r : c.rows) {
    const int n = std::stoi(r.at(0));
    if (n <= kLevels) s[n] = std::stod(r.at(1));
  }
  return s;
}

Verdict criterion_upper_bound() {
  Verdict v;
  fs::path dir = fresh("c4");
  Outcome o = cli("dimension --l 1.5 --n-max " + std::to_string(kLevels) + " --out " + dir.string());
  v.expect(o.code == 0, "l=1.5: exit " + std::to_string(o.code));
  std::vector<double> s = s_star_column(dir / "dimension.csv");
  for (int n = 5; n <= kLevels; ++n)
    v.expect(s[n] < s[n - 1], "s* not decreasing at n=" + std::to_string(n));
  v.expect(s[kLevels] < s[4] / 2, "s*(10) = " + fmt(s[kLevels]) + " not below s*(4)/2 = " + fmt(s[4] / 2));
  v.note("s*(4) " + fmt(s[4]) + ", s*(10) " + fmt(s[kLevels]));

  // Middle-thirds Cantor set: 2^k intervals of length 3^-k.
  const int depth = 10;
  std::vector<double> logs(1u << depth, -depth * std::log(3.0));
  const double cantor = flatcircle::cover_exponent(logs);
  const double want = std::log(2.0) / std::log(3.0);
  v.expect(std::fabs(cantor - want) <= kCantorTolerance, "Cantor estimate " + fmt(cantor));
  v.note("Cantor " + fmt(cantor));
  return v;
}

Verdict criterion_lower_bound() {
  Verdict v;
  std::map<int, double> alpha;
  double s_last = 0;
  for (int n_max : {8, 10}) {
    fs::path dir = fresh("c5_n" + std::to_string(n_max));
    Outcome o = cli("dimension --l 3 --n-max " + std::to_string(n_max) + " --out " + dir.string());
    const std::string ctx = "n_max=" + std::to_string(n_max);
    v.expect(o.code == 0, ctx + ": exit " + std::to_string(o.code));
    json m = read_json(dir / "manifest.json");
    v.manifest_check(m, "mass conserved", ctx);
    v.manifest_check(m, "mass decay bound", ctx);
    json d = read_json(dir / "dimension.json");
    alpha[n_max] = d.contains("alpha_hat") ? std::stod(d["alpha_hat"].get<std::string>()) : 0.0;
    if (n_max == 10) s_last = d.contains("s_star_last") ? std::stod(d["s_star_last"].get<std::string>()) : 0.0;
  }
  v.expect(alpha[10] > 0, "alpha_hat " + fmt(alpha[10]));
  const double drift = std::fabs(alpha[8] - alpha[10]) / alpha[10];
  v.expect(drift <= kAlphaStability, "alpha_hat moves by " + fmt(drift * 100) + "% between n_max 8 and 10");
  v.expect(alpha[10] <= s_last + kSandwichSlack, "alpha_hat " + fmt(alpha[10]) + " above s* " + fmt(s_last) + " + " +
                                                     fmt(kSandwichSlack));
  v.note("alpha_hat " + fmt(alpha[10]) + ", s*(10) " + fmt(s_last));
  return v;
}

Verdict criterion_distortion() {
  Verdict v;
  for (const char* l : {"1.5", "2", "3"}) {
    fs::path dir = fresh(std::string("c6_l") + l);
    Outcome o = cli("distortion --l " + std::string(l) + " --n-max 8 --out " + dir.string());
    const std::string ctx = std::string("l=") + l;
    v.expect(o.code == 0, ctx + ": exit " + std::to_string(o.code));
    json m = read_json(dir / "manifest.json");
    v.manifest_check(m, "cross-ratio expansion", ctx);
    v.manifest_check(m, "negative Schwarzian", ctx);
    const json cfg = m.contains("config") ? m["config"] : json::object();
    v.expect(cfg.value("cross_ratio_samples", 0) >= kCrossRatioSamples, ctx + ": too few quadruples");
    v.expect(cfg.value("schwarzian_samples", 0) >= kSchwarzianSamples, ctx + ": too few Schwarzian samples");
    if (const json* c = find_check(m, "cross-ratio expansion")) v.note(ctx + " " + (*c)["detail"].get<std::string>());
  }
  return v;
}

Verdict criterion_recursion() {
  Verdict v;
  fs::path dir = fresh("c7");
  Outcome o = cli("scalings --l 2 --n-max " + std::to_string(kLevels) + " --out " + dir.string());
  v.expect(o.code == 0 || o.code == 1, "exit " + std::to_string(o.code));
  json m = read_json(dir / "manifest.json");
  for (const char* name : {"recursion inequality", "recursion a-priori bound x <= 0.55", "disjoint pullbacks",
                           "pullback sums decay"})
    v.manifest_check(m, name, "l=2");
  Csv c = read_csv(dir / "scalings.csv");
  const int xc = c.col("x"), pc = c.col("recursion_pass");
  int computable = 0;
  for (const auto& r : c.rows) {
    const int n = std::stoi(r.at(0));
    if (n < 6 || r.at(pc).empty()) continue;
    ++computable;
    v.expect(r.at(pc) == "1", "recursion fails at n=" + std::to_string(n));
    v.expect(std::stod(r.at(xc)) <= kRecursionXBound, "x = " + r.at(xc) + " at n=" + std::to_string(n));
  }
  v.expect(computable > 0, "no computable level from n=6");
  v.note(std::to_string(computable) + " computable levels");
  return v;
}

Verdict criterion_cherry() {
  Verdict v;
  fs::path dir = fresh("c8");
  Outcome o = cli("cherry --l 3 --out " + dir.string());
  v.expect(o.code == 0, "l=3: exit " + std::to_string(o.code));
  json c = read_json(dir / "cherry.json");
  const double bound = c.contains("lower_bound") ? std::stod(c["lower_bound"].get<std::string>()) : 0.0;
  v.expect(bound > 1, "1 + alpha_hat = " + fmt(bound));
  v.expect(c.value("exceeds_one", false), "report does not assert a bound above 1");
  for (const char* l : {"2", "1.5"}) {
    Outcome r = cli(std::string("cherry --l ") + l);
    v.expect(r.code == 2, std::string("l=") + l + " not rejected (exit " + std::to_string(r.code) + ")");
  }
  v.note("1 + alpha_hat = " + fmt(bound));
  return v;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

Verdict criterion_determinism() {
  Verdict v;
  const std::vector<std::string> runs = {"tune --l 2",
                                         "partition --l 3 --n-max 8",
                                         "scalings --l 2 --n-max 8",
                                         "distortion --l 3 --n-max 8",
                                         "dimension --l 3 --n-max 8 --seed 7",
                                         "cherry --l 3 --n-max 8",
                                         "sweep --l-grid 2,3 --n-max 8"};
  for (const auto& args : runs) {
    // Same output directory both times, so the manifests can match byte for byte.
    fs::path dir = g_work / "c9";
    std::map<std::string, std::string> first;
    for (int pass = 0; pass < 2; ++pass) {
      fs::remove_all(dir);
      fs::create_directories(dir);
      Outcome o = cli(args + " --out " + dir.string());
      v.expect(o.code == 0 || o.code == 1, args + ": exit " + std::to_string(o.code));
      auto files = snapshot(dir);
      if (pass == 0) {
        first = std::move(files);
        v.expect(first.size() >= 2, args + ": no artifacts");
      } else {
        v.expect(files == first, args + ": outputs differ between runs");
      }
    }
  }
  v.note(std::to_string(runs.size()) + " commands compared");
  return v;
}

const std::map<int, std::function<Verdict()>>& criteria() {
  static const std::map<int, std::function<Verdict()>> c = {
      {1, criterion_tuning},      {2, criterion_partitions}, {3, criterion_phase_transition},
      {4, criterion_upper_bound}, {5, criterion_lower_bound}, {6, criterion_distortion},
      {7, criterion_recursion},   {8, criterion_cherry},      {9, criterion_determinism},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int which = 0;
  std::string work = (fs::temp_directory_path() / "flatcircle_acceptance").string();
  app.add_option("--criterion", which, "criterion to run (default: all)")->check(CLI::Range(1, 9));
  app.add_option("--cli", g_cli, "path to the command line tool")->required()->check(CLI::ExistingFile);
  app.add_option("--work", work, "scratch directory");
  CLI11_PARSE(app, argc, argv);
  g_work = work;
  fs::create_directories(g_work);

  bool all_pass = true;
  for (const auto& [n, run] : criteria()) {
    if (which && n != which) continue;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << n << ": " << (v.pass() ? "PASS" : "FAIL") << ' ' << v.detail() << std::endl;
    all_pass = all_pass && v.pass();
  }
  return all_pass ? 0 : 1;
}
