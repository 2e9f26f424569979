// Command line front end: builds a JSON config from a file and flags and
// hands it to fc_run.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "flatcircle/flatcircle.h"
#include "json.hpp"

namespace {

struct Flags {
  std::string config;
  std::string l, u, target, out;
  std::vector<std::string> l_grid;
  unsigned precision_bits = 0;
  int n_max = 0;
  std::string seed;
  int threads = -1;
  bool quiet = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circle maps with a flat interval: tuning, partitions, scalings and dimension estimates"};
  app.set_version_flag("--version", std::string(fc_version()));
  app.require_subcommand(1, 1);
  Flags f;
  app.add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--l", f.l, "critical exponent l (decimal)");
  app.add_option("--l-grid", f.l_grid, "exponents for sweep")->delimiter(',');
  app.add_option("--u", f.u, "flat interval length (decimal)");
  app.add_option("--target", f.target, "golden | silver | cf:<list> | dec:<digits>");
  app.add_option("--precision-bits", f.precision_bits, "working precision in bits");
  app.add_option("--n-max", f.n_max, "deepest partition level");
  app.add_option("--seed", f.seed, "seed for sampled checks");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--threads", f.threads, "sweep worker threads (0 = all cores)");
  app.add_flag("-q,--quiet", f.quiet, "print nothing on success");
  app.fallthrough();

  const char* commands[][2] = {
      {"tune", "tune the offset to the target rotation number"},
      {"partition", "build dynamical partitions and check their structure"},
      {"scalings", "scaling sequences, recursion and comparability"},
      {"distortion", "cross-ratio, Schwarzian and Koebe checks"},
      {"dimension", "cover exponent and mass distribution estimates"},
      {"sweep", "verdict table over a grid of exponents"},
      {"cherry", "dimension bound for the quasiminimal set of a Cherry flow"},
      {"verify", "run every invariant check"},
  };
  for (auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; usage mistakes count as config errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : FC_CONFIG_ERROR;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      cfg = nlohmann::ordered_json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: " << f.config << ": " << e.what() << '\n';
      return FC_CONFIG_ERROR;
    }
    if (!cfg.is_object()) {
      std::cerr << "error: " << f.config << " must hold a JSON object\n";
      return FC_CONFIG_ERROR;
    }
  }
  if (!f.l.empty()) cfg["l"] = f.l;
  if (!f.l_grid.empty()) cfg["l_grid"] = f.l_grid;
  if (!f.u.empty()) cfg["u"] = f.u;
  if (!f.target.empty()) cfg["target"] = f.target;
  if (f.precision_bits) cfg["precision_bits"] = f.precision_bits;
  if (f.n_max) cfg["n_max"] = f.n_max;
  if (!f.seed.empty()) cfg["seed"] = f.seed;
  if (!f.out.empty()) cfg["out"] = f.out;
  if (f.threads >= 0) cfg["threads"] = f.threads;

  char* summary = nullptr;
  const fc_status st = fc_run(command.c_str(), cfg.dump().c_str(), &summary);
  if (summary) {
    if (st != FC_OK || !f.quiet) std::fputs(summary, st == FC_OK ? stdout : stderr);
    fc_string_free(summary);
  } else if (st != FC_OK) {
    std::cerr << "error: " << fc_last_error() << '\n';
  }
  return static_cast<int>(st);
}
