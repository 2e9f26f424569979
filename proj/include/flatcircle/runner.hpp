#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flatcircle/dimension.hpp"

namespace flatcircle {

// Exit statuses shared by the runner, the C API and the command line tool.
enum class RunStatus : int { ok = 0, invariant_failed = 1, config = 2, precision = 3, other = 4 };

struct RunConfig {
  std::string command;                 // tune, scalings, partition, distortion, dimension, sweep, cherry, verify
  std::string exponent = "3";          // l
  std::vector<std::string> exponent_grid = {"1.5", "2", "3", "4"};  // sweep only
  std::string flat_length = "0.5";     // u
  std::string target = "golden";
  unsigned precision_bits = 512;
  int n_max = 10;
  std::uint64_t seed = 1;
  std::string out;                     // output directory; empty writes nothing
  unsigned tune_bits = 256;
  std::int64_t max_q = 5000;
  SweepThresholds thresholds;
  int threads = 0;                     // sweep workers, 0 = hardware
  int cross_ratio_samples = 10000;
  int schwarzian_samples = 1000;
  int random_intervals = 1000;

  // Keys mirror the field names; numbers may be given as JSON numbers or
  // decimal strings. Unknown keys are rejected.
  static RunConfig from_json(std::string_view text);
  std::string to_json() const;
  void validate() const;
};

struct RunResult {
  RunStatus status = RunStatus::ok;
  std::string summary;  // one line per check or artifact
};

// Never throws; errors become a status and a summary line. When `out` is
// set, manifest.json is written there whatever the outcome.
RunResult run(const RunConfig& cfg);

}  // namespace flatcircle
