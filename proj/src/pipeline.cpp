#include "flatcircle/pipeline.hpp"

#include <algorithm>

#include "flatcircle/error.hpp"

namespace flatcircle {

std::unique_ptr<MapAnalysis> MapAnalysis::run(const AnalysisOptions& opts) {
  if (opts.n_max < 2) throw DomainError("n_max must be at least 2");
  PrecisionScope scope(opts.precision);
  TuneOptions tune = opts.tune;
  tune.min_depth = std::max(tune.min_depth, opts.n_max + 2);
  tune.tol_bits = std::min(tune.tol_bits, opts.precision - 32);
  Real u = Real::parse(opts.flat_length, opts.precision);
  Real l = Real::parse(opts.exponent, opts.precision);
  if (u.sign() <= 0) throw DomainError("partitions need a nondegenerate flat interval");
  TuneResult tuned = tune_offset(u, l, opts.target, tune);

  std::unique_ptr<MapAnalysis> a(new MapAnalysis(opts, std::move(tuned)));
  const auto& q = a->cf().q;
  const int top = opts.n_max + 1;
  const std::int64_t count = q[static_cast<size_t>(top)] + q[static_cast<size_t>(top) + 1];
  a->orbit_ = std::make_unique<ForwardOrbit>(a->map(), count);
  a->pre_ = std::make_unique<PreimageSet>(a->map(), count);
  for (int n = 1; n <= top; ++n) a->parts_.push_back(build_partition(a->map(), *a->pre_, a->cf(), n));
  a->series_ = compute_scalings(a->geometry(), opts.n_max);
  return a;
}

const DynamicalPartition& MapAnalysis::partition(int level) const {
  if (level < 1 || level > static_cast<int>(parts_.size()))
    throw DomainError("partition level " + std::to_string(level) + " not built");
  return parts_[static_cast<size_t>(level - 1)];
}

std::span<const DynamicalPartition> MapAnalysis::partitions(int up_to) const {
  if (up_to < 1 || up_to > static_cast<int>(parts_.size()))
    throw DomainError("partition level " + std::to_string(up_to) + " not built");
  return {parts_.data(), static_cast<size_t>(up_to)};
}

}  // namespace flatcircle
