#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flatcircle/partition.hpp"
#include "flatcircle/rotation.hpp"
#include "flatcircle/scalings.hpp"

namespace flatcircle {

struct AnalysisOptions {
  std::string flat_length = "0.5";  // decimal text, parsed at `precision`
  std::string exponent = "2";
  RotationTarget target = RotationTarget::golden();
  unsigned precision = 512;
  int n_max = 10;
  TuneOptions tune;
};

// A tuned map with its orbit, preimages, partitions of levels 1..n_max + 1
// and scaling series. Not movable: the geometry view points into it.
class MapAnalysis {
 public:
  static std::unique_ptr<MapAnalysis> run(const AnalysisOptions& opts);

  MapAnalysis(const MapAnalysis&) = delete;
  MapAnalysis& operator=(const MapAnalysis&) = delete;

  const AnalysisOptions& options() const { return opts_; }
  const TuneResult& tuned() const { return tuned_; }
  const FlatMap& map() const { return tuned_.map; }
  const ContinuedFraction& cf() const { return tuned_.cf; }
  MapGeometry geometry() const { return MapGeometry{tuned_.map, tuned_.cf, *orbit_, *pre_}; }
  // Partition of the given level, 1 <= level <= n_max + 1.
  const DynamicalPartition& partition(int level) const;
  // Levels 1..up_to.
  std::span<const DynamicalPartition> partitions(int up_to) const;
  const ScalingSeries& scalings() const { return series_; }
  const PreimageSet& preimages() const { return *pre_; }
  const ForwardOrbit& orbit() const { return *orbit_; }

 private:
  MapAnalysis(AnalysisOptions opts, TuneResult tuned) : opts_(std::move(opts)), tuned_(std::move(tuned)) {}
  AnalysisOptions opts_;
  TuneResult tuned_;
  std::unique_ptr<ForwardOrbit> orbit_;
  std::unique_ptr<PreimageSet> pre_;
  std::vector<DynamicalPartition> parts_;
  ScalingSeries series_;
};

}  // namespace flatcircle
