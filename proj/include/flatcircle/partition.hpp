#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatcircle/flat_map.hpp"
#include "flatcircle/rotation.hpp"

namespace flatcircle {

// Forward orbit of the flat interval: point(k) = f^k(U) = f^(k-1)(omega), k >= 1.
class ForwardOrbit {
 public:
  ForwardOrbit(const FlatMap& m, std::int64_t horizon);
  const CirclePoint& point(std::int64_t k) const;
  std::int64_t horizon() const { return static_cast<std::int64_t>(pts_.size()); }

 private:
  std::vector<CirclePoint> pts_;
};

// Backward orbit of the flat interval: arc(i) = f^-i(U), arc(0) = U.
// Pairwise disjointness is verified as the arcs are generated.
class PreimageSet {
 public:
  PreimageSet(const FlatMap& m, std::int64_t count);
  const CircleArc& arc(std::int64_t i) const;
  std::int64_t size() const { return static_cast<std::int64_t>(arcs_.size()); }

 private:
  std::vector<CircleArc> arcs_;
};

enum class ElementKind { preimage, long_gap, short_gap };
const char* kind_name(ElementKind k);

struct Element {
  ElementKind kind;
  std::int64_t index;  // preimage index, or gap index i of I_i
  CircleArc arc;
};

// Level-n partition: the preimages of U with index below q_{n+1} + q_n and
// the gaps between them. Long gaps (generation n) join preimages whose indices
// differ by q_n, short gaps (generation n + 1) by q_{n+1}.
struct DynamicalPartition {
  int level = 0;
  std::int64_t qn = 0, qn1 = 0;
  std::vector<Element> elements;        // circular order, starting at U
  std::vector<std::size_t> long_at;     // long gap index -> element position
  std::vector<std::size_t> short_at;    // short gap index -> element position

  std::size_t long_count() const { return long_at.size(); }
  std::size_t short_count() const { return short_at.size(); }
  const Element& long_gap(std::int64_t i) const { return elements.at(long_at.at(static_cast<size_t>(i))); }
  const Element& short_gap(std::int64_t i) const { return elements.at(short_at.at(static_cast<size_t>(i))); }
  std::vector<Real> gap_lengths() const;
  std::string to_csv() const;
};

// Builds level n from the expansion (depth at least n + 1). Checks tiling,
// gap counts, orientation and pullback consistency.
DynamicalPartition build_partition(const FlatMap& m, const PreimageSet& pre, const ContinuedFraction& cf, int n);

struct RefinementReport {
  int level = 0;
  bool pass = true;
  std::int64_t first_offender = -1;  // element position in the coarser level
  std::string detail;
  int max_gap_split = 0;             // gaps of the finer level inside one gap
};

// Checks the level n -> n + 1 refinement: each long gap I_i^n splits into
// a_{n+2} preimages, a_{n+2} long gaps and one short gap; each short gap of
// level n becomes a long gap of level n + 1 unchanged.
RefinementReport refine_check(const DynamicalPartition& coarse, const DynamicalPartition& fine,
                              const ContinuedFraction& cf);

struct SplitReport {
  int level = 0;                // coarse level m, compared with m + 2
  int max_split = 0;
  std::int64_t bound = 0;       // a_{m+2}(a_{m+3} + 1) + 1
  bool pass = true;
};
SplitReport two_level_split(const DynamicalPartition& coarse, const DynamicalPartition& finer2,
                            const ContinuedFraction& cf);

struct GapStatistics {
  int level = 0;
  Real max_gap, min_gap, max_preimage;
  Real min_preimage_to_gap;  // |A| / |B| over preimages A and adjacent gaps B
};
GapStatistics gap_statistics(const DynamicalPartition& p);

}  // namespace flatcircle
