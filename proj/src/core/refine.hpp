#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "core/volumes.hpp"

namespace amap {

struct RefineConfig {
  double vol_min = 0.01;            // m^3
  double vol_max = 8.0;             // m^3
  double containment_margin = 0.10; // meters, per-face dilation
  double volume_ratio_max = 10.0;   // container/contained cap
  int app_min = 3;

  void validate() const;
};

struct RefineReport {
  // input, after stage 1, after stage 2, after stage 3
  std::array<size_t, 4> stage_counts{0, 0, 0, 0};
  std::map<std::string, size_t> removals;  // reason -> count
};

// Stage 1 predicate: aabb volume within [vol_min, vol_max].
bool valid_object(const BoundingVolume3D& v, const RefineConfig& cfg);

// True when b nests inside a (dilated by the margin on every face), classes
// match, and the container/contained volume ratio stays under the cap.
bool volume_contains(const BoundingVolume3D& a, const BoundingVolume3D& b,
                     const RefineConfig& cfg);

// Keeps the geometry of the larger-volume operand (a on ties), sums
// appearances, unions source frames and member points.
BoundingVolume3D merge_volumes(const BoundingVolume3D& a,
                               const BoundingVolume3D& b);

struct RefineResult {
  std::vector<BoundingVolume3D> volumes;
  RefineReport report;
};

// Three-stage refinement: validity filter, containment merge to fixed point,
// appearance filter.
RefineResult refine(std::vector<BoundingVolume3D> volumes,
                    const RefineConfig& cfg);

}  // namespace amap
