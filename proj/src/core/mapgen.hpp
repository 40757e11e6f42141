#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "core/refine.hpp"
#include "core/scale.hpp"

namespace amap {

struct AccessibilityMap {
  std::vector<BoundingVolume3D> volumes;    // refined set
  std::vector<SparseMapPoint> cloud;        // metric
  std::vector<TrajectoryEntry> trajectory;  // metric
  RefineReport report;
  ScaleEstimate scale;
  std::string session_id;
  std::string drone_id;
  nlohmann::ordered_json config_snapshot;
};

// Orthographic top-down render: cloud dots, trajectory polyline, aabb
// footprints labeled class_name (appearances). Deterministic byte output.
std::string render_topdown_svg(const AccessibilityMap& map, double resolution);

// Occupancy-style raster: 255 free, 128 cloud point, 0 volume footprint.
std::string render_topdown_pgm(const AccessibilityMap& map, double resolution);

// Fixed key order, doubles rounded to 6 decimal places.
nlohmann::ordered_json emit_report(const AccessibilityMap& map);

// Scaled cloud plus 8 vertices and 12 edges per volume; the vertex element
// stays parseable by parse_pointcloud.
std::string emit_annotated_cloud(const AccessibilityMap& map);

// Round-trip helper: the per-volume and stage-count summary a report carries.
struct ReportSummary {
  std::array<size_t, 4> stage_counts{0, 0, 0, 0};
  double scale_factor = 0.0;
  struct VolumeSummary {
    int class_id;
    std::string class_name;
    Eigen::Vector3d aabb_min, aabb_max;
    int appearances;
  };
  std::vector<VolumeSummary> volumes;
};

ReportSummary parse_report(const nlohmann::json& j);

}  // namespace amap
