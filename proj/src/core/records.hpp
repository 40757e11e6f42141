#pragma once

#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace amap {

// One detector output row, after class filtering and image clamping.
struct Detection2D {
  int frame_id = 0;
  double timestamp = 0.0;  // seconds
  int class_id = 0;
  std::string class_name;
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;  // pixels
  double confidence = 0.0;
};

// Timestamped camera pose (camera -> map), pre-scaling.
struct TrajectoryEntry {
  double timestamp = 0.0;
  PoseSE3 pose;
};

struct SparseMapPoint {
  Point3 position;  // map frame, pre-scaling
  int id = 0;
};

struct OdometrySample {
  double timestamp = 0.0;
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // m/s
};

enum class SlamEvent { InitSearchStart, InitSuccess, InitFailure };

const char* slam_event_name(SlamEvent e);

struct SlamEventLog {
  std::vector<std::pair<double, SlamEvent>> events;  // time-ordered
};

}  // namespace amap
