#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "core/geometry.hpp"
#include "core/refine.hpp"

namespace amap {

struct Calibration {
  CameraIntrinsics intrinsics;
  PoseSE3 body_T_camera = PoseSE3::identity(Frame::Camera);  // camera -> body
  std::map<int, std::string> class_allowlist;
};

Calibration load_calibration(const std::filesystem::path& path);

enum class OdometryFrame { Body, World };

struct PipelineConfig {
  std::string session_id = "session";
  std::string drone_id = "unknown";

  std::filesystem::path detections_path;
  std::filesystem::path trajectory_path;
  std::filesystem::path pointcloud_path;
  std::filesystem::path odometry_path;
  std::filesystem::path events_path;
  std::filesystem::path calibration_path;

  RefineConfig refine;
  double render_resolution = 0.02;       // meters per pixel
  double pose_match_tolerance = 0.100;   // seconds
  double front_depth_percentile = 0.0;   // 0 = strict closest point
  OdometryFrame odometry_frame = OdometryFrame::Body;
  bool emit_pgm = true;

  std::filesystem::path output_dir;  // may be overridden by the caller
};

// Relative input paths are resolved against the config file's directory.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace amap
