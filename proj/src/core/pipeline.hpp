#pragma once

#include <functional>

#include "core/config.hpp"
#include "core/mapgen.hpp"

namespace amap {

struct SessionData {
  Calibration calibration;
  std::vector<Detection2D> detections;
  std::vector<TrajectoryEntry> trajectory;  // pre-scaling
  std::vector<SparseMapPoint> cloud;        // pre-scaling
  std::vector<OdometrySample> odometry;
  SlamEventLog events;
  size_t detections_dropped_by_class = 0;
};

SessionData load_session(const PipelineConfig& cfg);

struct LiftStats {
  size_t skipped_no_pose = 0;
  size_t skipped_no_points = 0;
};

// Per-detection lifting against the scaled trajectory and cloud.
std::vector<BoundingVolume3D> lift_session(
    const PipelineConfig& cfg, const Calibration& cal,
    const std::vector<Detection2D>& detections,
    const std::vector<TrajectoryEntry>& scaled_trajectory,
    const std::vector<SparseMapPoint>& scaled_cloud, LiftStats* stats);

nlohmann::ordered_json config_snapshot(const PipelineConfig& cfg);

using StageLogger = std::function<void(const std::string& line)>;

// Full pipeline: ingest, scale, lift, associate, refine, emit. Output files
// are written last; on failure nothing is left behind.
AccessibilityMap run_pipeline(const PipelineConfig& cfg,
                              const StageLogger& log = {});

// Parses and validates all inputs, writes nothing.
void dry_run(const PipelineConfig& cfg, const StageLogger& log = {});

}  // namespace amap
