#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include "core/config.hpp"
#include "core/refine.hpp"
#include "core/volumes.hpp"

namespace amap {

// Seedable, portable generator (mt19937_64 with hand-rolled distributions so
// streams are identical across standard libraries).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal(double mean, double sigma);
  uint64_t next_u64();

 private:
  std::mt19937_64 state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct SceneObject {
  int class_id = 0;
  std::string class_name;
  Eigen::Vector3d aabb_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d aabb_max = Eigen::Vector3d::Zero();
};

struct SceneSpec {
  std::string session_id = "synthetic";
  std::string drone_id = "synthetic";
  uint64_t seed = 1;
  double true_scale = 1.0;

  CameraIntrinsics camera;
  std::vector<SceneObject> objects;
  std::vector<Eigen::Vector3d> waypoints;  // metric map frame
  double speed = 0.5;                      // average segment speed, m/s
  double frame_rate = 10.0;                // Hz; must divide odom_rate
  double odom_rate = 100.0;                // Hz

  double pixel_sigma = 0.0;
  double false_positive_rate = 0.0;
  double miss_rate = 0.0;

  int points_per_face = 40;
  int points_per_wall = 150;
  std::optional<std::pair<Eigen::Vector3d, Eigen::Vector3d>> room;

  bool init_failure_prefix = false;

  void validate() const;
};

SceneSpec load_scene_spec(const std::filesystem::path& path);

struct GroundTruth {
  double true_scale = 1.0;
  double window_start = 0.0;
  double window_end = 0.0;
  size_t frame_count = 0;
  std::vector<SceneObject> objects;
};

// Writes detections.csv, trajectory.txt (unit SLAM scale), pointcloud.ply,
// odometry.csv, slam_events.csv, calibration.json, config.json and
// ground_truth.json into out_dir.
GroundTruth generate_session(const SceneSpec& spec,
                             const std::filesystem::path& out_dir);

// Brute-force references for the production association and merge paths.
// No indexing, no early exits.
std::vector<std::vector<int>> oracle_containment(
    const std::vector<SparseMapPoint>& points,
    const std::vector<BoundingVolume3D>& volumes);

std::vector<BoundingVolume3D> oracle_merge(
    std::vector<BoundingVolume3D> volumes, const RefineConfig& cfg);

}  // namespace amap
