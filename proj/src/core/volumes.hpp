#pragma once

#include <array>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/records.hpp"

namespace amap {

// World-frame rectangular prism lifted from one (or, after merging, several)
// 2D detections. Corners are kept as transformed; containment and merge logic
// downstream operates on the axis-aligned hull.
struct BoundingVolume3D {
  int class_id = 0;
  std::string class_name;
  std::array<Eigen::Vector3d, 8> corners{};  // map frame
  Eigen::Vector3d aabb_min = Eigen::Vector3d::Zero();
  Eigen::Vector3d aabb_max = Eigen::Vector3d::Zero();
  int appearances = 1;
  std::vector<int> source_frames;
  std::vector<int> member_points;  // SparseMapPoint ids
  double front_depth = 0.0;        // camera-frame z of the near plane (Z0)
  double rear_depth = 0.0;         // Z0 + thickness estimate

  double aabb_volume() const {
    Eigen::Vector3d d = aabb_max - aabb_min;
    return d.x() * d.y() * d.z();
  }
};

struct LiftedBox {
  double width = 0.0;   // metric x-extent of the front face
  double height = 0.0;  // metric y-extent of the front face
  double z_est = 0.0;   // prism thickness, (width + height) / 2
  std::array<Point3, 8> corners{};  // camera frame; 0..3 front, 4..7 rear
};

// Camera-frame depth of the closest scaled map point projecting inside the
// detection box. cam_pose maps camera -> map. percentile 0 means strict
// closest; 0 < p <= 1 takes the depth at that quantile of the in-box depths.
// Throws Pipeline("no supporting points") when nothing projects inside.
double front_depth(const Detection2D& det, const PoseSE3& cam_pose,
                   const CameraIntrinsics& intr,
                   const std::vector<SparseMapPoint>& points,
                   double percentile = 0.0);

// Back-projects the box corners at z0 (front face) and z0 + z_est (rear face).
LiftedBox lift_detection(const Detection2D& det, double z0,
                         const CameraIntrinsics& intr);

// Maps camera-frame corners into the map frame via map_T_body * body_T_camera
// and computes the axis-aligned hull. Appearances start at 1.
BoundingVolume3D to_world(const LiftedBox& box, const Detection2D& det,
                          const PoseSE3& body_T_camera,
                          const PoseSE3& map_T_body);

// Fills member_points on every volume: a point inside k overlapping aabbs is
// listed in all k volumes.
void associate_points(std::vector<BoundingVolume3D>& volumes,
                      const std::vector<SparseMapPoint>& points);

}  // namespace amap
