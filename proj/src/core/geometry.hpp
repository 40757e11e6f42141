#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "core/error.hpp"

namespace amap {

// Reference frames points and poses are expressed in. Binary operations
// check tags and refuse to mix frames silently.
enum class Frame { Camera, Body, Map };

const char* frame_name(Frame f);

struct PixelPoint {
  double u = 0.0;  // column
  double v = 0.0;  // row
};

struct Point3 {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  Frame frame = Frame::Map;

  Point3() = default;
  Point3(double x, double y, double z, Frame f) : v(x, y, z), frame(f) {}
  Point3(const Eigen::Vector3d& p, Frame f) : v(p), frame(f) {}

  double x() const { return v.x(); }
  double y() const { return v.y(); }
  double z() const { return v.z(); }
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  static CameraIntrinsics make(double fx, double fy, double cx, double cy,
                               int width, int height);
};

// Rigid transform mapping points tagged `source` into frame `target`:
// p_target = R * p_source + t. Quaternion is normalized on construction.
class PoseSE3 {
 public:
  PoseSE3() = default;
  PoseSE3(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
          Frame source, Frame target);

  static PoseSE3 identity(Frame frame);

  const Eigen::Quaterniond& rotation() const { return q_; }
  const Eigen::Vector3d& translation() const { return t_; }
  Frame source() const { return source_; }
  Frame target() const { return target_; }

  PoseSE3 inverse() const;

 private:
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
  Eigen::Vector3d t_ = Eigen::Vector3d::Zero();
  Frame source_ = Frame::Map;
  Frame target_ = Frame::Map;
};

// u = fx*x/z + cx, v = fy*y/z + cy. Throws for z <= 0.
PixelPoint project(const CameraIntrinsics& intr, const Point3& p);

// Inverse of project at a known depth z > 0. Result is in the camera frame.
Point3 back_project(const CameraIntrinsics& intr, const PixelPoint& px, double z);

// Applying the composite equals applying b, then a. Requires a.source == b.target.
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);

// Requires p.frame == T.source; result is tagged T.target.
Point3 transform_point(const PoseSE3& T, const Point3& p);

bool in_image(const CameraIntrinsics& intr, const PixelPoint& px);

}  // namespace amap
