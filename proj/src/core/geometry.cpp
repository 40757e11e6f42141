#include "core/geometry.hpp"

#include <cmath>
#include <string>

namespace amap {

const char* frame_name(Frame f) {
  switch (f) {
    case Frame::Camera: return "camera";
    case Frame::Body: return "body";
    case Frame::Map: return "map";
  }
  return "?";
}

CameraIntrinsics CameraIntrinsics::make(double fx, double fy, double cx,
                                        double cy, int width, int height) {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw_config("camera intrinsics: focal lengths must be positive");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height))
    throw_config("camera intrinsics: optical center must lie inside the image");
  return CameraIntrinsics{fx, fy, cx, cy, width, height};
}

PoseSE3::PoseSE3(const Eigen::Quaterniond& q, const Eigen::Vector3d& t,
                 Frame source, Frame target)
    : q_(q), t_(t), source_(source), target_(target) {
  double n = q_.norm();
  if (!(n > 1e-12) || !std::isfinite(n))
    throw_geometry("pose: quaternion norm is zero or non-finite");
  q_.normalize();
}

PoseSE3 PoseSE3::identity(Frame frame) {
  return PoseSE3(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(), frame,
                 frame);
}

PoseSE3 PoseSE3::inverse() const {
  Eigen::Quaterniond qi = q_.conjugate();
  return PoseSE3(qi, qi * (-t_), target_, source_);
}

PixelPoint project(const CameraIntrinsics& intr, const Point3& p) {
  if (p.frame != Frame::Camera)
    throw_geometry(std::string("project: point is in frame '") +
                   frame_name(p.frame) + "', expected 'camera'");
  if (!(p.z() > 0.0))
    throw_geometry("project: non-positive depth");
  return PixelPoint{intr.fx * p.x() / p.z() + intr.cx,
                    intr.fy * p.y() / p.z() + intr.cy};
}

Point3 back_project(const CameraIntrinsics& intr, const PixelPoint& px,
                    double z) {
  if (!(z > 0.0)) throw_geometry("back_project: non-positive depth");
  return Point3((px.u - intr.cx) * z / intr.fx, (px.v - intr.cy) * z / intr.fy,
                z, Frame::Camera);
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  if (a.source() != b.target())
    throw_geometry(std::string("compose: frame mismatch, a expects '") +
                   frame_name(a.source()) + "' but b produces '" +
                   frame_name(b.target()) + "'");
  return PoseSE3(a.rotation() * b.rotation(),
                 a.rotation() * b.translation() + a.translation(), b.source(),
                 a.target());
}

Point3 transform_point(const PoseSE3& T, const Point3& p) {
  if (p.frame != T.source())
    throw_geometry(std::string("transform_point: point is in frame '") +
                   frame_name(p.frame) + "', transform expects '" +
                   frame_name(T.source()) + "'");
  return Point3(T.rotation() * p.v + T.translation(), T.target());
}

bool in_image(const CameraIntrinsics& intr, const PixelPoint& px) {
  return px.u >= 0.0 && px.u <= intr.width && px.v >= 0.0 && px.v <= intr.height;
}

}  // namespace amap
