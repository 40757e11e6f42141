#include "core/volumes.hpp"

#include <algorithm>
#include <cmath>

namespace amap {

double front_depth(const Detection2D& det, const PoseSE3& cam_pose,
                   const CameraIntrinsics& intr,
                   const std::vector<SparseMapPoint>& points,
                   double percentile) {
  PoseSE3 map_T_camera_inv = cam_pose.inverse();  // map -> camera
  std::vector<double> depths;
  for (const SparseMapPoint& mp : points) {
    Point3 pc = transform_point(map_T_camera_inv, mp.position);
    if (!(pc.z() > 0.0)) continue;
    PixelPoint px{intr.fx * pc.x() / pc.z() + intr.cx,
                  intr.fy * pc.y() / pc.z() + intr.cy};
    if (px.u >= det.x_min && px.u <= det.x_max && px.v >= det.y_min &&
        px.v <= det.y_max)
      depths.push_back(pc.z());
  }
  if (depths.empty())
    throw_pipeline("front_depth: no supporting points inside detection box");
  std::sort(depths.begin(), depths.end());
  if (percentile <= 0.0) return depths.front();
  size_t idx = static_cast<size_t>(percentile * (depths.size() - 1));
  return depths[std::min(idx, depths.size() - 1)];
}

LiftedBox lift_detection(const Detection2D& det, double z0,
                         const CameraIntrinsics& intr) {
  if (!(z0 > 0.0)) throw_geometry("lift_detection: non-positive front depth");
  LiftedBox out;
  const PixelPoint box[4] = {{det.x_min, det.y_min},
                             {det.x_max, det.y_min},
                             {det.x_max, det.y_max},
                             {det.x_min, det.y_max}};
  for (int i = 0; i < 4; ++i) out.corners[i] = back_project(intr, box[i], z0);
  out.width = out.corners[1].x() - out.corners[0].x();
  out.height = out.corners[3].y() - out.corners[0].y();
  out.z_est = 0.5 * (out.width + out.height);
  double z_rear = z0 + out.z_est;
  for (int i = 0; i < 4; ++i)
    out.corners[4 + i] = back_project(intr, box[i], z_rear);
  return out;
}

BoundingVolume3D to_world(const LiftedBox& box, const Detection2D& det,
                          const PoseSE3& body_T_camera,
                          const PoseSE3& map_T_body) {
  PoseSE3 map_T_camera = compose(map_T_body, body_T_camera);
  BoundingVolume3D v;
  v.class_id = det.class_id;
  v.class_name = det.class_name;
  v.appearances = 1;
  v.source_frames = {det.frame_id};
  v.front_depth = box.corners[0].z();
  v.rear_depth = box.corners[4].z();
  Eigen::Vector3d lo = Eigen::Vector3d::Constant(
      std::numeric_limits<double>::infinity());
  Eigen::Vector3d hi = -lo;
  for (int i = 0; i < 8; ++i) {
    Point3 pw = transform_point(map_T_camera, box.corners[i]);
    v.corners[i] = pw.v;
    lo = lo.cwiseMin(pw.v);
    hi = hi.cwiseMax(pw.v);
  }
  v.aabb_min = lo;
  v.aabb_max = hi;
  return v;
}

void associate_points(std::vector<BoundingVolume3D>& volumes,
                      const std::vector<SparseMapPoint>& points) {
  for (BoundingVolume3D& v : volumes) v.member_points.clear();
  for (const SparseMapPoint& p : points) {
    for (BoundingVolume3D& v : volumes) {
      const Eigen::Vector3d& q = p.position.v;
      if ((q.array() >= v.aabb_min.array()).all() &&
          (q.array() <= v.aabb_max.array()).all())
        v.member_points.push_back(p.id);
    }
  }
}

}  // namespace amap
