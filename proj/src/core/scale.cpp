#include "core/scale.hpp"

#include <algorithm>
#include <cmath>

namespace amap {

namespace {

// Index of the trajectory entry with timestamp nearest t.
size_t nearest_pose(const std::vector<TrajectoryEntry>& poses, double t) {
  auto it = std::lower_bound(
      poses.begin(), poses.end(), t,
      [](const TrajectoryEntry& e, double v) { return e.timestamp < v; });
  if (it == poses.begin()) return 0;
  if (it == poses.end()) return poses.size() - 1;
  size_t hi = static_cast<size_t>(it - poses.begin());
  return (t - poses[hi - 1].timestamp <= poses[hi].timestamp - t) ? hi - 1 : hi;
}

}  // namespace

double integrate_displacement(const std::vector<OdometrySample>& samples,
                              const std::vector<TrajectoryEntry>& poses,
                              double t0, double t1, OdometryFrame frame) {
  if (!(t0 < t1)) throw_pipeline("integrate_displacement: need t0 < t1");
  if (samples.empty())
    throw_pipeline("integrate_displacement: no odometry samples");
  if (frame == OdometryFrame::Body && poses.empty())
    throw_pipeline("integrate_displacement: body-frame odometry needs poses");

  auto nearest_gap = [&](double t) {
    double best = std::numeric_limits<double>::infinity();
    for (const OdometrySample& s : samples)
      best = std::min(best, std::abs(s.timestamp - t));
    return best;
  };
  if (nearest_gap(t0) > 0.2 || nearest_gap(t1) > 0.2)
    throw_pipeline("integrate_displacement: odometry coverage gap at window boundary");

  auto world_vel = [&](const OdometrySample& s) -> Eigen::Vector3d {
    if (frame == OdometryFrame::World) return s.velocity;
    const PoseSE3& p = poses[nearest_pose(poses, s.timestamp)].pose;
    return p.rotation() * s.velocity;
  };

  // Velocity at an arbitrary time: linear interpolation between samples,
  // nearest-sample value outside the sampled range.
  auto vel_at = [&](double t) -> Eigen::Vector3d {
    auto it = std::lower_bound(
        samples.begin(), samples.end(), t,
        [](const OdometrySample& s, double v) { return s.timestamp < v; });
    if (it == samples.begin()) return world_vel(samples.front());
    if (it == samples.end()) return world_vel(samples.back());
    const OdometrySample& b = *it;
    const OdometrySample& a = *(it - 1);
    double w = (t - a.timestamp) / (b.timestamp - a.timestamp);
    return (1.0 - w) * world_vel(a) + w * world_vel(b);
  };

  // Trapezoid over t0, interior sample times, t1.
  Eigen::Vector3d integral = Eigen::Vector3d::Zero();
  double prev_t = t0;
  Eigen::Vector3d prev_v = vel_at(t0);
  for (const OdometrySample& s : samples) {
    if (s.timestamp <= t0 || s.timestamp >= t1) continue;
    Eigen::Vector3d v = world_vel(s);
    integral += 0.5 * (s.timestamp - prev_t) * (prev_v + v);
    prev_t = s.timestamp;
    prev_v = v;
  }
  integral += 0.5 * (t1 - prev_t) * (prev_v + vel_at(t1));
  return integral.norm();
}

ScaleEstimate estimate_scale(const SlamEventLog& events,
                             const std::vector<OdometrySample>& samples,
                             const std::vector<TrajectoryEntry>& poses,
                             OdometryFrame frame) {
  long success = -1;
  for (size_t i = 0; i < events.events.size(); ++i) {
    if (events.events[i].second == SlamEvent::InitSuccess) {
      success = static_cast<long>(i);
      break;
    }
  }
  if (success < 0) throw_pipeline("estimate_scale: no InitSuccess event");

  // Failed init attempts before the successful one reset the reference
  // position, so only the last search window counts.
  long start = -1;
  for (long i = success - 1; i >= 0; --i) {
    if (events.events[i].second == SlamEvent::InitSearchStart) {
      start = i;
      break;
    }
  }
  if (start < 0)
    throw_pipeline("estimate_scale: no InitSearchStart before InitSuccess");

  ScaleEstimate est;
  est.t_start = events.events[start].first;
  est.t_end = events.events[success].first;

  if (poses.empty()) throw_pipeline("estimate_scale: empty trajectory");
  const Eigen::Vector3d& p0 =
      poses[nearest_pose(poses, est.t_start)].pose.translation();
  const Eigen::Vector3d& p1 =
      poses[nearest_pose(poses, est.t_end)].pose.translation();
  est.slam_displacement = (p1 - p0).norm();
  est.odom_displacement =
      integrate_displacement(samples, poses, est.t_start, est.t_end, frame);

  if (est.slam_displacement < 1e-6 || est.odom_displacement < 0.01)
    throw_pipeline("estimate_scale: degenerate baseline, scale unobservable");

  est.factor = est.odom_displacement / est.slam_displacement;
  if (!std::isfinite(est.factor) || !(est.factor > 0.0))
    throw_pipeline("estimate_scale: non-finite scale factor");
  return est;
}

std::vector<SparseMapPoint> apply_scale(
    double factor, const std::vector<SparseMapPoint>& points) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw_pipeline("apply_scale: invalid factor");
  std::vector<SparseMapPoint> out = points;
  for (SparseMapPoint& p : out) p.position.v *= factor;
  return out;
}

std::vector<TrajectoryEntry> apply_scale(
    double factor, const std::vector<TrajectoryEntry>& poses) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw_pipeline("apply_scale: invalid factor");
  std::vector<TrajectoryEntry> out = poses;
  for (TrajectoryEntry& e : out)
    e.pose = PoseSE3(e.pose.rotation(), factor * e.pose.translation(),
                     e.pose.source(), e.pose.target());
  return out;
}

}  // namespace amap
