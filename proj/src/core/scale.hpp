#pragma once

#include <vector>

#include "core/config.hpp"
#include "core/records.hpp"

namespace amap {

struct ScaleEstimate {
  double factor = 1.0;             // odom_displacement / slam_displacement
  double odom_displacement = 0.0;  // meters
  double slam_displacement = 0.0;  // map units
  double t_start = 0.0;
  double t_end = 0.0;
};

// Norm of the trapezoidal integral of world-frame velocity over [t0, t1].
// Body-frame velocities are rotated by the time-nearest trajectory rotation.
// Boundary values are interpolated at t0 and t1; a gap larger than 200 ms at
// either endpoint is an error.
double integrate_displacement(const std::vector<OdometrySample>& samples,
                              const std::vector<TrajectoryEntry>& poses,
                              double t0, double t1,
                              OdometryFrame frame = OdometryFrame::Body);

// Window: [last InitSearchStart before the first InitSuccess, that
// InitSuccess]. Earlier failed search windows are discarded.
ScaleEstimate estimate_scale(const SlamEventLog& events,
                             const std::vector<OdometrySample>& samples,
                             const std::vector<TrajectoryEntry>& poses,
                             OdometryFrame frame = OdometryFrame::Body);

std::vector<SparseMapPoint> apply_scale(double factor,
                                        const std::vector<SparseMapPoint>& points);
std::vector<TrajectoryEntry> apply_scale(double factor,
                                         const std::vector<TrajectoryEntry>& poses);

}  // namespace amap
