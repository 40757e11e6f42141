#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "core/ingest.hpp"
#include "core/scale.hpp"
#include "core/textio.hpp"

namespace amap {

namespace {

class StageTimer {
 public:
  StageTimer() : start_(std::chrono::steady_clock::now()) {}
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void emit_log(const StageLogger& log, const std::string& line) {
  if (log) log(line);
}

template <typename F>
auto stage(const char* name, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("[") + name + "] " + e.what());
  }
}

size_t nearest_pose_index(const std::vector<TrajectoryEntry>& poses, double t) {
  auto it = std::lower_bound(
      poses.begin(), poses.end(), t,
      [](const TrajectoryEntry& e, double v) { return e.timestamp < v; });
  if (it == poses.begin()) return 0;
  if (it == poses.end()) return poses.size() - 1;
  size_t hi = static_cast<size_t>(it - poses.begin());
  return (t - poses[hi - 1].timestamp <= poses[hi].timestamp - t) ? hi - 1 : hi;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << text;
  if (!out) throw_io("write failed: " + path.string());
}

}  // namespace

SessionData load_session(const PipelineConfig& cfg) {
  for (const auto& p :
       {cfg.detections_path, cfg.trajectory_path, cfg.pointcloud_path,
        cfg.odometry_path, cfg.events_path, cfg.calibration_path}) {
    if (!std::filesystem::exists(p))
      throw_io("[ingest] missing input file: " + p.string());
  }
  SessionData s;
  s.calibration = stage("ingest", [&] { return load_calibration(cfg.calibration_path); });
  auto det = stage("ingest", [&] {
    return parse_detections(cfg.detections_path, s.calibration.intrinsics.width,
                            s.calibration.intrinsics.height,
                            s.calibration.class_allowlist);
  });
  s.detections = std::move(det.detections);
  s.detections_dropped_by_class = det.dropped_by_class;
  s.trajectory = stage("ingest", [&] { return parse_trajectory(cfg.trajectory_path); });
  s.cloud = stage("ingest", [&] { return parse_pointcloud(cfg.pointcloud_path); });
  s.odometry = stage("ingest", [&] { return parse_odometry(cfg.odometry_path); });
  s.events = stage("ingest", [&] { return parse_slam_events(cfg.events_path); });
  if (s.trajectory.empty()) throw_parse("[ingest] empty trajectory");
  return s;
}

std::vector<BoundingVolume3D> lift_session(
    const PipelineConfig& cfg, const Calibration& cal,
    const std::vector<Detection2D>& detections,
    const std::vector<TrajectoryEntry>& scaled_trajectory,
    const std::vector<SparseMapPoint>& scaled_cloud, LiftStats* stats) {
  std::vector<BoundingVolume3D> volumes;
  LiftStats local;
  PoseSE3 camera_T_body = cal.body_T_camera.inverse();
  for (const Detection2D& det : detections) {
    size_t pi = nearest_pose_index(scaled_trajectory, det.timestamp);
    const TrajectoryEntry& entry = scaled_trajectory[pi];
    if (std::abs(entry.timestamp - det.timestamp) > cfg.pose_match_tolerance) {
      ++local.skipped_no_pose;
      continue;
    }
    double z0;
    try {
      z0 = front_depth(det, entry.pose, cal.intrinsics, scaled_cloud,
                       cfg.front_depth_percentile);
    } catch (const Error&) {
      ++local.skipped_no_points;
      continue;
    }
    LiftedBox box = lift_detection(det, z0, cal.intrinsics);
    PoseSE3 map_T_body = compose(entry.pose, camera_T_body);
    volumes.push_back(to_world(box, det, cal.body_T_camera, map_T_body));
  }
  if (stats) *stats = local;
  return volumes;
}

nlohmann::ordered_json config_snapshot(const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["refine"] = {{"vol_min", cfg.refine.vol_min},
                 {"vol_max", cfg.refine.vol_max},
                 {"containment_margin", cfg.refine.containment_margin},
                 {"volume_ratio_max", cfg.refine.volume_ratio_max},
                 {"app_min", cfg.refine.app_min}};
  j["render_resolution"] = cfg.render_resolution;
  j["pose_match_tolerance"] = cfg.pose_match_tolerance;
  j["front_depth_percentile"] = cfg.front_depth_percentile;
  j["odometry_frame"] =
      cfg.odometry_frame == OdometryFrame::Body ? "body" : "world";
  return j;
}

AccessibilityMap run_pipeline(const PipelineConfig& cfg,
                              const StageLogger& log) {
  StageTimer total;

  StageTimer t_ingest;
  SessionData data = load_session(cfg);
  emit_log(log, "stage=ingest detections=" + std::to_string(data.detections.size()) +
                    " poses=" + std::to_string(data.trajectory.size()) +
                    " points=" + std::to_string(data.cloud.size()) +
                    " dropped_by_class=" +
                    std::to_string(data.detections_dropped_by_class) +
                    " ms=" + std::to_string(t_ingest.ms()));

  StageTimer t_scale;
  ScaleEstimate est = stage("scale", [&] {
    return estimate_scale(data.events, data.odometry, data.trajectory,
                          cfg.odometry_frame);
  });
  auto scaled_cloud = apply_scale(est.factor, data.cloud);
  auto scaled_traj = apply_scale(est.factor, data.trajectory);
  emit_log(log, "stage=scale factor=" + fmt_double(est.factor) +
                    " ms=" + std::to_string(t_scale.ms()));

  StageTimer t_lift;
  LiftStats lift_stats;
  auto volumes = stage("lift", [&] {
    return lift_session(cfg, data.calibration, data.detections, scaled_traj,
                        scaled_cloud, &lift_stats);
  });
  emit_log(log, "stage=lift volumes=" + std::to_string(volumes.size()) +
                    " skipped_no_pose=" + std::to_string(lift_stats.skipped_no_pose) +
                    " skipped_no_points=" +
                    std::to_string(lift_stats.skipped_no_points) +
                    " ms=" + std::to_string(t_lift.ms()));

  StageTimer t_assoc;
  stage("associate", [&] { associate_points(volumes, scaled_cloud); return 0; });
  emit_log(log, "stage=associate ms=" + std::to_string(t_assoc.ms()));

  StageTimer t_refine;
  RefineResult refined = stage("refine", [&] { return refine(std::move(volumes), cfg.refine); });
  emit_log(log, "stage=refine counts=" +
                    std::to_string(refined.report.stage_counts[0]) + "," +
                    std::to_string(refined.report.stage_counts[1]) + "," +
                    std::to_string(refined.report.stage_counts[2]) + "," +
                    std::to_string(refined.report.stage_counts[3]) +
                    " ms=" + std::to_string(t_refine.ms()));

  AccessibilityMap map;
  map.volumes = std::move(refined.volumes);
  map.cloud = std::move(scaled_cloud);
  map.trajectory = std::move(scaled_traj);
  map.report = std::move(refined.report);
  map.scale = est;
  map.session_id = cfg.session_id;
  map.drone_id = cfg.drone_id;
  map.config_snapshot = config_snapshot(cfg);

  if (!cfg.output_dir.empty()) {
    StageTimer t_emit;
    std::filesystem::create_directories(cfg.output_dir);
    std::vector<std::filesystem::path> written;
    try {
      stage("emit", [&] {
        auto put = [&](const char* name, const std::string& text) {
          std::filesystem::path p = cfg.output_dir / name;
          write_text(p, text);
          written.push_back(p);
        };
        put("report.json", emit_report(map).dump(2) + "\n");
        put("map.svg", render_topdown_svg(map, cfg.render_resolution));
        if (cfg.emit_pgm)
          put("map.pgm", render_topdown_pgm(map, cfg.render_resolution));
        put("annotated.ply", emit_annotated_cloud(map));
        return 0;
      });
    } catch (...) {
      std::error_code ec;
      for (const auto& p : written) std::filesystem::remove(p, ec);
      throw;
    }
    emit_log(log, "stage=emit files=" + std::to_string(written.size()) +
                      " ms=" + std::to_string(t_emit.ms()));
  }
  emit_log(log, "stage=done ms=" + std::to_string(total.ms()));
  return map;
}

void dry_run(const PipelineConfig& cfg, const StageLogger& log) {
  SessionData data = load_session(cfg);
  cfg.refine.validate();
  emit_log(log, "dry-run ok: detections=" + std::to_string(data.detections.size()) +
                    " poses=" + std::to_string(data.trajectory.size()) +
                    " points=" + std::to_string(data.cloud.size()) +
                    " odometry=" + std::to_string(data.odometry.size()) +
                    " events=" + std::to_string(data.events.events.size()));
}

}  // namespace amap
