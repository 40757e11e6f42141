#include "core/config.hpp"

#include "core/jsonio.hpp"

namespace amap {

namespace {

Eigen::Vector3d to_vec3(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3)
    throw_parse(where + ": expected a 3-element array");
  for (const auto& v : j)
    if (!v.is_number()) throw_parse(where + ": expected numbers");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                         j[2].get<double>());
}

}  // namespace

Calibration load_calibration(const std::filesystem::path& path) {
  nlohmann::json j = load_json(path);
  std::string where = path.filename().string();

  if (!j.contains("camera")) throw_parse(where + ": missing key 'camera'");
  const auto& cam = j.at("camera");
  Calibration cal;
  cal.intrinsics = CameraIntrinsics::make(
      json_get<double>(cam, "fx", where), json_get<double>(cam, "fy", where),
      json_get<double>(cam, "cx", where), json_get<double>(cam, "cy", where),
      json_get<int>(cam, "width", where), json_get<int>(cam, "height", where));

  if (j.contains("body_T_camera")) {
    const auto& ext = j.at("body_T_camera");
    if (!ext.contains("quaternion") || !ext.at("quaternion").is_array() ||
        ext.at("quaternion").size() != 4)
      throw_parse(where + ": body_T_camera.quaternion must be [qx,qy,qz,qw]");
    const auto& q = ext.at("quaternion");
    Eigen::Quaterniond quat(q[3].get<double>(), q[0].get<double>(),
                            q[1].get<double>(), q[2].get<double>());
    Eigen::Vector3d t = to_vec3(
        ext.contains("translation") ? ext.at("translation") : nlohmann::json::array({0, 0, 0}),
        where + ": body_T_camera.translation");
    cal.body_T_camera = PoseSE3(quat, t, Frame::Camera, Frame::Body);
  }

  if (!j.contains("class_allowlist") || !j.at("class_allowlist").is_array())
    throw_parse(where + ": missing 'class_allowlist' array");
  for (const auto& e : j.at("class_allowlist")) {
    int id = json_get<int>(e, "id", where + ": class_allowlist");
    std::string name =
        json_get<std::string>(e, "name", where + ": class_allowlist");
    cal.class_allowlist[id] = name;
  }
  if (cal.class_allowlist.empty())
    throw_parse(where + ": class_allowlist is empty");
  return cal;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  nlohmann::json j = load_json(path);
  std::string where = path.filename().string();
  std::filesystem::path base = path.has_parent_path()
                                   ? path.parent_path()
                                   : std::filesystem::path(".");

  PipelineConfig cfg;
  cfg.session_id = json_get_or<std::string>(j, "session_id", "session", where);
  cfg.drone_id = json_get_or<std::string>(j, "drone_id", "unknown", where);

  if (!j.contains("inputs")) throw_parse(where + ": missing key 'inputs'");
  const auto& in = j.at("inputs");
  auto resolve = [&](const std::string& key) {
    std::filesystem::path p = json_get<std::string>(in, key, where + ".inputs");
    return p.is_absolute() ? p : base / p;
  };
  cfg.detections_path = resolve("detections");
  cfg.trajectory_path = resolve("trajectory");
  cfg.pointcloud_path = resolve("pointcloud");
  cfg.odometry_path = resolve("odometry");
  cfg.events_path = resolve("slam_events");
  cfg.calibration_path = resolve("calibration");

  if (j.contains("refine")) {
    const auto& r = j.at("refine");
    cfg.refine.vol_min = json_get_or(r, "vol_min", cfg.refine.vol_min, where);
    cfg.refine.vol_max = json_get_or(r, "vol_max", cfg.refine.vol_max, where);
    cfg.refine.containment_margin =
        json_get_or(r, "containment_margin", cfg.refine.containment_margin, where);
    cfg.refine.volume_ratio_max =
        json_get_or(r, "volume_ratio_max", cfg.refine.volume_ratio_max, where);
    cfg.refine.app_min = json_get_or(r, "app_min", cfg.refine.app_min, where);
  }
  cfg.refine.validate();

  cfg.render_resolution =
      json_get_or(j, "render_resolution", cfg.render_resolution, where);
  if (!(cfg.render_resolution > 0.0))
    throw_config(where + ": render_resolution must be > 0");
  cfg.pose_match_tolerance =
      json_get_or(j, "pose_match_tolerance", cfg.pose_match_tolerance, where);
  cfg.front_depth_percentile =
      json_get_or(j, "front_depth_percentile", cfg.front_depth_percentile, where);
  cfg.emit_pgm = json_get_or(j, "emit_pgm", cfg.emit_pgm, where);

  std::string frame = json_get_or<std::string>(j, "odometry_frame", "body", where);
  if (frame == "body")
    cfg.odometry_frame = OdometryFrame::Body;
  else if (frame == "world")
    cfg.odometry_frame = OdometryFrame::World;
  else
    throw_config(where + ": odometry_frame must be 'body' or 'world'");

  if (j.contains("output_dir")) {
    std::filesystem::path p = json_get<std::string>(j, "output_dir", where);
    cfg.output_dir = p.is_absolute() ? p : base / p;
  }
  return cfg;
}

}  // namespace amap
