#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "core/ingest.hpp"
#include "core/jsonio.hpp"

namespace amap {

uint64_t Rng::next_u64() { return state_(); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal(double mean, double sigma) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + sigma * spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return mean + sigma * r * std::cos(a);
}

void SceneSpec::validate() const {
  if (!(true_scale > 0.0)) throw_config("scene spec: true_scale must be > 0");
  if (!(speed > 0.0)) throw_config("scene spec: speed must be > 0");
  if (waypoints.size() < 2)
    throw_config("scene spec: need at least two waypoints");
  if (!(frame_rate > 0.0) || !(odom_rate > 0.0))
    throw_config("scene spec: rates must be > 0");
  double ratio = odom_rate / frame_rate;
  if (std::abs(ratio - std::round(ratio)) > 1e-9)
    throw_config("scene spec: odom_rate must be an integer multiple of frame_rate");
  for (const SceneObject& o : objects) {
    if (!(o.aabb_min.array() < o.aabb_max.array()).all())
      throw_config("scene spec: object aabb has min >= max");
  }
  if (!(pixel_sigma >= 0.0) || false_positive_rate < 0.0 ||
      false_positive_rate > 1.0 || miss_rate < 0.0 || miss_rate > 1.0)
    throw_config("scene spec: bad noise parameters");
  if (points_per_face < 0 || points_per_wall < 0)
    throw_config("scene spec: negative point densities");
  CameraIntrinsics::make(camera.fx, camera.fy, camera.cx, camera.cy,
                         camera.width, camera.height);
}

SceneSpec load_scene_spec(const std::filesystem::path& path) {
  nlohmann::json j = load_json(path);
  std::string where = path.filename().string();
  SceneSpec s;
  s.session_id = json_get_or<std::string>(j, "session_id", s.session_id, where);
  s.drone_id = json_get_or<std::string>(j, "drone_id", s.drone_id, where);
  s.seed = json_get_or<uint64_t>(j, "seed", s.seed, where);
  s.true_scale = json_get_or(j, "true_scale", s.true_scale, where);

  if (!j.contains("camera")) throw_parse(where + ": missing 'camera'");
  const auto& cam = j.at("camera");
  s.camera.fx = json_get<double>(cam, "fx", where);
  s.camera.fy = json_get<double>(cam, "fy", where);
  s.camera.cx = json_get<double>(cam, "cx", where);
  s.camera.cy = json_get<double>(cam, "cy", where);
  s.camera.width = json_get<int>(cam, "width", where);
  s.camera.height = json_get<int>(cam, "height", where);

  auto vec3 = [&](const nlohmann::json& a, const std::string& ctx) {
    if (!a.is_array() || a.size() != 3)
      throw_parse(where + ": " + ctx + " must be [x,y,z]");
    return Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(),
                           a[2].get<double>());
  };

  if (j.contains("objects")) {
    for (const auto& jo : j.at("objects")) {
      SceneObject o;
      o.class_id = json_get<int>(jo, "class_id", where);
      o.class_name = json_get<std::string>(jo, "class_name", where);
      o.aabb_min = vec3(jo.at("aabb_min"), "object aabb_min");
      o.aabb_max = vec3(jo.at("aabb_max"), "object aabb_max");
      s.objects.push_back(std::move(o));
    }
  }
  if (!j.contains("waypoints") || !j.at("waypoints").is_array())
    throw_parse(where + ": missing 'waypoints'");
  for (const auto& w : j.at("waypoints"))
    s.waypoints.push_back(vec3(w, "waypoint"));

  s.speed = json_get_or(j, "speed", s.speed, where);
  s.frame_rate = json_get_or(j, "frame_rate", s.frame_rate, where);
  s.odom_rate = json_get_or(j, "odom_rate", s.odom_rate, where);
  s.pixel_sigma = json_get_or(j, "pixel_sigma", s.pixel_sigma, where);
  s.false_positive_rate =
      json_get_or(j, "false_positive_rate", s.false_positive_rate, where);
  s.miss_rate = json_get_or(j, "miss_rate", s.miss_rate, where);
  s.points_per_face = json_get_or(j, "points_per_face", s.points_per_face, where);
  s.points_per_wall = json_get_or(j, "points_per_wall", s.points_per_wall, where);
  if (j.contains("room")) {
    s.room = {vec3(j.at("room").at("aabb_min"), "room aabb_min"),
              vec3(j.at("room").at("aabb_max"), "room aabb_max")};
  }
  s.init_failure_prefix =
      json_get_or(j, "init_failure_prefix", s.init_failure_prefix, where);
  s.validate();
  return s;
}

namespace {

// Per-segment triangular speed profile: rest at every waypoint, peak speed at
// the segment midpoint. Segment durations are even multiples of the odometry
// step so the velocity is piecewise linear with breakpoints on the sample
// grid, which the trapezoidal rule integrates exactly.
struct FlightProfile {
  struct Segment {
    double t_start = 0.0;
    double duration = 0.0;
    double dist = 0.0;
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d dir = Eigen::Vector3d::UnitX();
    Eigen::Quaterniond cam_rot = Eigen::Quaterniond::Identity();  // camera->map
  };
  std::vector<Segment> segments;
  double total_time = 0.0;
  Eigen::Vector3d final_pos = Eigen::Vector3d::Zero();
  Eigen::Quaterniond final_rot = Eigen::Quaterniond::Identity();

  static FlightProfile build(const SceneSpec& spec) {
    FlightProfile p;
    double dt = 1.0 / spec.odom_rate;
    double t = 0.0;
    Eigen::Vector3d forward = Eigen::Vector3d::UnitX();
    for (size_t i = 0; i + 1 < spec.waypoints.size(); ++i) {
      Eigen::Vector3d d = spec.waypoints[i + 1] - spec.waypoints[i];
      double dist = d.norm();
      if (dist < 1e-9) continue;
      Segment s;
      s.t_start = t;
      s.dist = dist;
      s.origin = spec.waypoints[i];
      s.dir = d / dist;
      double raw = dist / spec.speed;
      s.duration = std::ceil(raw / (2.0 * dt)) * 2.0 * dt;
      Eigen::Vector3d horiz(s.dir.x(), s.dir.y(), 0.0);
      if (horiz.norm() > 1e-9) forward = horiz.normalized();
      // Camera axes in map coordinates: +z forward, +y down, +x right.
      Eigen::Vector3d down(0.0, 0.0, -1.0);
      Eigen::Vector3d right = down.cross(forward);
      Eigen::Matrix3d r;
      r.col(0) = right;
      r.col(1) = down;
      r.col(2) = forward;
      s.cam_rot = Eigen::Quaterniond(r);
      t += s.duration;
      p.segments.push_back(std::move(s));
    }
    if (p.segments.empty())
      throw_config("scene spec: waypoints describe no motion");
    p.total_time = t;
    const Segment& last = p.segments.back();
    p.final_pos = last.origin + last.dist * last.dir;
    p.final_rot = last.cam_rot;
    return p;
  }

  const Segment* segment_at(double t) const {
    for (const Segment& s : segments)
      if (t >= s.t_start - 1e-12 && t <= s.t_start + s.duration + 1e-12)
        return &s;
    return nullptr;
  }

  Eigen::Vector3d position(double t) const {
    if (t <= 0.0) return segments.front().origin;
    if (t >= total_time) return final_pos;
    const Segment* s = segment_at(t);
    double tau = t - s->t_start;
    double T = s->duration;
    double peak = 2.0 * s->dist / T;
    double arc;
    if (tau <= T / 2.0)
      arc = peak * tau * tau / T;
    else
      arc = s->dist - peak * (T - tau) * (T - tau) / T;
    return s->origin + arc * s->dir;
  }

  Eigen::Vector3d velocity(double t) const {
    if (t < 0.0 || t > total_time) return Eigen::Vector3d::Zero();
    const Segment* s = segment_at(t);
    double tau = t - s->t_start;
    double T = s->duration;
    double peak = 2.0 * s->dist / T;
    double speed = (tau <= T / 2.0) ? peak * 2.0 * tau / T
                                    : peak * 2.0 * (T - tau) / T;
    return speed * s->dir;
  }

  Eigen::Quaterniond rotation(double t) const {
    if (t <= 0.0) return segments.front().cam_rot;
    if (t >= total_time) return final_rot;
    return segment_at(t)->cam_rot;
  }
};

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::ordered_json vec3_json(const Eigen::Vector3d& v) {
  return nlohmann::ordered_json::array({v.x(), v.y(), v.z()});
}

}  // namespace

GroundTruth generate_session(const SceneSpec& spec,
                             const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  Rng rng(spec.seed);
  FlightProfile flight = FlightProfile::build(spec);

  double frame_dt = 1.0 / spec.frame_rate;
  size_t n_frames =
      static_cast<size_t>(std::floor(flight.total_time / frame_dt + 1e-9)) + 1;

  auto snap_to_frame = [&](double t) {
    return std::round(t / frame_dt) * frame_dt;
  };

  // Scale-estimation window; an optional failed attempt precedes it.
  SlamEventLog events;
  double t_search = snap_to_frame(0.10 * flight.total_time);
  double t_success = snap_to_frame(0.40 * flight.total_time);
  if (spec.init_failure_prefix) {
    events.events.emplace_back(0.0, SlamEvent::InitSearchStart);
    events.events.emplace_back(snap_to_frame(0.05 * flight.total_time),
                               SlamEvent::InitFailure);
  }
  events.events.emplace_back(t_search, SlamEvent::InitSearchStart);
  events.events.emplace_back(t_success, SlamEvent::InitSuccess);
  double baseline =
      (flight.position(t_success) - flight.position(t_search)).norm();
  if (baseline < 0.02)
    throw_config("scene spec: init window displacement below 2 cm, scale unobservable");

  // Trajectory at unit SLAM scale.
  std::vector<TrajectoryEntry> trajectory;
  trajectory.reserve(n_frames);
  for (size_t k = 0; k < n_frames; ++k) {
    double t = k * frame_dt;
    TrajectoryEntry e;
    e.timestamp = t;
    e.pose = PoseSE3(flight.rotation(t), flight.position(t) / spec.true_scale,
                     Frame::Camera, Frame::Map);
    trajectory.push_back(std::move(e));
  }

  // Metric world-frame odometry.
  std::vector<OdometrySample> odometry;
  double odom_dt = 1.0 / spec.odom_rate;
  size_t n_odom =
      static_cast<size_t>(std::round(flight.total_time / odom_dt)) + 1;
  odometry.reserve(n_odom);
  for (size_t k = 0; k < n_odom; ++k) {
    double t = k * odom_dt;
    odometry.push_back({t, flight.velocity(t)});
  }

  // Detections: project each object's corner hull, clip, perturb.
  std::vector<Detection2D> detections;
  const CameraIntrinsics& cam = spec.camera;
  for (size_t k = 0; k < n_frames; ++k) {
    double t = k * frame_dt;
    Eigen::Quaterniond q = flight.rotation(t);
    Eigen::Vector3d pos = flight.position(t);
    Eigen::Matrix3d r_cm = q.toRotationMatrix().transpose();  // map -> camera
    for (const SceneObject& obj : spec.objects) {
      double u_min = 1e30, u_max = -1e30, v_min = 1e30, v_max = -1e30;
      bool in_front = true;
      for (int c = 0; c < 8; ++c) {
        Eigen::Vector3d w((c & 1) ? obj.aabb_max.x() : obj.aabb_min.x(),
                          (c & 2) ? obj.aabb_max.y() : obj.aabb_min.y(),
                          (c & 4) ? obj.aabb_max.z() : obj.aabb_min.z());
        Eigen::Vector3d pc = r_cm * (w - pos);
        if (pc.z() < 0.1) {
          in_front = false;
          break;
        }
        double u = cam.fx * pc.x() / pc.z() + cam.cx;
        double v = cam.fy * pc.y() / pc.z() + cam.cy;
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
      }
      if (!in_front) continue;
      u_min = std::max(u_min, 0.0);
      v_min = std::max(v_min, 0.0);
      u_max = std::min(u_max, static_cast<double>(cam.width));
      v_max = std::min(v_max, static_cast<double>(cam.height));
      if (u_max - u_min < 4.0 || v_max - v_min < 4.0) continue;
      if (rng.uniform() < spec.miss_rate) continue;
      Detection2D d;
      d.frame_id = static_cast<int>(k);
      d.timestamp = t;
      d.class_id = obj.class_id;
      d.class_name = obj.class_name;
      d.x_min = u_min + rng.normal(0.0, spec.pixel_sigma);
      d.y_min = v_min + rng.normal(0.0, spec.pixel_sigma);
      d.x_max = u_max + rng.normal(0.0, spec.pixel_sigma);
      d.y_max = v_max + rng.normal(0.0, spec.pixel_sigma);
      d.x_min = std::clamp(d.x_min, 0.0, static_cast<double>(cam.width));
      d.x_max = std::clamp(d.x_max, 0.0, static_cast<double>(cam.width));
      d.y_min = std::clamp(d.y_min, 0.0, static_cast<double>(cam.height));
      d.y_max = std::clamp(d.y_max, 0.0, static_cast<double>(cam.height));
      if (!(d.x_min < d.x_max && d.y_min < d.y_max)) continue;
      d.confidence = 0.5 + 0.5 * rng.uniform();
      detections.push_back(std::move(d));
    }
    if (!spec.objects.empty() && rng.uniform() < spec.false_positive_rate) {
      const SceneObject& cls = spec.objects[static_cast<size_t>(
          rng.uniform() * static_cast<double>(spec.objects.size()))];
      Detection2D d;
      d.frame_id = static_cast<int>(k);
      d.timestamp = t;
      d.class_id = cls.class_id;
      d.class_name = cls.class_name;
      double bw = rng.uniform(20.0, 120.0);
      double bh = rng.uniform(20.0, 120.0);
      d.x_min = rng.uniform(0.0, cam.width - bw);
      d.y_min = rng.uniform(0.0, cam.height - bh);
      d.x_max = d.x_min + bw;
      d.y_max = d.y_min + bh;
      d.confidence = 0.5 + 0.5 * rng.uniform();
      detections.push_back(std::move(d));
    }
  }

  // Cloud: uniform samples on object faces, then vertical room walls,
  // written at unit SLAM scale.
  std::vector<SparseMapPoint> cloud;
  auto add_point = [&](const Eigen::Vector3d& p) {
    SparseMapPoint mp;
    mp.position = Point3(p / spec.true_scale, Frame::Map);
    mp.id = static_cast<int>(cloud.size());
    cloud.push_back(mp);
  };
  for (const SceneObject& obj : spec.objects) {
    const Eigen::Vector3d& lo = obj.aabb_min;
    const Eigen::Vector3d& hi = obj.aabb_max;
    for (int face = 0; face < 6; ++face) {
      int axis = face / 2;
      double fixed = (face % 2) ? hi[axis] : lo[axis];
      for (int n = 0; n < spec.points_per_face; ++n) {
        Eigen::Vector3d p;
        p[axis] = fixed;
        int a = (axis + 1) % 3, b = (axis + 2) % 3;
        p[a] = rng.uniform(lo[a], hi[a]);
        p[b] = rng.uniform(lo[b], hi[b]);
        add_point(p);
      }
    }
  }
  if (spec.room) {
    const auto& [lo, hi] = *spec.room;
    for (int wall = 0; wall < 4; ++wall) {
      for (int n = 0; n < spec.points_per_wall; ++n) {
        Eigen::Vector3d p;
        p.z() = rng.uniform(lo.z(), hi.z());
        switch (wall) {
          case 0: p.x() = rng.uniform(lo.x(), hi.x()); p.y() = lo.y(); break;
          case 1: p.x() = rng.uniform(lo.x(), hi.x()); p.y() = hi.y(); break;
          case 2: p.x() = lo.x(); p.y() = rng.uniform(lo.y(), hi.y()); break;
          default: p.x() = hi.x(); p.y() = rng.uniform(lo.y(), hi.y()); break;
        }
        add_point(p);
      }
    }
  }

  write_detections(out_dir / "detections.csv", detections);
  write_trajectory(out_dir / "trajectory.txt", trajectory);
  write_pointcloud(out_dir / "pointcloud.ply", cloud);
  write_odometry(out_dir / "odometry.csv", odometry);
  write_slam_events(out_dir / "slam_events.csv", events);

  nlohmann::ordered_json cal;
  cal["camera"] = {{"fx", cam.fx},     {"fy", cam.fy},
                   {"cx", cam.cx},     {"cy", cam.cy},
                   {"width", cam.width}, {"height", cam.height}};
  cal["body_T_camera"] = {{"translation", {0.0, 0.0, 0.0}},
                          {"quaternion", {0.0, 0.0, 0.0, 1.0}}};
  nlohmann::ordered_json allow = nlohmann::ordered_json::array();
  std::map<int, std::string> classes;
  for (const SceneObject& o : spec.objects) classes[o.class_id] = o.class_name;
  for (const auto& [id, name] : classes)
    allow.push_back({{"id", id}, {"name", name}});
  cal["class_allowlist"] = std::move(allow);
  write_json_file(out_dir / "calibration.json", cal);

  nlohmann::ordered_json cfg;
  cfg["session_id"] = spec.session_id;
  cfg["drone_id"] = spec.drone_id;
  cfg["inputs"] = {{"detections", "detections.csv"},
                   {"trajectory", "trajectory.txt"},
                   {"pointcloud", "pointcloud.ply"},
                   {"odometry", "odometry.csv"},
                   {"slam_events", "slam_events.csv"},
                   {"calibration", "calibration.json"}};
  cfg["odometry_frame"] = "world";
  cfg["render_resolution"] = 0.02;
  write_json_file(out_dir / "config.json", cfg);

  GroundTruth gt;
  gt.true_scale = spec.true_scale;
  gt.window_start = t_search;
  gt.window_end = t_success;
  gt.frame_count = n_frames;
  gt.objects = spec.objects;

  nlohmann::ordered_json gj;
  gj["true_scale"] = gt.true_scale;
  gj["window"] = {gt.window_start, gt.window_end};
  gj["frame_count"] = gt.frame_count;
  nlohmann::ordered_json objs = nlohmann::ordered_json::array();
  for (const SceneObject& o : spec.objects)
    objs.push_back({{"class_id", o.class_id},
                    {"class_name", o.class_name},
                    {"aabb_min", vec3_json(o.aabb_min)},
                    {"aabb_max", vec3_json(o.aabb_max)}});
  gj["objects"] = std::move(objs);
  write_json_file(out_dir / "ground_truth.json", gj);
  return gt;
}

std::vector<std::vector<int>> oracle_containment(
    const std::vector<SparseMapPoint>& points,
    const std::vector<BoundingVolume3D>& volumes) {
  std::vector<std::vector<int>> membership(volumes.size());
  for (size_t vi = 0; vi < volumes.size(); ++vi) {
    for (const SparseMapPoint& p : points) {
      bool inside = true;
      for (int axis = 0; axis < 3; ++axis) {
        double c = p.position.v[axis];
        if (c < volumes[vi].aabb_min[axis] || c > volumes[vi].aabb_max[axis])
          inside = false;
      }
      if (inside) membership[vi].push_back(p.id);
    }
  }
  return membership;
}

std::vector<BoundingVolume3D> oracle_merge(
    std::vector<BoundingVolume3D> volumes, const RefineConfig& cfg) {
  auto contains = [&](const BoundingVolume3D& a, const BoundingVolume3D& b) {
    if (a.class_id != b.class_id) return false;
    for (int axis = 0; axis < 3; ++axis) {
      if (b.aabb_min[axis] < a.aabb_min[axis] - cfg.containment_margin)
        return false;
      if (b.aabb_max[axis] > a.aabb_max[axis] + cfg.containment_margin)
        return false;
    }
    double va = (a.aabb_max - a.aabb_min).prod();
    double vb = (b.aabb_max - b.aabb_min).prod();
    return vb > 0.0 && va / vb <= cfg.volume_ratio_max;
  };
  auto merge = [](const BoundingVolume3D& a, const BoundingVolume3D& b) {
    double va = (a.aabb_max - a.aabb_min).prod();
    double vb = (b.aabb_max - b.aabb_min).prod();
    BoundingVolume3D out = (vb > va) ? b : a;
    out.appearances = a.appearances + b.appearances;
    std::vector<int> frames = a.source_frames;
    frames.insert(frames.end(), b.source_frames.begin(), b.source_frames.end());
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    out.source_frames = std::move(frames);
    std::vector<int> pts = a.member_points;
    pts.insert(pts.end(), b.member_points.begin(), b.member_points.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    out.member_points = std::move(pts);
    return out;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < volumes.size() && !changed; ++i) {
      for (size_t j = 0; j < volumes.size() && !changed; ++j) {
        if (i == j) continue;
        if (contains(volumes[i], volumes[j]) ||
            contains(volumes[j], volumes[i])) {
          BoundingVolume3D merged = (i < j) ? merge(volumes[i], volumes[j])
                                            : merge(volumes[j], volumes[i]);
          volumes[i] = std::move(merged);
          volumes.erase(volumes.begin() + static_cast<long>(j));
          changed = true;
        }
      }
    }
  }
  return volumes;
}

}  // namespace amap
