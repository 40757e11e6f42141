#include "core/mapgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/jsonio.hpp"
#include "core/textio.hpp"

namespace amap {

namespace {

constexpr double kPadding = 0.5;  // meters around the content bounds

struct Bounds {
  double min_x, min_y, max_x, max_y;
};

Bounds content_bounds(const AccessibilityMap& map) {
  double inf = std::numeric_limits<double>::infinity();
  Bounds b{inf, inf, -inf, -inf};
  auto grow = [&](double x, double y) {
    b.min_x = std::min(b.min_x, x);
    b.min_y = std::min(b.min_y, y);
    b.max_x = std::max(b.max_x, x);
    b.max_y = std::max(b.max_y, y);
  };
  for (const auto& p : map.cloud) grow(p.position.x(), p.position.y());
  for (const auto& e : map.trajectory)
    grow(e.pose.translation().x(), e.pose.translation().y());
  for (const auto& v : map.volumes) {
    grow(v.aabb_min.x(), v.aabb_min.y());
    grow(v.aabb_max.x(), v.aabb_max.y());
  }
  if (!(b.min_x <= b.max_x))
    throw_pipeline("render: empty map, nothing to draw");
  b.min_x -= kPadding;
  b.min_y -= kPadding;
  b.max_x += kPadding;
  b.max_y += kPadding;
  return b;
}

double round6(double v) {
  double r = std::round(v * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // avoid -0
}

nlohmann::ordered_json vec3_round6(const Eigen::Vector3d& v) {
  return nlohmann::ordered_json::array(
      {round6(v.x()), round6(v.y()), round6(v.z())});
}

std::string px(double v) { return fmt_fixed(v, 2); }

}  // namespace

std::string render_topdown_svg(const AccessibilityMap& map, double resolution) {
  if (!(resolution > 0.0)) throw_config("render: resolution must be > 0");
  Bounds b = content_bounds(map);
  double w = (b.max_x - b.min_x) / resolution;
  double h = (b.max_y - b.min_y) / resolution;
  // Map +y up on screen: flip the vertical axis.
  auto X = [&](double x) { return (x - b.min_x) / resolution; };
  auto Y = [&](double y) { return (b.max_y - y) / resolution; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(w)
      << "\" height=\"" << px(h) << "\" viewBox=\"0 0 " << px(w) << ' '
      << px(h) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  svg << "<g fill=\"#555555\">\n";
  for (const auto& p : map.cloud)
    svg << "<circle cx=\"" << px(X(p.position.x())) << "\" cy=\""
        << px(Y(p.position.y())) << "\" r=\"1\"/>\n";
  svg << "</g>\n";

  if (!map.trajectory.empty()) {
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < map.trajectory.size(); ++i) {
      const auto& t = map.trajectory[i].pose.translation();
      if (i) svg << ' ';
      svg << px(X(t.x())) << ',' << px(Y(t.y()));
    }
    svg << "\"/>\n";
  }

  for (const auto& v : map.volumes) {
    double rx = X(v.aabb_min.x());
    double ry = Y(v.aabb_max.y());
    double rw = (v.aabb_max.x() - v.aabb_min.x()) / resolution;
    double rh = (v.aabb_max.y() - v.aabb_min.y()) / resolution;
    svg << "<rect x=\"" << px(rx) << "\" y=\"" << px(ry) << "\" width=\""
        << px(rw) << "\" height=\"" << px(rh)
        << "\" fill=\"#d62728\" fill-opacity=\"0.25\" stroke=\"#d62728\" "
           "stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << px(rx + 2) << "\" y=\"" << px(ry + 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">"
        << v.class_name << " (" << v.appearances << ")</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_topdown_pgm(const AccessibilityMap& map, double resolution) {
  if (!(resolution > 0.0)) throw_config("render: resolution must be > 0");
  Bounds b = content_bounds(map);
  int w = static_cast<int>(std::ceil((b.max_x - b.min_x) / resolution));
  int h = static_cast<int>(std::ceil((b.max_y - b.min_y) / resolution));
  if (w <= 0 || h <= 0 || static_cast<long long>(w) * h > 64LL * 1024 * 1024)
    throw_config("render: raster dimensions out of range");
  std::vector<unsigned char> grid(static_cast<size_t>(w) * h, 255);
  auto col = [&](double x) {
    return std::clamp(static_cast<int>((x - b.min_x) / resolution), 0, w - 1);
  };
  auto row = [&](double y) {
    return std::clamp(static_cast<int>((b.max_y - y) / resolution), 0, h - 1);
  };
  for (const auto& p : map.cloud) {
    unsigned char& c = grid[static_cast<size_t>(row(p.position.y())) * w +
                            col(p.position.x())];
    if (c > 128) c = 128;
  }
  for (const auto& v : map.volumes) {
    int c0 = col(v.aabb_min.x()), c1 = col(v.aabb_max.x());
    int r0 = row(v.aabb_max.y()), r1 = row(v.aabb_min.y());
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c)
        grid[static_cast<size_t>(r) * w + c] = 0;
  }
  std::ostringstream out;
  out << "P2\n" << w << ' ' << h << "\n255\n";
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (c) out << ' ';
      out << static_cast<int>(grid[static_cast<size_t>(r) * w + c]);
    }
    out << '\n';
  }
  return out.str();
}

nlohmann::ordered_json emit_report(const AccessibilityMap& map) {
  nlohmann::ordered_json root;
  root["schema_version"] = 1;
  root["session"] = {{"session_id", map.session_id},
                     {"drone_id", map.drone_id}};
  root["scale"] = {
      {"factor", round6(map.scale.factor)},
      {"odom_displacement", round6(map.scale.odom_displacement)},
      {"slam_displacement", round6(map.scale.slam_displacement)},
      {"window", {round6(map.scale.t_start), round6(map.scale.t_end)}}};
  root["stage_counts"] = map.report.stage_counts;
  nlohmann::ordered_json removals;
  for (const auto& [reason, count] : map.report.removals)
    removals[reason] = count;
  root["removals"] = std::move(removals);

  nlohmann::ordered_json vols = nlohmann::ordered_json::array();
  for (const auto& v : map.volumes) {
    nlohmann::ordered_json jv;
    jv["class_id"] = v.class_id;
    jv["class_name"] = v.class_name;
    jv["aabb_min"] = vec3_round6(v.aabb_min);
    jv["aabb_max"] = vec3_round6(v.aabb_max);
    jv["appearances"] = v.appearances;
    jv["source_frame_count"] = v.source_frames.size();
    jv["front_depth"] = round6(v.front_depth);
    jv["rear_depth"] = round6(v.rear_depth);
    vols.push_back(std::move(jv));
  }
  root["volumes"] = std::move(vols);
  root["config"] = map.config_snapshot;
  return root;
}

std::string emit_annotated_cloud(const AccessibilityMap& map) {
  std::ostringstream out;
  size_t n_vertices = map.cloud.size() + 8 * map.volumes.size();
  size_t n_edges = 12 * map.volumes.size();
  out << "ply\nformat ascii 1.0\n"
      << "comment cloud_points " << map.cloud.size() << '\n'
      << "comment volumes " << map.volumes.size() << '\n';
  for (const auto& v : map.volumes)
    out << "comment volume " << v.class_name << " appearances "
        << v.appearances << '\n';
  out << "element vertex " << n_vertices
      << "\nproperty double x\nproperty double y\nproperty double z\n"
      << "element edge " << n_edges
      << "\nproperty int vertex1\nproperty int vertex2\nend_header\n";
  for (const auto& p : map.cloud)
    out << fmt_double(p.position.x()) << ' ' << fmt_double(p.position.y())
        << ' ' << fmt_double(p.position.z()) << '\n';
  for (const auto& v : map.volumes)
    for (const auto& c : v.corners)
      out << fmt_double(c.x()) << ' ' << fmt_double(c.y()) << ' '
          << fmt_double(c.z()) << '\n';
  // Corner order: 0..3 front face loop, 4..7 rear face loop.
  static const int kEdges[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                    {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                    {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  for (size_t i = 0; i < map.volumes.size(); ++i) {
    size_t base = map.cloud.size() + 8 * i;
    for (const auto& e : kEdges)
      out << base + e[0] << ' ' << base + e[1] << '\n';
  }
  return out.str();
}

ReportSummary parse_report(const nlohmann::json& j) {
  const std::string where = "report json";
  ReportSummary s;
  if (!j.contains("stage_counts") || !j.at("stage_counts").is_array() ||
      j.at("stage_counts").size() != 4)
    throw_parse(where + ": missing stage_counts[4]");
  for (size_t i = 0; i < 4; ++i)
    s.stage_counts[i] = j.at("stage_counts")[i].get<size_t>();
  if (!j.contains("scale")) throw_parse(where + ": missing scale");
  s.scale_factor = json_get<double>(j.at("scale"), "factor", where);
  if (!j.contains("volumes") || !j.at("volumes").is_array())
    throw_parse(where + ": missing volumes array");
  for (const auto& jv : j.at("volumes")) {
    ReportSummary::VolumeSummary v;
    v.class_id = json_get<int>(jv, "class_id", where);
    v.class_name = json_get<std::string>(jv, "class_name", where);
    auto getv = [&](const char* key) {
      const auto& a = jv.at(key);
      if (!a.is_array() || a.size() != 3)
        throw_parse(where + ": bad aabb entry");
      return Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(),
                             a[2].get<double>());
    };
    v.aabb_min = getv("aabb_min");
    v.aabb_max = getv("aabb_max");
    v.appearances = json_get<int>(jv, "appearances", where);
    s.volumes.push_back(std::move(v));
  }
  return s;
}

}  // namespace amap
