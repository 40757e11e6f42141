#include "core/ingest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "core/textio.hpp"

namespace amap {

const char* slam_event_name(SlamEvent e) {
  switch (e) {
    case SlamEvent::InitSearchStart: return "InitSearchStart";
    case SlamEvent::InitSuccess: return "InitSuccess";
    case SlamEvent::InitFailure: return "InitFailure";
  }
  return "?";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_lines(const std::string& text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  std::string_view sv(text);
  while (start <= sv.size()) {
    size_t pos = sv.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < sv.size()) lines.push_back(sv.substr(start));
      break;
    }
    lines.push_back(sv.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

[[noreturn]] void bad_row(const std::filesystem::path& path, size_t line,
                          const std::string& what) {
  throw_parse(path.filename().string() + ":" + std::to_string(line) + ": " +
              what);
}

void check_header(const std::filesystem::path& path,
                  const std::vector<std::string_view>& got,
                  const std::vector<std::string>& want) {
  for (size_t i = 0; i < want.size(); ++i) {
    if (i >= got.size() || std::string(trim(got[i])) != want[i])
      throw_parse(path.filename().string() + ": missing column '" + want[i] +
                  "'");
  }
  if (got.size() != want.size())
    throw_parse(path.filename().string() + ": unexpected extra columns");
}

}  // namespace

DetectionParseResult parse_detections(
    const std::filesystem::path& path, int image_width, int image_height,
    const std::map<int, std::string>& allowlist) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).empty())
    throw_parse(path.filename().string() + ": empty file");
  check_header(path, split(lines[0], ','),
               {"frame_id", "timestamp", "class_id", "class_name", "x_min",
                "y_min", "x_max", "y_max", "confidence"});

  DetectionParseResult res;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 9) bad_row(path, i + 1, "expected 9 fields");
    auto frame_id = parse_int(cells[0]);
    auto ts = parse_double(cells[1]);
    auto class_id = parse_int(cells[2]);
    auto x_min = parse_double(cells[4]);
    auto y_min = parse_double(cells[5]);
    auto x_max = parse_double(cells[6]);
    auto y_max = parse_double(cells[7]);
    auto conf = parse_double(cells[8]);
    if (!frame_id || !ts || !class_id || !x_min || !y_min || !x_max || !y_max ||
        !conf)
      bad_row(path, i + 1, "unparseable numeric field");
    if (*frame_id < 0) bad_row(path, i + 1, "negative frame_id");
    if (!std::isfinite(*ts)) bad_row(path, i + 1, "non-finite timestamp");
    if (!std::isfinite(*x_min) || !std::isfinite(*y_min) ||
        !std::isfinite(*x_max) || !std::isfinite(*y_max))
      bad_row(path, i + 1, "non-finite box coordinate");
    if (!(*conf >= 0.0 && *conf <= 1.0))
      bad_row(path, i + 1, "confidence outside [0,1]");
    if (!(*x_min < *x_max && *y_min < *y_max))
      bad_row(path, i + 1, "degenerate box (min >= max)");

    Detection2D d;
    d.frame_id = static_cast<int>(*frame_id);
    d.timestamp = *ts;
    d.class_id = static_cast<int>(*class_id);
    d.class_name = std::string(trim(cells[3]));
    // Edge-touching boxes are clamped; fully outside is rejected.
    d.x_min = std::max(*x_min, 0.0);
    d.y_min = std::max(*y_min, 0.0);
    d.x_max = std::min(*x_max, static_cast<double>(image_width));
    d.y_max = std::min(*y_max, static_cast<double>(image_height));
    if (!(d.x_min < d.x_max && d.y_min < d.y_max))
      bad_row(path, i + 1, "box does not intersect the image");
    d.confidence = *conf;

    auto it = allowlist.find(d.class_id);
    if (it == allowlist.end()) {
      ++res.dropped_by_class;
      continue;
    }
    res.detections.push_back(std::move(d));
  }
  return res;
}

std::vector<TrajectoryEntry> parse_trajectory(
    const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  std::vector<TrajectoryEntry> out;
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row{std::string(line)};
    std::string tok;
    double f[8];
    int n = 0;
    while (row >> tok) {
      if (n >= 8) bad_row(path, i + 1, "expected 8 fields");
      auto v = parse_double(tok);
      if (!v) bad_row(path, i + 1, "unparseable field '" + tok + "'");
      f[n++] = *v;
    }
    if (n != 8) bad_row(path, i + 1, "expected 8 fields");
    for (int k = 0; k < 8; ++k)
      if (!std::isfinite(f[k])) bad_row(path, i + 1, "non-finite value");
    if (!out.empty() && !(f[0] > out.back().timestamp))
      bad_row(path, i + 1, "non-monotonic timestamp");
    Eigen::Quaterniond q(f[7], f[4], f[5], f[6]);  // w, x, y, z
    if (std::abs(q.norm() - 1.0) > 1e-3)
      bad_row(path, i + 1, "denormal quaternion (|norm - 1| > 1e-3)");
    TrajectoryEntry e;
    e.timestamp = f[0];
    e.pose = PoseSE3(q, Eigen::Vector3d(f[1], f[2], f[3]), Frame::Camera,
                     Frame::Map);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<SparseMapPoint> parse_pointcloud(
    const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  size_t i = 0;
  auto next_line = [&]() -> std::string_view {
    while (i < lines.size()) {
      std::string_view l = trim(lines[i]);
      ++i;
      if (!l.empty()) return l;
    }
    return {};
  };

  if (std::string(next_line()) != "ply")
    throw_parse(path.filename().string() + ": bad header, expected 'ply'");
  if (std::string(next_line()) != "format ascii 1.0")
    throw_parse(path.filename().string() +
                ": bad header, expected 'format ascii 1.0'");

  struct Element {
    std::string name;
    size_t count = 0;
    std::vector<std::string> properties;
    bool has_list = false;
  };
  std::vector<Element> elements;
  while (true) {
    std::string_view l = trim(i < lines.size() ? lines[i] : std::string_view{});
    if (i >= lines.size())
      throw_parse(path.filename().string() + ": bad header, missing end_header");
    ++i;
    if (l == "end_header") break;
    auto toks = split(l, ' ');
    if (toks.empty() || toks[0] == "comment" || toks[0].empty()) continue;
    if (toks[0] == "element") {
      if (toks.size() != 3) throw_parse(path.filename().string() + ": bad element line");
      auto cnt = parse_int(toks[2]);
      if (!cnt || *cnt < 0) throw_parse(path.filename().string() + ": bad element count");
      elements.push_back({std::string(toks[1]), static_cast<size_t>(*cnt), {}, false});
    } else if (toks[0] == "property") {
      if (elements.empty() || toks.size() < 3)
        throw_parse(path.filename().string() + ": property outside element");
      if (toks[1] == "list")
        elements.back().has_list = true;
      else
        elements.back().properties.push_back(std::string(toks.back()));
    } else {
      throw_parse(path.filename().string() + ": unknown header line");
    }
  }

  std::vector<SparseMapPoint> out;
  bool seen_vertex = false;
  for (const Element& el : elements) {
    if (el.name == "vertex") {
      seen_vertex = true;
      if (el.has_list)
        throw_parse(path.filename().string() + ": list property on vertex");
      int ix = -1, iy = -1, iz = -1;
      for (size_t k = 0; k < el.properties.size(); ++k) {
        if (el.properties[k] == "x") ix = static_cast<int>(k);
        if (el.properties[k] == "y") iy = static_cast<int>(k);
        if (el.properties[k] == "z") iz = static_cast<int>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0)
        throw_parse(path.filename().string() + ": vertex element lacks x y z");
      for (size_t row = 0; row < el.count; ++row) {
        std::string_view l = next_line();
        if (l.empty())
          throw_parse(path.filename().string() + ": vertex count mismatch (" +
                      std::to_string(el.count) + " declared, " +
                      std::to_string(row) + " found)");
        std::istringstream rs{std::string(l)};
        std::vector<double> vals;
        std::string tok;
        while (rs >> tok) {
          auto v = parse_double(tok);
          if (!v) bad_row(path, i, "unparseable vertex field");
          vals.push_back(*v);
        }
        if (vals.size() != el.properties.size())
          bad_row(path, i, "vertex field count mismatch");
        double x = vals[ix], y = vals[iy], z = vals[iz];
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
          bad_row(path, i, "non-finite vertex coordinate");
        SparseMapPoint p;
        p.position = Point3(x, y, z, Frame::Map);
        p.id = static_cast<int>(out.size());
        out.push_back(p);
      }
    } else {
      for (size_t row = 0; row < el.count; ++row) {
        if (next_line().empty())
          throw_parse(path.filename().string() + ": element '" + el.name +
                      "' row count mismatch");
      }
    }
  }
  if (!seen_vertex)
    throw_parse(path.filename().string() + ": no vertex element");
  return out;
}

std::vector<OdometrySample> parse_odometry(const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).empty())
    throw_parse(path.filename().string() + ": empty file");
  check_header(path, split(lines[0], ','), {"timestamp", "vx", "vy", "vz"});
  std::vector<OdometrySample> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 4) bad_row(path, i + 1, "expected 4 fields");
    double f[4];
    for (int k = 0; k < 4; ++k) {
      auto v = parse_double(cells[k]);
      if (!v || !std::isfinite(*v))
        bad_row(path, i + 1, "unparseable or non-finite field");
      f[k] = *v;
    }
    if (!out.empty() && !(f[0] > out.back().timestamp))
      bad_row(path, i + 1, "non-monotonic timestamp");
    out.push_back({f[0], Eigen::Vector3d(f[1], f[2], f[3])});
  }
  return out;
}

SlamEventLog parse_slam_events(const std::filesystem::path& path) {
  std::string text = read_file(path);
  auto lines = split_lines(text);
  if (lines.empty() || trim(lines[0]).empty())
    throw_parse(path.filename().string() + ": empty file");
  check_header(path, split(lines[0], ','), {"timestamp", "event"});
  SlamEventLog log;
  bool searching = false;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 2) bad_row(path, i + 1, "expected 2 fields");
    auto ts = parse_double(cells[0]);
    if (!ts || !std::isfinite(*ts))
      bad_row(path, i + 1, "unparseable timestamp");
    std::string name{trim(cells[1])};
    SlamEvent ev;
    if (name == "InitSearchStart")
      ev = SlamEvent::InitSearchStart;
    else if (name == "InitSuccess")
      ev = SlamEvent::InitSuccess;
    else if (name == "InitFailure")
      ev = SlamEvent::InitFailure;
    else
      bad_row(path, i + 1, "unknown event '" + name + "'");
    if (!log.events.empty() && !(*ts > log.events.back().first))
      bad_row(path, i + 1, "non-monotonic timestamp");
    if (ev == SlamEvent::InitSearchStart) searching = true;
    if (ev == SlamEvent::InitSuccess) {
      if (!searching)
        bad_row(path, i + 1, "InitSuccess without preceding InitSearchStart");
      searching = false;
    }
    log.events.emplace_back(*ts, ev);
  }
  return log;
}

void write_detections(const std::filesystem::path& path,
                      const std::vector<Detection2D>& dets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << "frame_id,timestamp,class_id,class_name,x_min,y_min,x_max,y_max,confidence\n";
  for (const Detection2D& d : dets) {
    out << d.frame_id << ',' << fmt_double(d.timestamp) << ',' << d.class_id
        << ',' << d.class_name << ',' << fmt_double(d.x_min) << ','
        << fmt_double(d.y_min) << ',' << fmt_double(d.x_max) << ','
        << fmt_double(d.y_max) << ',' << fmt_double(d.confidence) << '\n';
  }
}

void write_trajectory(const std::filesystem::path& path,
                      const std::vector<TrajectoryEntry>& entries) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << "# timestamp tx ty tz qx qy qz qw\n";
  for (const TrajectoryEntry& e : entries) {
    const auto& t = e.pose.translation();
    const auto& q = e.pose.rotation();
    out << fmt_double(e.timestamp) << ' ' << fmt_double(t.x()) << ' '
        << fmt_double(t.y()) << ' ' << fmt_double(t.z()) << ' '
        << fmt_double(q.x()) << ' ' << fmt_double(q.y()) << ' '
        << fmt_double(q.z()) << ' ' << fmt_double(q.w()) << '\n';
  }
}

void write_pointcloud(const std::filesystem::path& path,
                      const std::vector<SparseMapPoint>& points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const SparseMapPoint& p : points) {
    out << fmt_double(p.position.x()) << ' ' << fmt_double(p.position.y())
        << ' ' << fmt_double(p.position.z()) << '\n';
  }
}

void write_odometry(const std::filesystem::path& path,
                    const std::vector<OdometrySample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << "timestamp,vx,vy,vz\n";
  for (const OdometrySample& s : samples) {
    out << fmt_double(s.timestamp) << ',' << fmt_double(s.velocity.x()) << ','
        << fmt_double(s.velocity.y()) << ',' << fmt_double(s.velocity.z())
        << '\n';
  }
}

void write_slam_events(const std::filesystem::path& path,
                       const SlamEventLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << "timestamp,event\n";
  for (const auto& [ts, ev] : log.events)
    out << fmt_double(ts) << ',' << slam_event_name(ev) << '\n';
}

}  // namespace amap
