#include "core/volume_store.hpp"

#include <fstream>

#include "core/jsonio.hpp"

namespace amap {

namespace {

nlohmann::ordered_json vec3_json(const Eigen::Vector3d& v) {
  return nlohmann::ordered_json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() ||
      !j[1].is_number() || !j[2].is_number())
    throw_parse(where + ": expected [x, y, z]");
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                         j[2].get<double>());
}

}  // namespace

nlohmann::ordered_json volumes_to_json(
    const std::vector<BoundingVolume3D>& volumes) {
  nlohmann::ordered_json root;
  root["schema_version"] = 1;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BoundingVolume3D& v : volumes) {
    nlohmann::ordered_json jv;
    jv["class_id"] = v.class_id;
    jv["class_name"] = v.class_name;
    nlohmann::ordered_json corners = nlohmann::ordered_json::array();
    for (const auto& c : v.corners) corners.push_back(vec3_json(c));
    jv["corners"] = corners;
    jv["aabb_min"] = vec3_json(v.aabb_min);
    jv["aabb_max"] = vec3_json(v.aabb_max);
    jv["appearances"] = v.appearances;
    jv["source_frames"] = v.source_frames;
    jv["member_points"] = v.member_points;
    jv["front_depth"] = v.front_depth;
    jv["rear_depth"] = v.rear_depth;
    arr.push_back(std::move(jv));
  }
  root["volumes"] = std::move(arr);
  return root;
}

std::vector<BoundingVolume3D> volumes_from_json(const nlohmann::json& j) {
  const std::string where = "volumes json";
  if (!j.contains("volumes") || !j.at("volumes").is_array())
    throw_parse(where + ": missing 'volumes' array");
  std::vector<BoundingVolume3D> out;
  for (const auto& jv : j.at("volumes")) {
    BoundingVolume3D v;
    v.class_id = json_get<int>(jv, "class_id", where);
    v.class_name = json_get<std::string>(jv, "class_name", where);
    if (!jv.contains("corners") || !jv.at("corners").is_array() ||
        jv.at("corners").size() != 8)
      throw_parse(where + ": 'corners' must hold 8 points");
    for (size_t i = 0; i < 8; ++i)
      v.corners[i] = vec3_from(jv.at("corners")[i], where);
    v.aabb_min = vec3_from(jv.at("aabb_min"), where);
    v.aabb_max = vec3_from(jv.at("aabb_max"), where);
    if (!(v.aabb_min.array() < v.aabb_max.array()).all())
      throw_parse(where + ": aabb_min must be below aabb_max");
    v.appearances = json_get<int>(jv, "appearances", where);
    if (v.appearances < 1) throw_parse(where + ": appearances must be >= 1");
    v.source_frames = json_get_or<std::vector<int>>(jv, "source_frames", {}, where);
    v.member_points = json_get_or<std::vector<int>>(jv, "member_points", {}, where);
    v.front_depth = json_get_or<double>(jv, "front_depth", 0.0, where);
    v.rear_depth = json_get_or<double>(jv, "rear_depth", 0.0, where);
    out.push_back(std::move(v));
  }
  return out;
}

void save_volumes(const std::filesystem::path& path,
                  const std::vector<BoundingVolume3D>& volumes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write file: " + path.string());
  out << volumes_to_json(volumes).dump(2) << '\n';
}

std::vector<BoundingVolume3D> load_volumes(const std::filesystem::path& path) {
  return volumes_from_json(load_json(path));
}

}  // namespace amap
