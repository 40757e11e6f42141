#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "core/volumes.hpp"

namespace amap {

// Documented intermediate format so `lift` and `refine` compose via files.
nlohmann::ordered_json volumes_to_json(const std::vector<BoundingVolume3D>& volumes);
std::vector<BoundingVolume3D> volumes_from_json(const nlohmann::json& j);

void save_volumes(const std::filesystem::path& path,
                  const std::vector<BoundingVolume3D>& volumes);
std::vector<BoundingVolume3D> load_volumes(const std::filesystem::path& path);

}  // namespace amap
