#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "core/error.hpp"

namespace amap {

inline nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open file: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw_parse(path.filename().string() + ": invalid JSON");
  return j;
}

template <typename T>
T json_get(const nlohmann::json& j, const std::string& key,
           const std::string& where) {
  if (!j.contains(key)) throw_parse(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_parse(where + ": bad value for key '" + key + "'");
  }
}

template <typename T>
T json_get_or(const nlohmann::json& j, const std::string& key, T fallback,
              const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw_parse(where + ": bad value for key '" + key + "'");
  }
}

}  // namespace amap
