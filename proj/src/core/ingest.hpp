#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "core/records.hpp"

namespace amap {

struct DetectionParseResult {
  std::vector<Detection2D> detections;  // file order
  size_t dropped_by_class = 0;          // rows outside the allowlist
};

// CSV schema: frame_id,timestamp,class_id,class_name,x_min,y_min,x_max,y_max,confidence
// Boxes touching the image edges are clamped; boxes fully outside are rejected.
DetectionParseResult parse_detections(const std::filesystem::path& path,
                                      int image_width, int image_height,
                                      const std::map<int, std::string>& allowlist);

// One pose per line: timestamp tx ty tz qx qy qz qw. '#' comments allowed.
std::vector<TrajectoryEntry> parse_trajectory(const std::filesystem::path& path);

// ASCII PLY 1.0; consumes the vertex element (x y z), skips other elements.
std::vector<SparseMapPoint> parse_pointcloud(const std::filesystem::path& path);

// CSV schema: timestamp,vx,vy,vz
std::vector<OdometrySample> parse_odometry(const std::filesystem::path& path);

// CSV schema: timestamp,event with event in
// {InitSearchStart, InitSuccess, InitFailure}
SlamEventLog parse_slam_events(const std::filesystem::path& path);

// Paired writers; parse(write(x)) == x on valid data.
void write_detections(const std::filesystem::path& path,
                      const std::vector<Detection2D>& dets);
void write_trajectory(const std::filesystem::path& path,
                      const std::vector<TrajectoryEntry>& entries);
void write_pointcloud(const std::filesystem::path& path,
                      const std::vector<SparseMapPoint>& points);
void write_odometry(const std::filesystem::path& path,
                    const std::vector<OdometrySample>& samples);
void write_slam_events(const std::filesystem::path& path,
                       const SlamEventLog& log);

}  // namespace amap
