#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/refine.hpp"
#include "core/synth.hpp"

using namespace amap;

namespace {

BoundingVolume3D vol(double x0, double y0, double z0, double x1, double y1,
                     double z1, int cls = 1, int appearances = 1) {
  BoundingVolume3D v;
  v.class_id = cls;
  v.class_name = "c" + std::to_string(cls);
  v.aabb_min = {x0, y0, z0};
  v.aabb_max = {x1, y1, z1};
  v.appearances = appearances;
  for (auto& c : v.corners) c = v.aabb_min;
  v.corners[6] = v.aabb_max;
  return v;
}

RefineConfig defaults() { return RefineConfig{}; }

int total_appearances(const std::vector<BoundingVolume3D>& vs) {
  int n = 0;
  for (const auto& v : vs) n += v.appearances;
  return n;
}

std::vector<BoundingVolume3D> random_instance(std::mt19937_64& rng, int count) {
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  // Clusters are far apart and every same-class member of a cluster is a
  // scaled copy of one base shape with tiny center jitter, so each pair
  // mutually satisfies containment and the merge outcome is order-robust.
  std::vector<BoundingVolume3D> out;
  int clusters = 1 + static_cast<int>(rng() % 5);
  for (int c = 0; c < clusters && static_cast<int>(out.size()) < count; ++c) {
    Eigen::Vector3d center(c * 40.0, uni(-2, 2), uni(-2, 2));
    int cls = 1 + static_cast<int>(rng() % 3);
    Eigen::Vector3d base(uni(0.3, 0.9), uni(0.3, 0.9), uni(0.3, 0.9));
    int members = 1 + static_cast<int>(rng() % 6);
    for (int m = 0; m < members && static_cast<int>(out.size()) < count; ++m) {
      double s = uni(0.7, 1.0);
      Eigen::Vector3d half = s * base;
      Eigen::Vector3d jitter(uni(-0.01, 0.01), uni(-0.01, 0.01),
                             uni(-0.01, 0.01));
      Eigen::Vector3d lo = center - half + jitter;
      Eigen::Vector3d hi = center + half + jitter;
      out.push_back(vol(lo.x(), lo.y(), lo.z(), hi.x(), hi.y(), hi.z(),
                        rng() % 4 == 0 ? cls + 3 : cls,
                        1 + static_cast<int>(rng() % 5)));
    }
    if (rng() % 3 == 0) {
      // Stage-1 fodder: too small or too big, isolated by the filter.
      bool tiny = rng() % 2 == 0;
      double h = tiny ? 0.05 : 1.5;
      Eigen::Vector3d off(0, 10, 0);
      Eigen::Vector3d lo = center + off - Eigen::Vector3d(h, h, h);
      Eigen::Vector3d hi = center + off + Eigen::Vector3d(h, h, h);
      out.push_back(
          vol(lo.x(), lo.y(), lo.z(), hi.x(), hi.y(), hi.z(), cls, 1));
    }
  }
  return out;
}

bool same_sets(std::vector<BoundingVolume3D> a,
               std::vector<BoundingVolume3D> b) {
  if (a.size() != b.size()) return false;
  auto key = [](const BoundingVolume3D& v) {
    return std::make_tuple(v.class_id, v.aabb_min.x(), v.aabb_min.y(),
                           v.aabb_min.z(), v.aabb_max.x(), v.aabb_max.y(),
                           v.aabb_max.z(), v.appearances);
  };
  auto lt = [&](const BoundingVolume3D& x, const BoundingVolume3D& y) {
    return key(x) < key(y);
  };
  std::sort(a.begin(), a.end(), lt);
  std::sort(b.begin(), b.end(), lt);
  for (size_t i = 0; i < a.size(); ++i)
    if (key(a[i]) != key(b[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("valid_object enforces the volume bounds") {
  auto cfg = defaults();
  CHECK(valid_object(vol(0, 0, 0, 1, 1, 1), cfg));          // 1 m^3
  CHECK(valid_object(vol(0, 0, 0, 2, 2, 2), cfg));          // 8 m^3, inclusive
  CHECK(valid_object(vol(0, 0, 0, 0.5, 0.2, 0.1), cfg));    // 0.01, inclusive
  CHECK_FALSE(valid_object(vol(0, 0, 0, 0.1, 0.1, 0.1), cfg));  // too small
  CHECK_FALSE(valid_object(vol(0, 0, 0, 2.1, 2, 2), cfg));      // too large
}

TEST_CASE("volume_contains needs nesting, same class and a sane ratio") {
  auto cfg = defaults();
  auto outer = vol(0, 0, 0, 2, 2, 2);
  auto inner = vol(0.5, 0.5, 0.5, 1.5, 1.5, 1.5);
  CHECK(volume_contains(outer, inner, cfg));
  CHECK_FALSE(volume_contains(inner, outer, cfg));

  auto other_class = vol(0.5, 0.5, 0.5, 1.5, 1.5, 1.5, 2);
  CHECK_FALSE(volume_contains(outer, other_class, cfg));

  // 8 m^3 vs 0.025 m^3 exceeds the ratio cap of 10.
  auto tiny = vol(0.9, 0.9, 0.9, 1.1, 1.4, 1.15);
  CHECK(tiny.aabb_volume() < outer.aabb_volume() / cfg.volume_ratio_max);
  CHECK_FALSE(volume_contains(outer, tiny, cfg));
}

TEST_CASE("containment margin dilates the container") {
  auto cfg = defaults();
  auto a = vol(0, 0, 0, 1, 1, 1);
  auto b_inside_margin = vol(-0.05, 0, 0, 1.05, 1, 1);
  auto b_outside_margin = vol(-0.15, 0, 0, 1, 1, 1);
  CHECK(volume_contains(a, b_inside_margin, cfg));
  CHECK_FALSE(volume_contains(a, b_outside_margin, cfg));
}

TEST_CASE("merge keeps the bigger geometry and sums appearances") {
  auto big = vol(0, 0, 0, 2, 2, 2, 1, 3);
  big.source_frames = {1, 2};
  big.member_points = {10};
  auto small = vol(0.5, 0.5, 0.5, 1.5, 1.5, 1.5, 1, 2);
  small.source_frames = {2, 5};
  small.member_points = {10, 11};

  auto m = merge_volumes(big, small);
  CHECK(m.aabb_min == big.aabb_min);
  CHECK(m.aabb_max == big.aabb_max);
  CHECK(m.appearances == 5);
  CHECK(m.source_frames == std::vector<int>{1, 2, 5});
  CHECK(m.member_points == std::vector<int>{10, 11});

  auto m2 = merge_volumes(small, big);
  CHECK(m2.aabb_min == big.aabb_min);
  CHECK(m2.appearances == 5);
}

TEST_CASE("merge of equal volumes keeps the first operand") {
  auto a = vol(0, 0, 0, 1, 1, 1, 1, 1);
  a.front_depth = 2.0;
  auto b = vol(3, 3, 3, 4, 4, 4, 1, 1);
  b.front_depth = 7.0;
  auto m = merge_volumes(a, b);
  CHECK(m.aabb_min == a.aabb_min);
  CHECK(m.front_depth == 2.0);
  CHECK(m.appearances == 2);
}

TEST_CASE("refine on an empty input reports zeros") {
  auto res = refine({}, defaults());
  CHECK(res.volumes.empty());
  CHECK(res.report.stage_counts == std::array<size_t, 4>{0, 0, 0, 0});
}

TEST_CASE("five near-identical detections collapse to one surviving volume") {
  std::vector<BoundingVolume3D> input;
  for (int i = 0; i < 5; ++i) {
    double j = i * 0.01;
    input.push_back(vol(0 + j, 0 + j, 0 + j, 1 + j, 1 + j, 1 + j));
  }
  auto res = refine(input, defaults());
  REQUIRE(res.volumes.size() == 1);
  CHECK(res.volumes[0].appearances == 5);
  CHECK(res.report.stage_counts == std::array<size_t, 4>{5, 5, 1, 1});
}

TEST_CASE("stage reports count each removal reason") {
  std::vector<BoundingVolume3D> input = {
      vol(0, 0, 0, 0.1, 0.1, 0.1),          // stage 1: too small
      vol(10, 0, 0, 11, 1, 1, 1, 1),        // stage 3: lone, app < 3
      vol(20, 0, 0, 21.2, 1.2, 1.2, 2, 2),  // merges with the next one
      vol(20.1, 0.1, 0.1, 21, 1, 1, 2, 2),
  };
  auto res = refine(input, defaults());
  REQUIRE(res.volumes.size() == 1);
  CHECK(res.volumes[0].class_id == 2);
  CHECK(res.volumes[0].appearances == 4);
  CHECK(res.report.stage_counts == std::array<size_t, 4>{4, 3, 2, 1});
  CHECK(res.report.removals.at("stage1_volume_bounds") == 1);
  CHECK(res.report.removals.at("stage2_merged") == 1);
  CHECK(res.report.removals.at("stage3_appearances") == 1);
}

TEST_CASE("refinement invariants hold over random instances") {
  std::mt19937_64 rng(77);
  auto cfg = defaults();
  for (int iter = 0; iter < 100; ++iter) {
    auto input = random_instance(rng, 2 + static_cast<int>(rng() % 20));
    auto res = refine(input, cfg);
    const auto& sc = res.report.stage_counts;

    CHECK(sc[0] == input.size());
    CHECK(sc[1] <= sc[0]);
    CHECK(sc[2] <= sc[1]);
    CHECK(sc[3] <= sc[2]);
    CHECK(res.volumes.size() == sc[3]);

    // Appearances are conserved through stage 2: what stage 1 kept is
    // exactly what the merged set carries.
    int stage1_apps = 0;
    for (const auto& v : input)
      if (valid_object(v, cfg)) stage1_apps += v.appearances;
    auto merged = oracle_merge(
        [&] {
          std::vector<BoundingVolume3D> kept;
          for (const auto& v : input)
            if (valid_object(v, cfg)) kept.push_back(v);
          return kept;
        }(),
        cfg);
    CHECK(total_appearances(merged) == stage1_apps);

    // No surviving pair still satisfies containment.
    for (size_t i = 0; i < res.volumes.size(); ++i) {
      for (size_t j = 0; j < res.volumes.size(); ++j) {
        if (i == j) continue;
        CHECK_FALSE(volume_contains(res.volumes[i], res.volumes[j], cfg));
      }
    }

    // Survivors pass both filters.
    for (const auto& v : res.volumes) {
      CHECK(valid_object(v, cfg));
      CHECK(v.appearances >= cfg.app_min);
    }

    // Idempotence.
    auto again = refine(res.volumes, cfg);
    CHECK(same_sets(again.volumes, res.volumes));
  }
}

TEST_CASE("refine agrees with the brute-force merge oracle") {
  std::mt19937_64 rng(101);
  auto cfg = defaults();
  cfg.app_min = 1;  // isolate stages 1 and 2
  for (int iter = 0; iter < 100; ++iter) {
    auto input = random_instance(rng, 2 + static_cast<int>(rng() % 25));
    std::vector<BoundingVolume3D> kept;
    for (const auto& v : input)
      if (valid_object(v, cfg)) kept.push_back(v);
    auto expected = oracle_merge(kept, cfg);
    auto res = refine(input, cfg);
    CHECK(same_sets(res.volumes, expected));
  }
}

TEST_CASE("refine config validation") {
  RefineConfig bad = defaults();
  bad.vol_min = -1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = defaults();
  bad.vol_max = bad.vol_min / 2;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = defaults();
  bad.app_min = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_NOTHROW(defaults().validate());
}
