#include <doctest.h>

#include <cmath>
#include <random>

#include "core/synth.hpp"
#include "core/volumes.hpp"

using namespace amap;

namespace {

CameraIntrinsics intr100() {
  return CameraIntrinsics::make(100.0, 100.0, 320.0, 240.0, 640, 480);
}

Detection2D box(double x0, double y0, double x1, double y1) {
  Detection2D d;
  d.class_id = 1;
  d.class_name = "chair";
  d.x_min = x0;
  d.y_min = y0;
  d.x_max = x1;
  d.y_max = y1;
  d.confidence = 0.9;
  return d;
}

SparseMapPoint map_point(double x, double y, double z, int id) {
  SparseMapPoint p;
  p.position = Point3(x, y, z, Frame::Map);
  p.id = id;
  return p;
}

PoseSE3 identity_cam_pose() {
  return PoseSE3(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(),
                 Frame::Camera, Frame::Map);
}

}  // namespace

TEST_CASE("front_depth picks the closest in-box point") {
  // With an identity camera pose, map coordinates are camera coordinates.
  std::vector<SparseMapPoint> pts = {
      map_point(0, 0, 4.0, 0),   // in box, farther
      map_point(0, 0, 2.5, 1),   // in box, closest
      map_point(3, 3, 1.0, 2),   // projects outside the box
      map_point(0, 0, -1.0, 3),  // behind the camera
  };
  auto det = box(300, 220, 340, 260);
  double z0 = front_depth(det, identity_cam_pose(), intr100(), pts);
  CHECK(z0 == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("front_depth with two points keeps the minimum") {
  std::vector<SparseMapPoint> pts = {map_point(0, 0, 3.0, 0),
                                     map_point(0.01, 0.01, 2.0, 1)};
  double z0 = front_depth(box(300, 220, 340, 260), identity_cam_pose(),
                          intr100(), pts);
  CHECK(z0 == doctest::Approx(2.0));
}

TEST_CASE("front_depth percentile selects a deeper quantile") {
  std::vector<SparseMapPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(map_point(0, 0, 1.0 + i, i));
  auto det = box(300, 220, 340, 260);
  double z_min = front_depth(det, identity_cam_pose(), intr100(), pts, 0.0);
  double z_med = front_depth(det, identity_cam_pose(), intr100(), pts, 0.5);
  CHECK(z_min == doctest::Approx(1.0));
  CHECK(z_med > z_min);
  CHECK(z_med <= 10.0);
}

TEST_CASE("front_depth throws when nothing projects inside the box") {
  std::vector<SparseMapPoint> pts = {map_point(5, 5, 2.0, 0)};
  CHECK_THROWS_AS(front_depth(box(300, 220, 340, 260), identity_cam_pose(),
                              intr100(), pts),
                  Error);
  CHECK_THROWS_AS(front_depth(box(300, 220, 340, 260), identity_cam_pose(),
                              intr100(), {}),
                  Error);
}

TEST_CASE("lift_detection reproduces the hand-computed frustum prism") {
  auto det = box(220, 190, 420, 290);
  LiftedBox lb = lift_detection(det, 2.0, intr100());

  CHECK(lb.width == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(lb.height == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(lb.z_est == doctest::Approx(3.0).epsilon(1e-9));

  // Front face at z = 2: x in [-2, 2], y in [-1, 1].
  CHECK(lb.corners[0].x() == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(lb.corners[0].y() == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(lb.corners[0].z() == doctest::Approx(2.0));
  CHECK(lb.corners[1].x() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(lb.corners[2].y() == doctest::Approx(1.0).epsilon(1e-9));

  // Rear face at z = 5: x in [-5, 5], y in [-2.5, 2.5].
  for (int i = 4; i < 8; ++i)
    CHECK(lb.corners[i].z() == doctest::Approx(5.0));
  CHECK(lb.corners[4].x() == doctest::Approx(-5.0).epsilon(1e-9));
  CHECK(lb.corners[5].x() == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(lb.corners[4].y() == doctest::Approx(-2.5).epsilon(1e-9));
  CHECK(lb.corners[6].y() == doctest::Approx(2.5).epsilon(1e-9));

  for (const auto& c : lb.corners) CHECK(c.frame == Frame::Camera);
}

TEST_CASE("lifted front corners reproject onto the box corners") {
  std::mt19937_64 rng(21);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  auto intr = intr100();
  for (int i = 0; i < 50; ++i) {
    double x0 = uni(0, 500), y0 = uni(0, 380);
    auto det = box(x0, y0, x0 + uni(10, 120), y0 + uni(10, 90));
    double z0 = uni(0.5, 8.0);
    LiftedBox lb = lift_detection(det, z0, intr);
    PixelPoint tl = project(intr, lb.corners[0]);
    PixelPoint br = project(intr, lb.corners[2]);
    CHECK(tl.u == doctest::Approx(det.x_min).epsilon(1e-9));
    CHECK(tl.v == doctest::Approx(det.y_min).epsilon(1e-9));
    CHECK(br.u == doctest::Approx(det.x_max).epsilon(1e-9));
    CHECK(br.v == doctest::Approx(det.y_max).epsilon(1e-9));
  }
}

TEST_CASE("to_world with identity transforms keeps camera coordinates") {
  auto det = box(220, 190, 420, 290);
  LiftedBox lb = lift_detection(det, 2.0, intr100());
  PoseSE3 body_to_map(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(),
                      Frame::Body, Frame::Map);
  PoseSE3 cam_to_body(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(),
                      Frame::Camera, Frame::Body);
  BoundingVolume3D v = to_world(lb, det, cam_to_body, body_to_map);
  CHECK(v.class_id == 1);
  CHECK(v.appearances == 1);
  CHECK(v.aabb_min.x() == doctest::Approx(-5.0));
  CHECK(v.aabb_max.x() == doctest::Approx(5.0));
  CHECK(v.aabb_min.y() == doctest::Approx(-2.5));
  CHECK(v.aabb_max.y() == doctest::Approx(2.5));
  CHECK(v.aabb_min.z() == doctest::Approx(2.0));
  CHECK(v.aabb_max.z() == doctest::Approx(5.0));
  CHECK(v.front_depth == doctest::Approx(2.0));
  CHECK(v.rear_depth == doctest::Approx(5.0));
}

TEST_CASE("to_world applies translation and rotation to the hull") {
  auto det = box(220, 190, 420, 290);
  LiftedBox lb = lift_detection(det, 2.0, intr100());
  PoseSE3 cam_to_body(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(),
                      Frame::Camera, Frame::Body);

  SUBCASE("pure translation shifts the aabb") {
    PoseSE3 body_to_map(Eigen::Quaterniond::Identity(),
                        Eigen::Vector3d(10, 20, 30), Frame::Body, Frame::Map);
    BoundingVolume3D v = to_world(lb, det, cam_to_body, body_to_map);
    CHECK(v.aabb_min.x() == doctest::Approx(5.0));
    CHECK(v.aabb_max.x() == doctest::Approx(15.0));
    CHECK(v.aabb_min.z() == doctest::Approx(32.0));
    CHECK(v.aabb_max.z() == doctest::Approx(35.0));
  }

  SUBCASE("90 degree yaw swaps the x and y roles of camera x and z") {
    Eigen::Quaterniond yaw(
        Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ()));
    PoseSE3 body_to_map(yaw, Eigen::Vector3d::Zero(), Frame::Body, Frame::Map);
    BoundingVolume3D v = to_world(lb, det, cam_to_body, body_to_map);
    // Camera x in [-5, 5] lands on map y; camera y in [-2.5, 2.5] on map -x.
    CHECK(v.aabb_min.y() == doctest::Approx(-5.0));
    CHECK(v.aabb_max.y() == doctest::Approx(5.0));
    CHECK(v.aabb_min.x() == doctest::Approx(-2.5));
    CHECK(v.aabb_max.x() == doctest::Approx(2.5));
    CHECK(v.aabb_min.z() == doctest::Approx(2.0));
  }
}

TEST_CASE("aabb is a hull: every corner is inside it") {
  std::mt19937_64 rng(31);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  auto intr = intr100();
  PoseSE3 cam_to_body(Eigen::Quaterniond::Identity(), Eigen::Vector3d::Zero(),
                      Frame::Camera, Frame::Body);
  for (int i = 0; i < 50; ++i) {
    double x0 = uni(0, 500), y0 = uni(0, 380);
    auto det = box(x0, y0, x0 + uni(10, 120), y0 + uni(10, 90));
    LiftedBox lb = lift_detection(det, uni(0.5, 6.0), intr);
    Eigen::Quaterniond q(uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1));
    if (q.norm() < 1e-6) q = Eigen::Quaterniond::Identity();
    PoseSE3 body_to_map(q, Eigen::Vector3d(uni(-3, 3), uni(-3, 3), uni(-3, 3)),
                        Frame::Body, Frame::Map);
    BoundingVolume3D v = to_world(lb, det, cam_to_body, body_to_map);
    for (const auto& c : v.corners) {
      for (int k = 0; k < 3; ++k) {
        CHECK(c[k] >= v.aabb_min[k] - 1e-9);
        CHECK(c[k] <= v.aabb_max[k] + 1e-9);
      }
    }
    CHECK(((v.aabb_max - v.aabb_min).array() >= -1e-12).all());
  }
}

TEST_CASE("associate_points matches the brute-force oracle") {
  std::mt19937_64 rng(41);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  std::vector<BoundingVolume3D> vols;
  for (int i = 0; i < 12; ++i) {
    BoundingVolume3D v;
    Eigen::Vector3d lo(uni(-5, 4), uni(-5, 4), uni(-5, 4));
    Eigen::Vector3d size(uni(0.5, 3), uni(0.5, 3), uni(0.5, 3));
    v.aabb_min = lo;
    v.aabb_max = lo + size;
    vols.push_back(v);
  }
  std::vector<SparseMapPoint> pts;
  for (int i = 0; i < 400; ++i)
    pts.push_back(map_point(uni(-6, 6), uni(-6, 6), uni(-6, 6), i));

  auto expected = oracle_containment(pts, vols);
  associate_points(vols, pts);
  REQUIRE(expected.size() == vols.size());
  for (size_t i = 0; i < vols.size(); ++i)
    CHECK(vols[i].member_points == expected[i]);
}

TEST_CASE("a point in overlapping volumes belongs to all of them") {
  BoundingVolume3D a, b;
  a.aabb_min = {0, 0, 0};
  a.aabb_max = {2, 2, 2};
  b.aabb_min = {1, 1, 1};
  b.aabb_max = {3, 3, 3};
  std::vector<BoundingVolume3D> vols = {a, b};
  std::vector<SparseMapPoint> pts = {map_point(1.5, 1.5, 1.5, 7),
                                     map_point(0.5, 0.5, 0.5, 8),
                                     map_point(9, 9, 9, 9)};
  associate_points(vols, pts);
  CHECK(vols[0].member_points == std::vector<int>{7, 8});
  CHECK(vols[1].member_points == std::vector<int>{7});
}
