#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "tacloc/config.hpp"
#include "tacloc/geometry.hpp"
#include "tacloc/io.hpp"
#include "tacloc/kdtree.hpp"
#include "tacloc/rng.hpp"

using namespace tacloc;

namespace {

constexpr double kDeg = 0.017453292519943295;

RigidTransform random_transform(Rng& rng) {
  return RigidTransform(rng.random_rotation(),
                        Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)));
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("compose: identity and inverse") {
  const RigidTransform id = RigidTransform::identity();
  const Mat4 ii = compose(id, id).matrix();
  CHECK((ii - Mat4::Identity()).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = random_transform(rng);
    const Mat4 m = compose(t, t.inverse()).matrix();
    CHECK((m - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("compose: rotations about a common axis add") {
  const RigidTransform a = RigidTransform::rotation_z(30.0 * kDeg);
  const RigidTransform b = RigidTransform::rotation_z(60.0 * kDeg);
  const RigidTransform c = RigidTransform::rotation_z(90.0 * kDeg);
  CHECK((compose(a, b).matrix() - c.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("compose is associative") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform a = random_transform(rng);
    const RigidTransform b = random_transform(rng);
    const RigidTransform c = random_transform(rng);
    const Mat4 lhs = compose(compose(a, b), c).matrix();
    const Mat4 rhs = compose(a, compose(b, c)).matrix();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("apply: identity, translation, rotation") {
  OrientedPointCloud cloud;
  cloud.push_back(Vec3(0, 0, 0), Vec3(1, 0, 0));
  cloud.push_back(Vec3(1, 0, 0), Vec3(1, 0, 0));

  const OrientedPointCloud same = apply(RigidTransform::identity(), cloud);
  CHECK(same.points[0] == cloud.points[0]);
  CHECK(same.normals[1] == cloud.normals[1]);

  const RigidTransform shift(Mat3::Identity(), Vec3(1, 2, 3));
  const OrientedPointCloud moved = apply(shift, cloud);
  CHECK((moved.points[0] - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK(moved.normals[0] == cloud.normals[0]);

  const OrientedPointCloud turned = apply(RigidTransform::rotation_z(90.0 * kDeg), cloud);
  CHECK((turned.points[1] - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((turned.normals[1] - Vec3(0, 1, 0)).norm() < 1e-15);
}

TEST_CASE("apply distributes over compose and preserves distances") {
  Rng rng(3);
  OrientedPointCloud cloud;
  for (int i = 0; i < 30; ++i) {
    cloud.push_back(rng.gaussian_vec3(), rng.gaussian_vec3().normalized());
  }
  const RigidTransform a = random_transform(rng);
  const RigidTransform b = random_transform(rng);
  const OrientedPointCloud lhs = apply(compose(a, b), cloud);
  const OrientedPointCloud rhs = apply(a, apply(b, cloud));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK((lhs.points[i] - rhs.points[i]).norm() < 1e-9);
    CHECK(std::abs(lhs.normals[i].norm() - 1.0) < 1e-12);
  }
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    const double before = (cloud.points[i] - cloud.points[0]).norm();
    const double after = (lhs.points[i] - lhs.points[0]).norm();
    CHECK(std::abs(before - after) < 1e-9);
  }
}

TEST_CASE("RigidTransform re-orthonormalizes drifted rotations") {
  Mat3 drifted = RigidTransform::rotation_z(40.0 * kDeg).rotation();
  drifted(0, 0) += 1e-6;
  const RigidTransform t(drifted, Vec3::Zero());
  const Mat3 gram = t.rotation().transpose() * t.rotation();
  CHECK((gram - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(std::abs(t.rotation().determinant() - 1.0) < 1e-9);
}

TEST_CASE("nearest neighbor: exact hit and simple two-point case") {
  std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0.010, 0, 0)};
  KdTree tree(pts);

  const auto exact = tree.nearest(Vec3(0.010, 0, 0));
  CHECK(exact.index == 1);
  CHECK(exact.distance == 0.0);

  const auto mid = tree.nearest(Vec3(0.004, 0, 0));
  CHECK(mid.index == 0);
  CHECK(mid.distance == doctest::Approx(0.004).epsilon(1e-12));
}

TEST_CASE("nearest neighbor matches exhaustive scan") {
  Rng rng(42);
  std::vector<Vec3> pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(rng.gaussian_vec3());
  KdTree tree(pts);
  for (int i = 0; i < 100; ++i) {
    const Vec3 q = 2.0 * rng.gaussian_vec3();
    const auto got = tree.nearest(q);
    const auto want = nearest_neighbor_linear(pts, q);
    CHECK(got.index == want.index);
    CHECK(got.distance == doctest::Approx(want.distance).epsilon(1e-12));
  }
}

TEST_CASE("nearest neighbor ties resolve to the smallest index") {
  // Four copies of the same point; query equidistant from all of them.
  std::vector<Vec3> pts{Vec3(1, 0, 0), Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(1, 0, 0)};
  KdTree tree(pts);
  const auto hit = tree.nearest(Vec3(0, 0, 0));
  CHECK(hit.index == 0);
}

TEST_CASE("radius search matches brute force") {
  Rng rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(rng.gaussian_vec3());
  KdTree tree(pts);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec3 q = rng.gaussian_vec3();
    const double r = rng.uniform(0.1, 1.5);
    const auto got = tree.radius_search(q, r);
    std::vector<int> want;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      if ((pts[i] - q).norm() <= r) want.push_back(i);
    }
    CHECK(got == want);
  }
}

TEST_CASE("knn matches brute force") {
  Rng rng(9);
  std::vector<Vec3> pts;
  for (int i = 0; i < 400; ++i) pts.push_back(rng.gaussian_vec3());
  KdTree tree(pts);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 q = rng.gaussian_vec3();
    const int k = 1 + static_cast<int>(rng.uniform_index(20));
    const auto got = tree.knn(q, k);
    std::vector<KdTree::Hit> want;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      want.push_back({i, (pts[i] - q).norm()});
    }
    std::sort(want.begin(), want.end(), [](const auto& a, const auto& b) {
      return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
    });
    REQUIRE(got.size() == static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      CHECK(got[i].index == want[i].index);
      CHECK(got[i].distance == doctest::Approx(want[i].distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("KdTree rejects empty input") {
  CHECK_THROWS_AS(KdTree(std::vector<Vec3>{}), std::invalid_argument);
}

TEST_CASE("config defaults and validation") {
  const PipelineConfig cfg;
  CHECK(cfg.voxel_size == doctest::Approx(1e-3));
  CHECK(cfg.fpfh_radius == doctest::Approx(5e-3));
  CHECK(cfg.delta_d == doctest::Approx(6e-3));
  CHECK(cfg.delta_alpha == doctest::Approx(30.0 * kDeg));
  CHECK(cfg.num_candidates == 300);
  CHECK(cfg.alpha_weight == 1.0);
  CHECK(cfg.num_initial_correspondences == 500);
  CHECK_NOTHROW(cfg.validate());

  PipelineConfig bad = cfg;
  bad.fpfh_radius = bad.voxel_size;  // must strictly exceed
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.delta_alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.num_candidates = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config parsing: units, comments, unknown keys") {
  const PipelineConfig cfg = parse_config(
      "# comment line\n"
      "voxel_size_mm = 2.0\n"
      "fpfh_radius_mm = 8 # inline comment\n"
      "delta_alpha_deg = 45\n"
      "num_candidates = 50\n");
  CHECK(cfg.voxel_size == doctest::Approx(2e-3));
  CHECK(cfg.fpfh_radius == doctest::Approx(8e-3));
  CHECK(cfg.delta_alpha == doctest::Approx(45.0 * kDeg));
  CHECK(cfg.num_candidates == 50);
  CHECK(cfg.delta_d == doctest::Approx(6e-3));  // untouched default

  CHECK_THROWS_AS(parse_config("not_a_key = 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("voxel_size_mm 3\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("voxel_size_mm = abc\n"), std::invalid_argument);
}

TEST_CASE("PLY round trip preserves points and normals") {
  OrientedPointCloud cloud;
  Rng rng(1);
  for (int i = 0; i < 25; ++i) {
    cloud.push_back(0.05 * rng.gaussian_vec3(), rng.gaussian_vec3().normalized());
  }
  const auto path = temp_file("tacloc_test_cloud.ply");
  save_ply(path.string(), cloud);
  const OrientedPointCloud back = load_ply(path.string());
  REQUIRE(back.size() == cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    CHECK((back.points[i] - cloud.points[i]).norm() < 1e-6);   // float precision
    CHECK((back.normals[i] - cloud.normals[i]).norm() < 1e-6);
  }
  std::filesystem::remove(path);
}

TEST_CASE("PLY binary little-endian reader") {
  const auto path = temp_file("tacloc_test_binary.ply");
  {
    std::ofstream out(path, std::ios::binary);
    out << "ply\nformat binary_little_endian 1.0\n"
        << "element vertex 2\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "property float nx\nproperty float ny\nproperty float nz\n"
        << "end_header\n";
    const float rows[2][6] = {{1.f, 2.f, 3.f, 0.f, 0.f, 1.f},
                              {4.f, 5.f, 6.f, 1.f, 0.f, 0.f}};
    out.write(reinterpret_cast<const char*>(rows), sizeof(rows));
  }
  const OrientedPointCloud cloud = load_ply(path.string());
  REQUIRE(cloud.size() == 2);
  CHECK((cloud.points[0] - Vec3(1, 2, 3)).norm() < 1e-6);
  CHECK((cloud.points[1] - Vec3(4, 5, 6)).norm() < 1e-6);
  CHECK((cloud.normals[1] - Vec3(1, 0, 0)).norm() < 1e-6);
  std::filesystem::remove(path);
}

TEST_CASE("PLY reader accepts shuffled property order") {
  const auto path = temp_file("tacloc_test_shuffled.ply");
  {
    std::ofstream out(path);
    out << "ply\nformat ascii 1.0\n"
        << "element vertex 1\n"
        << "property float nz\nproperty float z\nproperty float x\n"
        << "property float nx\nproperty float y\nproperty float ny\n"
        << "end_header\n"
        << "1 30 10 0 20 0\n";
  }
  const OrientedPointCloud cloud = load_ply(path.string());
  REQUIRE(cloud.size() == 1);
  CHECK((cloud.points[0] - Vec3(10, 20, 30)).norm() < 1e-9);
  CHECK((cloud.normals[0] - Vec3(0, 0, 1)).norm() < 1e-9);
  std::filesystem::remove(path);
}

TEST_CASE("pose file round trip and last-row check") {
  Rng rng(2);
  const RigidTransform t = random_transform(rng);
  const auto path = temp_file("tacloc_test_pose.txt");
  save_pose(path.string(), t);
  const RigidTransform back = load_pose(path.string());
  CHECK((back.matrix() - t.matrix()).cwiseAbs().maxCoeff() < 1e-15);

  {
    std::ofstream out(path);
    out << "1 0 0 0  0 1 0 0  0 0 1 0  0 0 0 2\n";
  }
  CHECK_THROWS_AS(load_pose(path.string()), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("deterministic rng: reproducible streams, valid rotations") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());

  Rng c(99);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 20; ++i) {
    const Mat3 r = c.random_rotation();
    CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("cloud validation catches malformed input") {
  OrientedPointCloud cloud;
  cloud.push_back(Vec3(0, 0, 0), Vec3(0, 0, 2));  // non-unit normal
  CHECK_THROWS_AS(cloud.validate(), std::invalid_argument);
  cloud.normals[0] = Vec3(0, 0, 1);
  CHECK_NOTHROW(cloud.validate());
  cloud.points.push_back(Vec3(1, 1, 1));  // size mismatch
  CHECK_THROWS_AS(cloud.validate(), std::invalid_argument);
}
