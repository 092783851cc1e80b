#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "doctest.h"
#include "tacloc/features.hpp"
#include "tacloc/mesh.hpp"
#include "tacloc/rng.hpp"

using namespace tacloc;

namespace {

OrientedPointCloud random_cloud(int n, double extent, std::uint64_t seed) {
  Rng rng(seed);
  OrientedPointCloud cloud;
  cloud.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 p(rng.uniform(0.0, extent), rng.uniform(0.0, extent),
                 rng.uniform(0.0, extent));
    Vec3 nrm;
    do {
      nrm = rng.gaussian_vec3();
    } while (nrm.norm() < 1e-9);
    cloud.push_back(p, nrm.normalized());
  }
  return cloud;
}

RigidTransform random_transform(std::uint64_t seed) {
  Rng rng(seed);
  return RigidTransform(rng.random_rotation(),
                        Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                             rng.uniform(-0.1, 0.1)));
}

/// Hollow cube surface on a 1 mm grid with outward normals.
OrientedPointCloud cube_surface(double side, double spacing) {
  const int n = static_cast<int>(std::lround(side / spacing));
  OrientedPointCloud cloud;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      for (int k = 0; k <= n; ++k) {
        const bool bi = (i == 0 || i == n), bj = (j == 0 || j == n),
                   bk = (k == 0 || k == n);
        if (!bi && !bj && !bk) continue;
        Vec3 nrm(bi ? (i == 0 ? -1.0 : 1.0) : 0.0, bj ? (j == 0 ? -1.0 : 1.0) : 0.0,
                 bk ? (k == 0 ? -1.0 : 1.0) : 0.0);
        cloud.push_back(Vec3(i * spacing, j * spacing, k * spacing), nrm.normalized());
      }
    }
  }
  return cloud;
}

}  // namespace

TEST_CASE("voxel_downsample collapses a single voxel to its centroid") {
  OrientedPointCloud cloud;
  cloud.push_back(Vec3(0.1e-3, 0.2e-3, 0.3e-3), Vec3(0, 0, 1));
  cloud.push_back(Vec3(0.5e-3, 0.4e-3, 0.1e-3), Vec3(0, 1, 0));
  const OrientedPointCloud out = voxel_downsample(cloud, 1e-3);
  REQUIRE(out.size() == 1);
  CHECK((out.points[0] - Vec3(0.3e-3, 0.3e-3, 0.2e-3)).norm() < 1e-15);
  CHECK((out.normals[0] - Vec3(0, 1, 1).normalized()).norm() < 1e-12);
}

TEST_CASE("voxel_downsample keeps well-separated points unchanged") {
  OrientedPointCloud cloud;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    cloud.push_back(Vec3(i * 2.5e-3, i * 3.0e-3, -i * 2.2e-3),
                    rng.gaussian_vec3().normalized());
  }
  const OrientedPointCloud out = voxel_downsample(cloud, 1e-3);
  REQUIRE(out.size() == cloud.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK((out.points[i] - cloud.points[i]).norm() == 0.0);
    CHECK((out.normals[i] - cloud.normals[i]).norm() < 1e-12);
  }
}

TEST_CASE("voxel_downsample output count matches a hash-grid oracle") {
  const double voxel = 1e-3;
  OrientedPointCloud cloud = random_cloud(10000, 0.1, 11);
  std::set<std::array<long, 3>> occupied;
  for (const Vec3& p : cloud.points) {
    occupied.insert({static_cast<long>(std::floor(p.x() / voxel)),
                     static_cast<long>(std::floor(p.y() / voxel)),
                     static_cast<long>(std::floor(p.z() / voxel))});
  }
  const OrientedPointCloud out = voxel_downsample(cloud, voxel);
  CHECK(out.size() == occupied.size());
}

TEST_CASE("voxel_downsample is idempotent") {
  const double voxel = 2e-3;
  const OrientedPointCloud once = voxel_downsample(random_cloud(3000, 0.05, 17), voxel);
  const OrientedPointCloud twice = voxel_downsample(once, voxel);
  REQUIRE(twice.size() == once.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK((twice.points[i] - once.points[i]).norm() == 0.0);
    // Re-normalizing an already-unit normal wobbles at the last ulp.
    CHECK((twice.normals[i] - once.normals[i]).norm() < 1e-12);
  }
}

TEST_CASE("voxel_downsample drops voxels whose normals cancel") {
  OrientedPointCloud cloud;
  cloud.push_back(Vec3(0.1e-3, 0.1e-3, 0.1e-3), Vec3(0, 0, 1));
  cloud.push_back(Vec3(0.2e-3, 0.2e-3, 0.2e-3), Vec3(0, 0, -1));
  cloud.push_back(Vec3(5.0e-3, 5.0e-3, 5.0e-3), Vec3(1, 0, 0));
  const OrientedPointCloud out = voxel_downsample(cloud, 1e-3);
  REQUIRE(out.size() == 1);
  CHECK((out.normals[0] - Vec3(1, 0, 0)).norm() == 0.0);
}

TEST_CASE("estimate_normals recovers plane and sphere normals") {
  SUBCASE("plane points give (0,0,1) toward the viewpoint") {
    std::vector<Vec3> pts;
    for (int i = 0; i < 15; ++i) {
      for (int j = 0; j < 15; ++j) pts.push_back(Vec3(i * 1e-3, j * 1e-3, 0.0));
    }
    const NormalEstimate est = estimate_normals(pts, 2.5e-3, Vec3(0, 0, 1));
    REQUIRE(est.cloud.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(est.degenerate[i] == 0);
      CHECK((est.cloud.normals[i] - Vec3(0, 0, 1)).norm() < 1e-6);
    }
  }

  SUBCASE("sphere points give near-radial normals oriented toward the center") {
    std::vector<Vec3> pts;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
      // Fibonacci sphere: even coverage without clustering.
      const double z = 1.0 - 2.0 * (i + 0.5) / n;
      const double r = std::sqrt(1.0 - z * z);
      const double a = i * M_PI * (3.0 - std::sqrt(5.0));
      pts.push_back(Vec3(r * std::cos(a), r * std::sin(a), z));
    }
    const NormalEstimate est = estimate_normals(pts, 0.25, Vec3(0, 0, 0));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      REQUIRE(est.degenerate[i] == 0);
      // Viewpoint at the center orients normals inward: compare -n to radial.
      const double angle = angle_between(-est.cloud.normals[i], pts[i].normalized());
      CHECK(angle < 5.0 * M_PI / 180.0);
    }
  }

  SUBCASE("isolated points are flagged") {
    const NormalEstimate est =
        estimate_normals({Vec3(0, 0, 0), Vec3(1, 0, 0)}, 1e-3, Vec3(0, 0, 1));
    CHECK(est.degenerate[0] == 1);
    CHECK(est.degenerate[1] == 1);
    CHECK((est.cloud.normals[0] - Vec3(0, 0, 1)).norm() == 0.0);
  }
}

TEST_CASE("sample_mesh draws area-weighted samples with face normals") {
  TriangleMesh square;
  square.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
  square.faces = {{0, 1, 2}, {0, 2, 3}};

  SUBCASE("unit square splits samples evenly between its two triangles") {
    const OrientedPointCloud cloud = sample_mesh(square, 1000, 42);
    REQUIRE(cloud.size() == 1000);
    int first = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      CHECK((cloud.normals[i] - Vec3(0, 0, 1)).norm() < 1e-12);
      // Face {0,1,2} covers x >= y.
      if (cloud.points[i].x() >= cloud.points[i].y()) ++first;
    }
    // Binomial(1000, 1/2) stays within 4 sigma = 63 of the mean.
    CHECK(first > 500 - 63);
    CHECK(first < 500 + 63);
  }

  SUBCASE("single-triangle samples satisfy barycentric validity") {
    TriangleMesh tri;
    tri.vertices = {Vec3(0, 0, 0), Vec3(0.02, 0, 0), Vec3(0, 0.03, 0)};
    tri.faces = {{0, 1, 2}};
    const OrientedPointCloud cloud = sample_mesh(tri, 300, 7);
    for (const Vec3& p : cloud.points) {
      const double bx = p.x() / 0.02, by = p.y() / 0.03;
      CHECK(bx >= -1e-12);
      CHECK(by >= -1e-12);
      CHECK(bx + by <= 1.0 + 1e-12);
      CHECK(std::abs(p.z()) < 1e-15);
    }
  }

  SUBCASE("sampling is deterministic per seed") {
    const OrientedPointCloud a = sample_mesh(square, 500, 99);
    const OrientedPointCloud b = sample_mesh(square, 500, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK((a.points[i] - b.points[i]).norm() == 0.0);
    }
    const OrientedPointCloud c = sample_mesh(square, 500, 100);
    bool all_same = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if ((a.points[i] - c.points[i]).norm() != 0.0) all_same = false;
    }
    CHECK(!all_same);
  }

  SUBCASE("zero-area meshes are rejected") {
    TriangleMesh degenerate;
    degenerate.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
    degenerate.faces = {{0, 1, 2}};
    CHECK_THROWS_AS(sample_mesh(degenerate, 10, 1), std::invalid_argument);
  }
}

TEST_CASE("iss_keypoints ignores planes and finds cube corners") {
  SUBCASE("a perfect plane yields no keypoints") {
    OrientedPointCloud plane;
    for (int i = 0; i < 25; ++i) {
      for (int j = 0; j < 25; ++j) {
        plane.push_back(Vec3(i * 1e-3, j * 1e-3, 0.0), Vec3(0, 0, 1));
      }
    }
    CHECK(iss_keypoints(plane, 3e-3, 2e-3, 0.975, 0.975).empty());
  }

  SUBCASE("every cube corner has a nearby keypoint") {
    const double side = 0.02, spacing = 1e-3, salient = 3e-3;
    const OrientedPointCloud cube = cube_surface(side, spacing);
    const std::vector<int> kps = iss_keypoints(cube, salient, 2e-3, 0.975, 0.975);
    REQUIRE(!kps.empty());
    for (int cx : {0, 1}) {
      for (int cy : {0, 1}) {
        for (int cz : {0, 1}) {
          const Vec3 corner(cx * side, cy * side, cz * side);
          double best = 1e9;
          for (int k : kps) best = std::min(best, (cube.points[k] - corner).norm());
          INFO("corner " << cx << cy << cz << " nearest keypoint at " << best);
          CHECK(best <= salient);
        }
      }
    }
  }

  SUBCASE("keypoint selection is deterministic and transform-equivariant") {
    const OrientedPointCloud cloud = random_cloud(200, 0.02, 23);
    const std::vector<int> a = iss_keypoints(cloud, 4e-3, 3e-3, 0.975, 0.975);
    const std::vector<int> b = iss_keypoints(cloud, 4e-3, 3e-3, 0.975, 0.975);
    CHECK(a == b);

    const RigidTransform T = random_transform(5);
    const std::vector<int> c = iss_keypoints(apply(T, cloud), 4e-3, 3e-3, 0.975, 0.975);
    CHECK(a == c);
  }
}

TEST_CASE("fpfh concentrates plane descriptors in the zero-angle bins") {
  OrientedPointCloud plane;
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      plane.push_back(Vec3(i * 1e-3, j * 1e-3, 0.0), Vec3(0, 0, 1));
    }
  }
  const std::vector<int> kps = {66, 30, 100};
  const std::vector<Descriptor> desc = fpfh(plane, kps, 2.5e-3);
  REQUIRE(desc.size() == kps.size());
  for (const Descriptor& d : desc) {
    CHECK(!d.degenerate);
    // alpha = phi = theta = 0 for coplanar identical normals: bins 5, 16, 27.
    CHECK(d.bins[5] == doctest::Approx(1.0));
    CHECK(d.bins[16] == doctest::Approx(1.0));
    CHECK(d.bins[27] == doctest::Approx(1.0));
    double total = 0.0;
    for (double b : d.bins) total += b;
    CHECK(total == doctest::Approx(3.0));
  }
}

TEST_CASE("fpfh is invariant under rigid motion") {
  const OrientedPointCloud cloud = random_cloud(300, 0.03, 31);
  std::vector<int> kps;
  for (int i = 0; i < 300; i += 17) kps.push_back(i);
  const std::vector<Descriptor> base = fpfh(cloud, kps, 6e-3);

  const RigidTransform T = random_transform(8);
  const std::vector<Descriptor> moved = fpfh(apply(T, cloud), kps, 6e-3);
  REQUIRE(moved.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].l1_distance(moved[i]) < 1e-6);
  }
}

TEST_CASE("fpfh bins are finite and nonnegative; lonely keypoints flagged") {
  OrientedPointCloud cloud = random_cloud(100, 0.02, 41);
  cloud.push_back(Vec3(10, 10, 10), Vec3(0, 0, 1));  // far from everything
  std::vector<int> kps = {0, 50, 100};
  const std::vector<Descriptor> desc = fpfh(cloud, kps, 4e-3);
  for (const Descriptor& d : desc) {
    for (double b : d.bins) {
      CHECK(std::isfinite(b));
      CHECK(b >= 0.0);
    }
  }
  CHECK(desc[2].degenerate);
  double mass = 0.0;
  for (double b : desc[2].bins) mass += b;
  CHECK(mass == 0.0);
}

TEST_CASE("match_features pairs nearest descriptors deterministically") {
  auto unit_desc = [](int hot) {
    Descriptor d;
    d.bins[hot % 33] = 1.0 + hot * 0.01;
    return d;
  };

  SUBCASE("identical sets match identity with zero distance") {
    std::vector<Descriptor> set;
    for (int i = 0; i < 8; ++i) set.push_back(unit_desc(i));
    const std::vector<Correspondence> m = match_features(set, set, 100);
    REQUIRE(m.size() == 8);
    for (const Correspondence& c : m) {
      CHECK(c.src_index == c.tgt_index);
      CHECK(c.feature_distance == 0.0);
    }
  }

  SUBCASE("max_matches of 1 returns the globally closest pair") {
    std::vector<Descriptor> src = {unit_desc(0), unit_desc(5)};
    std::vector<Descriptor> tgt = {unit_desc(1), unit_desc(5)};
    const std::vector<Correspondence> m = match_features(src, tgt, 1);
    REQUIRE(m.size() == 1);
    CHECK(m[0].src_index == 1);
    CHECK(m[0].tgt_index == 1);
    CHECK(m[0].feature_distance == 0.0);
  }

  SUBCASE("random descriptors agree with the brute-force oracle") {
    Rng rng(61);
    auto random_desc = [&]() {
      Descriptor d;
      for (double& b : d.bins) b = rng.uniform();
      return d;
    };
    std::vector<Descriptor> src, tgt;
    for (int i = 0; i < 40; ++i) src.push_back(random_desc());
    for (int i = 0; i < 55; ++i) tgt.push_back(random_desc());

    struct Row {
      double dist;
      int s, t;
      bool operator<(const Row& o) const {
        if (dist != o.dist) return dist < o.dist;
        if (s != o.s) return s < o.s;
        return t < o.t;
      }
    };
    std::vector<Row> oracle;
    for (int s = 0; s < 40; ++s) {
      Row best{1e300, s, -1};
      for (int t = 0; t < 55; ++t) {
        const double d = src[s].l1_distance(tgt[t]);
        if (d < best.dist) best = {d, s, t};
      }
      oracle.push_back(best);
    }
    std::sort(oracle.begin(), oracle.end());
    oracle.resize(25);

    const std::vector<Correspondence> m = match_features(src, tgt, 25);
    REQUIRE(m.size() == 25);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i].src_index == oracle[i].s);
      CHECK(m[i].tgt_index == oracle[i].t);
      CHECK(m[i].feature_distance == doctest::Approx(oracle[i].dist));
      if (i > 0) CHECK(m[i].feature_distance >= m[i - 1].feature_distance);
    }
  }

  SUBCASE("output length is min(max_matches, source count)") {
    std::vector<Descriptor> src = {unit_desc(0), unit_desc(1), unit_desc(2)};
    std::vector<Descriptor> tgt = {unit_desc(0)};
    CHECK(match_features(src, tgt, 2).size() == 2);
    CHECK(match_features(src, tgt, 50).size() == 3);
  }
}
