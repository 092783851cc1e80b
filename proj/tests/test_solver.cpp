#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tacloc/bench.hpp"
#include "tacloc/rng.hpp"
#include "tacloc/solver.hpp"

using namespace tacloc;

namespace {

double rotation_angle_deg(const Mat3& a, const Mat3& b) {
  const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

/// Spherical cap sampled on a ~1 mm grid; radial normals. Curved enough to
/// pin all six degrees of freedom.
OrientedPointCloud sphere_cap(double radius, double half_angle, double spacing) {
  OrientedPointCloud cloud;
  const int n_theta = static_cast<int>(radius * half_angle / spacing);
  cloud.push_back(Vec3(0, 0, radius), Vec3(0, 0, 1));
  for (int i = 1; i <= n_theta; ++i) {
    const double theta = half_angle * i / n_theta;
    const double ring_r = radius * std::sin(theta);
    const int n_phi = std::max(6, static_cast<int>(2.0 * M_PI * ring_r / spacing));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * M_PI * j / n_phi;
      const Vec3 n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                   std::cos(theta));
      cloud.push_back(radius * n, n);
    }
  }
  return cloud;
}

OrientedPointCloud plane_grid(double side, double spacing) {
  OrientedPointCloud cloud;
  const int n = static_cast<int>(side / spacing);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      cloud.push_back(Vec3(i * spacing - side / 2, j * spacing - side / 2, 0.0),
                      Vec3(0, 0, 1));
    }
  }
  return cloud;
}

double pair_objective(const Mat3& R, const std::vector<Vec3>& p,
                      const std::vector<Vec3>& q, const std::vector<Vec3>& n,
                      const std::vector<Vec3>& m, double alpha) {
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) f += (q[i] - R * p[i]).squaredNorm();
  for (std::size_t i = 0; i < n.size(); ++i) {
    f += alpha * (m[i] - R * n[i]).squaredNorm();
  }
  return f;
}

}  // namespace

TEST_CASE("estimate_rotation recovers exact rotations") {
  Rng rng(7);
  std::vector<Vec3> p, n;
  for (int i = 0; i < 12; ++i) {
    p.push_back(rng.gaussian_vec3() * 0.02);
    n.push_back(rng.gaussian_vec3().normalized());
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : p) centroid += v;
  centroid /= static_cast<double>(p.size());
  for (Vec3& v : p) v -= centroid;

  SUBCASE("aligned pairs give the identity") {
    const RotationEstimate est = estimate_rotation(p, p, n, n, 1.0);
    CHECK(!est.degenerate);
    CHECK((est.rotation - Mat3::Identity()).norm() < 1e-9);
  }

  SUBCASE("a 37 degree z-rotation is recovered to 1e-9") {
    const Mat3 R = RigidTransform::rotation_z(37.0 * M_PI / 180.0).rotation();
    std::vector<Vec3> q, m;
    for (const Vec3& v : p) q.push_back(R * v);
    for (const Vec3& v : n) m.push_back(R * v);
    const RotationEstimate est = estimate_rotation(p, q, m.empty() ? m : n, m, 1.0);
    CHECK(!est.degenerate);
    CHECK((est.rotation - R).norm() < 1e-9);
  }
}

TEST_CASE("collinear point pairs are disambiguated by normals") {
  // Two points on a line through the origin: the point term leaves a
  // one-parameter rotation family; non-parallel normals pick the member.
  const std::vector<Vec3> p = {Vec3(0.02, 0, 0), Vec3(-0.02, 0, 0)};
  const std::vector<Vec3> n = {Vec3(0, 0, 1), Vec3(0, 1, 0)};
  Rng rng(21);
  const Mat3 R_true = rng.random_rotation();
  std::vector<Vec3> q, m;
  for (const Vec3& v : p) q.push_back(R_true * v);
  for (const Vec3& v : n) m.push_back(R_true * v);

  const RotationEstimate est = estimate_rotation(p, q, n, m, 1.0);
  REQUIRE(!est.degenerate);
  CHECK((est.rotation - R_true).norm() < 1e-9);

  // Grid-search oracle at 0.5 degrees over the residual rotation family
  // (rotations about the mapped line), evaluating the objective directly.
  const Vec3 axis = q[0].normalized();
  const Mat3 base =
      Eigen::Quaterniond::FromTwoVectors(p[0].normalized(), axis).toRotationMatrix();
  double best_f = 1e300;
  Mat3 best_R = base;
  for (int k = 0; k < 720; ++k) {
    const double theta = 2.0 * M_PI * k / 720.0;
    const Mat3 Rg = (Eigen::AngleAxisd(theta, axis) * base).matrix();
    const double f = pair_objective(Rg, p, q, n, m, 1.0);
    if (f < best_f) {
      best_f = f;
      best_R = Rg;
    }
  }
  CHECK(rotation_angle_deg(best_R, est.rotation) <= 0.5);
  CHECK(pair_objective(est.rotation, p, q, n, m, 1.0) <= best_f + 1e-12);
}

TEST_CASE("estimate_rotation flags ambiguous fits and always returns a rotation") {
  SUBCASE("coincident points with parallel normals are ambiguous") {
    const std::vector<Vec3> zeros = {Vec3::Zero(), Vec3::Zero()};
    const std::vector<Vec3> n = {Vec3(0, 0, 1), Vec3(0, 0, 1)};
    const RotationEstimate est = estimate_rotation(zeros, zeros, n, n, 1.0);
    CHECK(est.degenerate);
    CHECK((est.rotation - Mat3::Identity()).norm() == 0.0);
  }

  SUBCASE("every output is orthonormal with unit determinant") {
    Rng rng(33);
    for (int trial = 0; trial < 50; ++trial) {
      const int count = 2 + static_cast<int>(rng.uniform_index(6));
      std::vector<Vec3> p, q, n, m;
      for (int i = 0; i < count; ++i) {
        p.push_back(rng.gaussian_vec3() * 0.01);
        q.push_back(rng.gaussian_vec3() * 0.01);
        n.push_back(rng.gaussian_vec3().normalized());
        m.push_back(rng.gaussian_vec3().normalized());
      }
      if (trial % 5 == 0) {
        // Rank-deficient: all points on one ray, parallel normals.
        for (int i = 0; i < count; ++i) {
          p[i] = Vec3(0.01 * i, 0, 0);
          q[i] = Vec3(0, 0.01 * i, 0);
          n[i] = Vec3(0, 0, 1);
          m[i] = Vec3(1, 0, 0);
        }
      }
      const RotationEstimate est = estimate_rotation(p, q, n, m, 1.0);
      CHECK((est.rotation.transpose() * est.rotation - Mat3::Identity()).norm() < 1e-9);
      CHECK(std::abs(est.rotation.determinant() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("estimate_translation is the closed-form mean") {
  SUBCASE("identity rotation with a constant offset") {
    std::vector<Vec3> p = {Vec3(0, 0, 0), Vec3(0.01, 0, 0), Vec3(0, 0.01, 0)};
    std::vector<Vec3> q;
    const Vec3 offset(1e-3, 2e-3, 3e-3);
    for (const Vec3& v : p) q.push_back(v + offset);
    CHECK((estimate_translation(p, q, Mat3::Identity()) - offset).norm() < 1e-15);
  }

  SUBCASE("single pair") {
    Rng rng(5);
    const Mat3 R = rng.random_rotation();
    const Vec3 p(0.01, -0.02, 0.03), q(0.05, 0.01, -0.02);
    CHECK((estimate_translation({p}, {q}, R) - (q - R * p)).norm() < 1e-15);
  }

  SUBCASE("random pairs match the normal-equations oracle") {
    Rng rng(9);
    const Mat3 R = rng.random_rotation();
    std::vector<Vec3> p, q;
    for (int i = 0; i < 25; ++i) {
      p.push_back(rng.gaussian_vec3() * 0.02);
      q.push_back(rng.gaussian_vec3() * 0.02);
    }
    // Minimize sum |q - Rp - t|^2: assemble A t = b explicitly.
    Mat3 A = Mat3::Zero();
    Vec3 b = Vec3::Zero();
    for (std::size_t i = 0; i < p.size(); ++i) {
      A += Mat3::Identity();
      b += q[i] - R * p[i];
    }
    const Vec3 oracle = A.ldlt().solve(b);
    CHECK((estimate_translation(p, q, R) - oracle).norm() < 1e-12);
  }
}

TEST_CASE("refine_point_to_plane converges on curved patches") {
  const OrientedPointCloud cap = sphere_cap(0.03, M_PI / 5.0, 1e-3);
  const KdTree index(cap.points);
  PipelineConfig cfg;

  SUBCASE("perfect alignment stays put with near-zero residual") {
    const RefineResult r =
        refine_point_to_plane(RigidTransform::identity(), cap, cap, index, cfg);
    CHECK(r.converged);
    CHECK(r.residual < 1e-20);
    CHECK((r.transform.rotation() - Mat3::Identity()).norm() < 1e-9);
    CHECK(r.transform.translation().norm() < 1e-9);
  }

  SUBCASE("a half-voxel offset is pulled back to ground truth") {
    const Vec3 offset = 0.5 * cfg.voxel_size * Vec3(1, -2, 2).normalized();
    const RigidTransform initial(Mat3::Identity(), offset);
    const RefineResult r = refine_point_to_plane(initial, cap, cap, index, cfg);
    CHECK(r.converged);
    CHECK(r.transform.translation().norm() < 0.1 * cfg.voxel_size);
    CHECK(rotation_angle_deg(r.transform.rotation(), Mat3::Identity()) < 0.5);
  }
}

TEST_CASE("refine_point_to_plane leaves the planar null space untouched") {
  const OrientedPointCloud plane = plane_grid(0.05, 1e-3);
  const KdTree index(plane.points);
  PipelineConfig cfg;

  const Vec3 offset(2e-3, 1e-3, 0.5e-3);  // in-plane x, y; off-plane z
  const RefineResult r = refine_point_to_plane(RigidTransform(Mat3::Identity(), offset),
                                               plane, plane, index, cfg);
  CHECK(r.converged);
  // The normal direction is observable and corrected...
  CHECK(std::abs(r.transform.translation().z()) < 1e-8);
  // ...while the in-plane offset is invisible to a point-to-plane objective.
  CHECK(std::abs(r.transform.translation().x() - offset.x()) < 1e-8);
  CHECK(std::abs(r.transform.translation().y() - offset.y()) < 1e-8);
  CHECK(r.residual < 1e-18);
}

TEST_CASE("refine_point_to_plane starves gracefully") {
  const OrientedPointCloud cap = sphere_cap(0.03, M_PI / 6.0, 1.5e-3);
  OrientedPointCloud far_away;
  for (int i = 0; i < 20; ++i) {
    far_away.push_back(Vec3(1.0 + i * 1e-3, 0, 0), Vec3(0, 0, 1));
  }
  const KdTree index(cap.points);
  PipelineConfig cfg;
  const RigidTransform initial = RigidTransform::rotation_z(0.3);
  const RefineResult r = refine_point_to_plane(initial, far_away, cap, index, cfg);
  CHECK(!r.converged);
  CHECK(r.residual == kRefinementFailureResidual);
  CHECK((r.transform.matrix() - initial.matrix()).norm() == 0.0);
}

TEST_CASE("verify_and_select takes the maximum-likelihood hypothesis") {
  auto hyp = [](double residual, int clique_size, bool converged) {
    return make_hypothesis(RigidTransform::rotation_z(residual), residual, clique_size,
                           converged);
  };

  SUBCASE("argmin residual wins") {
    const SelectionResult sel =
        verify_and_select({hyp(0.5, 3, true), hyp(0.1, 3, true), hyp(0.9, 3, true)});
    CHECK(sel.best_index == 1);
    CHECK(sel.success);
    CHECK(sel.best.residual == 0.1);
  }

  SUBCASE("weights follow exp(-residual) with w(0) = 1") {
    const PoseHypothesis h = make_hypothesis(RigidTransform::identity(), 0.0, 4, true);
    CHECK(h.weight == 1.0);
    const SelectionResult sel = verify_and_select({hyp(0.5, 3, true), hyp(2.5, 3, true)});
    for (const PoseHypothesis& p : sel.all) {
      CHECK(p.weight == doctest::Approx(std::exp(-p.residual)).epsilon(1e-12));
    }
    CHECK(sel.normalized_weights.size() == 2);
    CHECK(sel.normalized_weights[0] + sel.normalized_weights[1] ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sel.normalized_weights[0] > sel.normalized_weights[1]);
  }

  SUBCASE("ties prefer larger cliques, then earlier entries") {
    const SelectionResult sel =
        verify_and_select({hyp(0.2, 3, true), hyp(0.2, 5, true), hyp(0.2, 5, true)});
    CHECK(sel.best_index == 1);
  }

  SUBCASE("single non-converged hypothesis is returned with the failure flag") {
    const SelectionResult sel = verify_and_select({hyp(3.0, 3, false)});
    CHECK(sel.best_index == 0);
    CHECK(!sel.success);
  }

  SUBCASE("selection is order-invariant") {
    const std::vector<PoseHypothesis> a = {hyp(0.5, 3, true), hyp(0.1, 4, true),
                                           hyp(0.9, 2, true)};
    const std::vector<PoseHypothesis> b = {a[2], a[0], a[1]};
    const SelectionResult sa = verify_and_select(a);
    const SelectionResult sb = verify_and_select(b);
    CHECK(sa.best.residual == sb.best.residual);
    CHECK((sa.best.transform.matrix() - sb.best.transform.matrix()).norm() == 0.0);
  }

  SUBCASE("empty hypothesis list throws") {
    CHECK_THROWS_AS(verify_and_select({}), std::invalid_argument);
  }
}

TEST_CASE("register_clouds recovers noise-free poses on an asymmetric surface") {
  const TriangleMesh mesh = make_procedural_mesh("blob_a");
  PipelineConfig cfg;
  for (std::uint64_t seed : {11u, 29u}) {
    const SyntheticScene scene = generate_scene(mesh, 0.12, NoiseSpec{}, seed, cfg.voxel_size);
    const RegistrationResult r = register_clouds(scene.source, scene.target, cfg);
    REQUIRE(r.success);
    INFO("seed " << seed << ": re=" << rotation_error_deg(scene.gt, r.best.transform)
                 << " deg, te=" << translation_error(scene.gt, r.best.transform));
    CHECK(rotation_error_deg(scene.gt, r.best.transform) < 0.1);
    CHECK(translation_error(scene.gt, r.best.transform) < 0.1e-3);
    CHECK(r.best.weight == doctest::Approx(std::exp(-r.best.residual)).epsilon(1e-12));
    CHECK(r.failure_reason.empty());
  }
}

TEST_CASE("register_clouds scores symmetric surfaces against the symmetry orbit") {
  // A plain ellipsoid is invariant under 180-degree flips about its axes, so
  // registration may legally land on any orbit member.
  const TriangleMesh mesh = make_procedural_mesh("superellipsoid_a");
  PipelineConfig cfg;
  const SyntheticScene scene = generate_scene(mesh, 0.15, NoiseSpec{}, 3, cfg.voxel_size);
  const RegistrationResult r = register_clouds(scene.source, scene.target, cfg);
  REQUIRE(r.success);

  double best_re = 1e9, best_te = 1e9;
  for (int axis = -1; axis < 3; ++axis) {
    Mat3 sym = Mat3::Identity();
    if (axis >= 0) {
      sym = Eigen::AngleAxisd(M_PI, Vec3::Unit(axis)).toRotationMatrix();
    }
    const RigidTransform gt_sym(sym * scene.gt.rotation(), sym * scene.gt.translation());
    best_re = std::min(best_re, rotation_error_deg(gt_sym, r.best.transform));
    best_te = std::min(best_te, translation_error(gt_sym, r.best.transform));
  }
  INFO("orbit re=" << best_re << " deg, te=" << best_te);
  CHECK(best_re < 1.0);
  CHECK(best_te < 1e-3);
}

TEST_CASE("register_clouds reports starvation as failure, not a crash") {
  PipelineConfig cfg;
  OrientedPointCloud target;
  for (int i = 0; i < 400; ++i) {
    target.push_back(Vec3((i % 20) * 2e-3, (i / 20) * 2e-3, 0), Vec3(0, 0, 1));
  }

  SUBCASE("source too small to form cliques") {
    OrientedPointCloud tiny;
    tiny.push_back(Vec3(0, 0, 0), Vec3(0, 0, 1));
    tiny.push_back(Vec3(5e-3, 0, 0), Vec3(0, 0, 1));
    const RegistrationResult r = register_clouds(tiny, target, cfg);
    CHECK(!r.success);
    CHECK(!r.failure_reason.empty());
    CHECK((r.best.transform.matrix() - Mat4::Identity()).norm() == 0.0);
  }

  SUBCASE("incompatible scales leave the graph without usable cliques") {
    OrientedPointCloud source;
    for (int i = 0; i < 30; ++i) {
      source.push_back(Vec3(i * 50e-3, 0, 0), Vec3(0, 0, 1));
    }
    const RegistrationResult r = register_clouds(source, target, cfg);
    CHECK(!r.success);
    CHECK(!r.failure_reason.empty());
  }

  SUBCASE("empty inputs fail without claiming a pose") {
    const RegistrationResult r = register_clouds(OrientedPointCloud{}, target, cfg);
    CHECK(!r.success);
    CHECK(!r.failure_reason.empty());
  }
}
