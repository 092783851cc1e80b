#include "tacloc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "tacloc/features.hpp"

namespace tacloc {

RotationEstimate estimate_rotation(const std::vector<Vec3>& p_centered,
                                   const std::vector<Vec3>& q_centered,
                                   const std::vector<Vec3>& n,
                                   const std::vector<Vec3>& m, double alpha) {
  if (p_centered.size() != q_centered.size() || p_centered.size() < 2)
    throw std::invalid_argument("estimate_rotation: need >= 2 point pairs");
  if (alpha < 0.0) throw std::invalid_argument("estimate_rotation: alpha < 0");
  const bool use_normals = alpha > 0.0 && !n.empty();
  if (use_normals && (n.size() != p_centered.size() || m.size() != n.size()))
    throw std::invalid_argument("estimate_rotation: normal count mismatch");

  Mat3 cross = Mat3::Zero();
  for (std::size_t i = 0; i < p_centered.size(); ++i) {
    cross += q_centered[i] * p_centered[i].transpose();
  }
  if (use_normals) {
    for (std::size_t i = 0; i < n.size(); ++i) {
      cross += alpha * m[i] * n[i].transpose();
    }
  }

  Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sigma = svd.singularValues();
  RotationEstimate out;
  if (sigma(1) <= 1e-12 * std::max(sigma(0), 1e-300)) {
    // Two vanishing singular values leave a one-parameter family of optimal
    // rotations; report it rather than picking one arbitrarily.
    out.degenerate = true;
    return out;
  }
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  out.rotation = svd.matrixU() * d * svd.matrixV().transpose();
  // Guard accumulated roundoff so downstream invariant checks never trip.
  out.rotation = RigidTransform(out.rotation, Vec3::Zero()).rotation();
  return out;
}

Vec3 estimate_translation(const std::vector<Vec3>& p, const std::vector<Vec3>& q,
                          const Mat3& rotation) {
  if (p.size() != q.size() || p.empty())
    throw std::invalid_argument("estimate_translation: need >= 1 pair");
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < p.size(); ++i) sum += q[i] - rotation * p[i];
  return sum / static_cast<double>(p.size());
}

namespace {

Mat3 rodrigues(const Vec3& omega) {
  const double angle = omega.norm();
  if (angle < 1e-12) {
    Mat3 skew;
    skew << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
    return Mat3::Identity() + skew;  // first order is exact to double here
  }
  return Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
}

struct Association {
  Vec3 source;  // untransformed source point
  Vec3 target;
  Vec3 normal;
};

std::vector<Association> associate(const RigidTransform& pose,
                                   const OrientedPointCloud& source,
                                   const OrientedPointCloud& target,
                                   const KdTree& index, double gate) {
  std::vector<Association> out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Vec3 moved = pose * source.points[i];
    const KdTree::Hit hit = index.nearest(moved);
    if (hit.distance > gate) continue;
    out.push_back({source.points[i], target.points[hit.index], target.normals[hit.index]});
  }
  return out;
}

double mean_squared_residual(const RigidTransform& pose,
                             const std::vector<Association>& assoc) {
  double sum = 0.0;
  for (const Association& a : assoc) {
    const double r = (pose * a.source - a.target).dot(a.normal);
    sum += r * r;
  }
  return sum / static_cast<double>(assoc.size());
}

}  // namespace

RefineResult refine_point_to_plane(const RigidTransform& initial,
                                   const OrientedPointCloud& source,
                                   const OrientedPointCloud& target,
                                   const KdTree& target_index,
                                   const PipelineConfig& config) {
  const double gate = 3.0 * config.delta_d;
  RigidTransform pose = initial;
  bool converged = false;

  for (int iter = 0; iter < config.refine_max_iters; ++iter) {
    const std::vector<Association> assoc =
        associate(pose, source, target, target_index, gate);
    if (assoc.size() < 6) {
      return {initial, kRefinementFailureResidual, false};
    }

    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (const Association& a : assoc) {
      const Vec3 moved = pose * a.source;
      const double r = (moved - a.target).dot(a.normal);
      Eigen::Matrix<double, 6, 1> j;
      j.head<3>() = moved.cross(a.normal);
      j.tail<3>() = a.normal;
      jtj += j * j.transpose();
      jtr += j * r;
    }
    // Minimum-norm solve: point-to-plane has a null space on featureless
    // geometry (e.g. in-plane motion over a plane) and the pseudo-inverse
    // leaves those directions untouched.
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 6, 6>> cod(jtj);
    Eigen::Matrix<double, 6, 1> step = cod.solve(-jtr);

    const double before = mean_squared_residual(pose, assoc);
    RigidTransform candidate = pose;
    double applied_step_norm = 0.0;
    bool accepted = false;
    for (int halving = 0; halving <= 5; ++halving) {
      const Vec3 omega = step.head<3>();
      const Vec3 dt = step.tail<3>();
      const Mat3 dr = rodrigues(omega);
      candidate = RigidTransform(dr * pose.rotation(), dr * pose.translation() + dt);
      if (mean_squared_residual(candidate, assoc) <= before) {
        accepted = true;
        applied_step_norm = dt.norm();
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent even after halving; give up here

    pose = candidate;
    if (applied_step_norm < config.refine_tol) {
      converged = true;
      break;
    }
  }

  // Fresh associations at the final pose define the reported residual.
  const std::vector<Association> final_assoc =
      associate(pose, source, target, target_index, gate);
  if (final_assoc.size() < 6) {
    return {initial, kRefinementFailureResidual, false};
  }
  return {pose, mean_squared_residual(pose, final_assoc), converged};
}

PoseHypothesis make_hypothesis(const RigidTransform& transform, double residual,
                               int clique_size, bool converged) {
  PoseHypothesis h;
  h.transform = transform;
  h.residual = residual;
  h.weight = std::exp(-residual);
  h.clique_size = clique_size;
  h.converged = converged;
  return h;
}

SelectionResult verify_and_select(const std::vector<PoseHypothesis>& hypotheses) {
  if (hypotheses.empty())
    throw std::invalid_argument("verify_and_select: no hypotheses");

  SelectionResult sel;
  sel.all = hypotheses;
  int best = 0;
  for (int i = 1; i < static_cast<int>(hypotheses.size()); ++i) {
    const PoseHypothesis& a = hypotheses[i];
    const PoseHypothesis& b = hypotheses[best];
    if (a.residual < b.residual ||
        (a.residual == b.residual && a.clique_size > b.clique_size)) {
      best = i;
    }
  }
  sel.best = hypotheses[best];
  sel.best_index = best;

  double total = 0.0;
  for (const PoseHypothesis& h : hypotheses) total += h.weight;
  sel.normalized_weights.reserve(hypotheses.size());
  for (const PoseHypothesis& h : hypotheses) {
    sel.normalized_weights.push_back(total > 0.0 ? h.weight / total : 0.0);
  }

  sel.success = false;
  for (const PoseHypothesis& h : hypotheses) {
    if (h.converged) {
      sel.success = true;
      break;
    }
  }
  return sel;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

RegistrationResult fail_result(StageTimings timings, std::string reason) {
  RegistrationResult r;
  r.best = make_hypothesis(RigidTransform::identity(), kRefinementFailureResidual, 0, false);
  r.success = false;
  r.timings = timings;
  r.failure_reason = std::move(reason);
  return r;
}

OrientedPointCloud gather_keypoints(const OrientedPointCloud& cloud,
                                    const std::vector<int>& indices) {
  OrientedPointCloud out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(cloud.points[i], cloud.normals[i]);
  return out;
}

}  // namespace

RegistrationResult register_clouds(const OrientedPointCloud& source,
                                   const OrientedPointCloud& target,
                                   const PipelineConfig& config) {
  config.validate();
  source.validate();
  target.validate();
  if (source.empty() || target.empty()) {
    return fail_result({}, "empty input cloud");
  }

  StageTimings timings;

  auto t0 = Clock::now();
  const OrientedPointCloud src = voxel_downsample(source, config.voxel_size);
  const OrientedPointCloud tgt = voxel_downsample(target, config.voxel_size);
  timings.downsample_ms = ms_since(t0);
  if (src.empty() || tgt.empty()) {
    return fail_result(timings, "empty cloud after downsampling");
  }

  t0 = Clock::now();
  const double salient = config.effective_iss_salient_radius();
  const double nms = config.effective_iss_nms_radius();
  std::vector<int> src_kp_idx =
      iss_keypoints(src, salient, nms, config.iss_gamma21, config.iss_gamma32);
  std::vector<int> tgt_kp_idx =
      iss_keypoints(tgt, salient, nms, config.iss_gamma21, config.iss_gamma32);
  // Feature-poor patches (flat contact regions) starve ISS; fall back to a
  // uniform grid so failure surfaces in verification, not the front end.
  if (src_kp_idx.size() < 10) src_kp_idx = uniform_keypoints(src, 3.0 * config.voxel_size);
  if (tgt_kp_idx.size() < 10) tgt_kp_idx = uniform_keypoints(tgt, 3.0 * config.voxel_size);
  timings.keypoints_ms = ms_since(t0);
  if (src_kp_idx.size() < 3 || tgt_kp_idx.size() < 3) {
    return fail_result(timings, "keypoint starvation");
  }

  t0 = Clock::now();
  const std::vector<Descriptor> src_desc = fpfh(src, src_kp_idx, config.fpfh_radius);
  const std::vector<Descriptor> tgt_desc = fpfh(tgt, tgt_kp_idx, config.fpfh_radius);
  timings.descriptors_ms = ms_since(t0);

  t0 = Clock::now();
  const std::vector<Correspondence> matches =
      match_features(src_desc, tgt_desc, config.num_initial_correspondences);
  timings.matching_ms = ms_since(t0);
  if (matches.size() < 2) {
    return fail_result(timings, "too few correspondences");
  }

  const OrientedPointCloud src_kp = gather_keypoints(src, src_kp_idx);
  const OrientedPointCloud tgt_kp = gather_keypoints(tgt, tgt_kp_idx);

  t0 = Clock::now();
  const CompatibilityGraph graph =
      build_graph(matches, src_kp, tgt_kp, config.delta_d, config.delta_alpha);
  timings.graph_ms = ms_since(t0);

  t0 = Clock::now();
  const CliqueEnumeration enumeration =
      maximal_cliques(graph, config.num_candidates, config.clique_budget);
  const CliqueSelection selection =
      select_top_cliques(enumeration.cliques, config.num_candidates);
  timings.cliques_ms = ms_since(t0);
  if (selection.cliques.empty()) {
    return fail_result(timings, "no usable cliques");
  }

  t0 = Clock::now();
  std::vector<RigidTransform> initial_poses;
  std::vector<int> clique_sizes;
  initial_poses.reserve(selection.cliques.size());
  for (const Clique& clique : selection.cliques) {
    std::vector<Vec3> p, q, n, m;
    p.reserve(clique.members.size());
    for (int node : clique.members) {
      const Correspondence& c = graph.nodes()[node];
      p.push_back(src_kp.points[c.src_index]);
      q.push_back(tgt_kp.points[c.tgt_index]);
      n.push_back(src_kp.normals[c.src_index]);
      m.push_back(tgt_kp.normals[c.tgt_index]);
    }
    Vec3 p_mean = Vec3::Zero(), q_mean = Vec3::Zero();
    for (const Vec3& v : p) p_mean += v;
    for (const Vec3& v : q) q_mean += v;
    p_mean /= static_cast<double>(p.size());
    q_mean /= static_cast<double>(q.size());
    std::vector<Vec3> pc = p, qc = q;
    for (Vec3& v : pc) v -= p_mean;
    for (Vec3& v : qc) v -= q_mean;

    const RotationEstimate rot = estimate_rotation(pc, qc, n, m, config.alpha_weight);
    const Vec3 t = estimate_translation(p, q, rot.rotation);
    initial_poses.emplace_back(rot.rotation, t);
    clique_sizes.push_back(clique.size());
  }
  timings.estimation_ms = ms_since(t0);

  t0 = Clock::now();
  const KdTree tgt_index(tgt.points);
  std::vector<PoseHypothesis> hypotheses;
  hypotheses.reserve(initial_poses.size());
  for (std::size_t k = 0; k < initial_poses.size(); ++k) {
    const RefineResult refined =
        refine_point_to_plane(initial_poses[k], src, tgt, tgt_index, config);
    hypotheses.push_back(make_hypothesis(refined.transform, refined.residual,
                                         clique_sizes[k], refined.converged));
  }
  const SelectionResult sel = verify_and_select(hypotheses);
  timings.verification_ms = ms_since(t0);

  RegistrationResult result;
  result.best = sel.best;
  result.hypotheses = sel.all;
  result.normalized_weights = sel.normalized_weights;
  result.success = sel.success;
  result.timings = timings;
  if (!sel.success) result.failure_reason = "no hypothesis converged";
  return result;
}

}  // namespace tacloc
