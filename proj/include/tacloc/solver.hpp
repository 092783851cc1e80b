// Pose estimation back end: per-clique closed-form transforms, point-to-plane
// refinement, hypothesis weighting/selection, and the end-to-end pipeline.
#pragma once

#include <string>
#include <vector>

#include "tacloc/config.hpp"
#include "tacloc/geometry.hpp"
#include "tacloc/graph.hpp"
#include "tacloc/kdtree.hpp"

namespace tacloc {

/// Residual assigned when refinement cannot form enough associations. Chosen
/// so exp(-residual) is still a positive double, keeping weights in (0, 1].
inline constexpr double kRefinementFailureResidual = 700.0;

struct RotationEstimate {
  Mat3 rotation = Mat3::Identity();
  bool degenerate = false;  // ambiguous fit; identity returned
};

/// Rotation minimizing sum |q' - R p'|^2 + alpha * sum |m - R n|^2 over
/// centered point pairs (p', q') and unit normal pairs (n, m), via SVD of the
/// joint cross-covariance with reflection correction. When alpha is zero the
/// normal lists may be empty (plain point fit).
RotationEstimate estimate_rotation(const std::vector<Vec3>& p_centered,
                                   const std::vector<Vec3>& q_centered,
                                   const std::vector<Vec3>& n,
                                   const std::vector<Vec3>& m, double alpha);

/// Mean of q - R p over pairs: the closed-form least-squares translation.
Vec3 estimate_translation(const std::vector<Vec3>& p, const std::vector<Vec3>& q,
                          const Mat3& rotation);

struct RefineResult {
  RigidTransform transform;
  double residual = 0.0;  // mean squared point-to-plane error at the final pose
  bool converged = false;
};

/// Iterative point-to-plane alignment of `source` onto `target`:
/// nearest-neighbor association (gated at 3 * delta_d), linearized 6-dof
/// solve, exponential-map retraction, step halving whenever a step would
/// increase the fixed-association residual. Starvation (under 6 associations)
/// returns the initial transform with the failure sentinel residual.
RefineResult refine_point_to_plane(const RigidTransform& initial,
                                   const OrientedPointCloud& source,
                                   const OrientedPointCloud& target,
                                   const KdTree& target_index,
                                   const PipelineConfig& config);

struct PoseHypothesis {
  RigidTransform transform;
  double residual = 0.0;
  double weight = 1.0;  // exp(-residual)
  int clique_size = 0;
  bool converged = false;
};

PoseHypothesis make_hypothesis(const RigidTransform& transform, double residual,
                               int clique_size, bool converged);

struct SelectionResult {
  PoseHypothesis best;
  int best_index = -1;
  std::vector<PoseHypothesis> all;
  std::vector<double> normalized_weights;  // posterior mixture, diagnostics only
  bool success = false;                    // false when nothing converged
};

/// Maximum-likelihood selection: smallest residual wins; ties prefer the
/// larger clique, then the earlier hypothesis.
SelectionResult verify_and_select(const std::vector<PoseHypothesis>& hypotheses);

struct StageTimings {
  double downsample_ms = 0.0;
  double keypoints_ms = 0.0;
  double descriptors_ms = 0.0;
  double matching_ms = 0.0;
  double graph_ms = 0.0;
  double cliques_ms = 0.0;
  double estimation_ms = 0.0;
  double verification_ms = 0.0;
};

struct RegistrationResult {
  PoseHypothesis best;
  std::vector<PoseHypothesis> hypotheses;
  std::vector<double> normalized_weights;
  bool success = false;
  StageTimings timings;
  std::string failure_reason;  // empty on success
};

/// Full pipeline: downsample, keypoints (ISS with uniform fallback), FPFH,
/// L1 matching, compatibility graph, maximal cliques, per-clique closed-form
/// poses, point-to-plane verification, selection. The returned transform maps
/// the source (tactile submap) frame into the target (object) frame.
/// Front-end starvation yields success=false with a reason, never a throw.
RegistrationResult register_clouds(const OrientedPointCloud& source,
                                   const OrientedPointCloud& target,
                                   const PipelineConfig& config);

}  // namespace tacloc
