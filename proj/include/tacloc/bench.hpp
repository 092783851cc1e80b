// Synthetic benchmark suite: procedural meshes, ground-truth scenes, sliding
// simulation, error metrics, recall/pruning/sensitivity studies, and the
// RANSAC baseline.
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tacloc/config.hpp"
#include "tacloc/features.hpp"
#include "tacloc/geometry.hpp"
#include "tacloc/kdtree.hpp"
#include "tacloc/mesh.hpp"
#include "tacloc/solver.hpp"
#include "tacloc/tactile.hpp"

namespace tacloc {

struct NoiseSpec {
  double point_sigma = 0.0;     // m, Gaussian per point
  double ee_trans_sigma = 0.0;  // m, per-frame pose noise (sliding)
  double ee_rot_sigma = 0.0;    // rad, per-frame pose noise (sliding)
};

struct SyntheticScene {
  OrientedPointCloud target;
  OrientedPointCloud source;  // transformed noisy patch
  RigidTransform gt;          // maps source frame into target frame
  double patch_fraction = 0.0;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct RegistrationMetrics {
  double re_deg = 180.0;
  double te = 1e9;  // m
  bool success = false;
  StageTimings wallclock;
  double total_seconds = 0.0;
};

/// Names accepted by make_procedural_mesh. The blob pair is feature-rich and
/// asymmetric; the others cover symmetric failure-mode geometry.
std::vector<std::string> procedural_mesh_names();
TriangleMesh make_procedural_mesh(const std::string& name);

/// Exact point-to-surface distance backed by a centroid k-d tree over faces.
class MeshDistanceIndex {
 public:
  explicit MeshDistanceIndex(const TriangleMesh& mesh);

  struct Closest {
    Vec3 point;
    int face = -1;
    double distance = 0.0;
  };
  Closest closest(const Vec3& query) const;
  double distance(const Vec3& query) const { return closest(query).distance; }
  double rms_distance(const std::vector<Vec3>& points) const;
  const TriangleMesh& mesh() const { return mesh_; }

 private:
  TriangleMesh mesh_;
  std::vector<Vec3> centroids_;
  double max_face_radius_ = 0.0;
  KdTree tree_;
};

/// Random surface patch of ~patch_fraction of the mesh area (geodesic growth
/// from an area-weighted seed triangle), sampled at tactile density (10x the
/// target sampling), noised, and displaced by a random SE(3) whose inverse is
/// the ground truth. Deterministic per seed. Throws when the seed triangle's
/// connected component cannot supply the requested area.
SyntheticScene generate_scene(const TriangleMesh& mesh, double patch_fraction,
                              const NoiseSpec& noise, std::uint64_t seed,
                              double voxel_size);

double rotation_error_deg(const RigidTransform& gt, const RigidTransform& est);
double translation_error(const RigidTransform& gt, const RigidTransform& est);

/// Default summary criterion used by the study tables.
bool registration_success(double re_deg, double te, double re_max_deg = 5.0,
                          double te_max = 5e-3);

struct RecallCurve {
  std::vector<double> re_thresholds_deg;
  std::vector<double> re_recall;
  std::vector<double> te_thresholds;  // m
  std::vector<double> te_recall;
};

RecallCurve recall_curve(const std::vector<RegistrationMetrics>& results,
                         const std::vector<double>& re_thresholds_deg,
                         const std::vector<double>& te_thresholds);

struct RansacResult {
  RigidTransform transform;
  bool success = false;
  int inliers = 0;
};

/// 3-point RANSAC over keypoint correspondences with inlier gate delta_d and
/// Kabsch refit on the best inlier set. Deterministic per seed.
RansacResult ransac_baseline(const std::vector<Correspondence>& correspondences,
                             const OrientedPointCloud& src_kp,
                             const OrientedPointCloud& tgt_kp,
                             const PipelineConfig& config, std::uint64_t seed);

struct PruningRow {
  double delta_alpha = 0.0;  // rad
  double mean_edges = 0.0;
  double mean_cliques = 0.0;
  double mean_clique_ms = 0.0;
};

/// Per delta_alpha: mean edge count, mean maximal-clique count, and mean
/// clique-extraction wall time across scenes. The front end runs once per
/// scene so every setting sees identical correspondences.
std::vector<PruningRow> run_pruning_study(const std::vector<SyntheticScene>& scenes,
                                          const std::vector<double>& delta_alpha_values,
                                          const PipelineConfig& config);

/// Same reuse contract as run_pruning_study but sweeping delta_d as well;
/// reports mean clique-extraction time per (delta_d, delta_alpha) cell.
struct ThresholdSweepRow {
  double delta_d = 0.0;      // m
  double delta_alpha = 0.0;  // rad
  double mean_edges = 0.0;
  double mean_cliques = 0.0;
  double mean_clique_ms = 0.0;
};
std::vector<ThresholdSweepRow> run_threshold_sweep(
    const std::vector<SyntheticScene>& scenes, const std::vector<double>& delta_d_values,
    const std::vector<double>& delta_alpha_values, const PipelineConfig& config);

struct SlidingSequence {
  std::vector<TouchFrame> frames;
  RigidTransform gt;  // first-touch sensor pose: maps submap frame to mesh frame
};

/// Simulated sliding touch: a tangent walk across the surface capturing a
/// disk-shaped contact patch at fixed arc-length intervals. The first frame's
/// stored pose is exact; later frames carry the ee pose noise, so error
/// enters as submap distortion.
SlidingSequence simulate_sliding(const MeshDistanceIndex& surface, double length,
                                 double frame_spacing, double patch_radius,
                                 const NoiseSpec& noise, std::uint64_t seed,
                                 double voxel_size);

struct SensitivityRow {
  double sliding_length = 0.0;  // m
  NoiseSpec noise;
  double median_te_normalized = 0.0;  // TE / mesh bounding-box diagonal
  double median_re_deg = 0.0;
};

std::vector<SensitivityRow> run_sensitivity_study(
    const TriangleMesh& mesh, const std::vector<double>& sliding_lengths,
    const std::vector<NoiseSpec>& noise_levels, int trials,
    const PipelineConfig& config, std::uint64_t base_seed, int threads = 1);

/// Registers `trials` scenes generated from the mesh (seeds base_seed + i)
/// and reports per-trial metrics in seed order regardless of thread count.
std::vector<RegistrationMetrics> run_registration_trials(
    const TriangleMesh& mesh, double patch_fraction, const NoiseSpec& noise,
    int trials, const PipelineConfig& config, std::uint64_t base_seed,
    int threads = 1);

/// Runs fn(0..n-1) across a worker pool; results must be written by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace tacloc
