// Pipeline parameters. Internally SI (meters, radians); the key-value config
// file uses millimeters and degrees.
#pragma once

#include <string>

namespace tacloc {

struct PipelineConfig {
  double voxel_size = 1e-3;                 // m
  double fpfh_radius = 5e-3;                // m
  double delta_d = 6e-3;                    // m, pairwise distance bound
  double delta_alpha = 30.0 * 0.017453292519943295;  // rad, pairwise angle bound
  int num_candidates = 300;                 // K, pose hypotheses kept
  double alpha_weight = 1.0;                // normal-term weight in rotation fit
  int num_initial_correspondences = 500;
  int refine_max_iters = 30;
  double refine_tol = 1e-5;                 // m, translation-increment stop
  double contact_threshold = 1e-4;          // m above background for contact mask

  // ISS keypoints; radii <= 0 mean "derive from voxel_size" (3x and 2x).
  double iss_salient_radius = 0.0;          // m
  double iss_nms_radius = 0.0;              // m
  double iss_gamma21 = 0.975;
  double iss_gamma32 = 0.975;

  long clique_budget = 1000000;             // Bron-Kerbosch expansion cap
  int ransac_iters = 10000;                 // baseline iteration budget

  double effective_iss_salient_radius() const {
    return iss_salient_radius > 0.0 ? iss_salient_radius : 3.0 * voxel_size;
  }
  double effective_iss_nms_radius() const {
    return iss_nms_radius > 0.0 ? iss_nms_radius : 2.0 * voxel_size;
  }

  /// Throws std::invalid_argument when any constraint is violated.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment; unknown keys are an
/// error. Lengths are read as millimeters and angles as degrees.
PipelineConfig load_config(const std::string& path);

/// Parses config text directly (same grammar as load_config).
PipelineConfig parse_config(const std::string& text);

}  // namespace tacloc
