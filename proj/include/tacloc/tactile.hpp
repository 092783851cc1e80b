// Tactile front end: height-map recovery from gradient maps via a spectral
// Poisson solve, conversion to oriented points, and submap assembly from
// end-effector poses.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tacloc/geometry.hpp"

namespace tacloc {

/// Surface slope grids dH/dx and dH/dy. Grids are stored row-major with
/// entry (v, u): v indexes rows (the y direction), u indexes columns (x).
struct GradientMaps {
  Eigen::MatrixXd gx;
  Eigen::MatrixXd gy;
  double pixel_pitch = 0.0;  // meters per pixel

  long width() const { return gx.cols(); }
  long height() const { return gx.rows(); }
  void validate() const;
};

struct HeightMap {
  Eigen::MatrixXd h;         // meters
  double pixel_pitch = 0.0;  // meters per pixel

  long width() const { return h.cols(); }
  long height() const { return h.rows(); }
  void validate() const;
};

/// One touch: a sensor-frame cloud plus the end-effector pose at capture.
struct TouchFrame {
  OrientedPointCloud cloud;
  RigidTransform ee_pose;
};

/// Least-squares surface from gradients: solves the discrete Poisson equation
/// (Laplacian of H equals the divergence of G) with reflective boundaries via
/// the type-II cosine transform; the free additive constant is fixed by
/// zero-mean normalization. Exact for gradient fields of sampled planes.
HeightMap poisson_solve_dct(const GradientMaps& g);

/// Emits point (u*pitch, v*pitch, h) with normal (-gx, -gy, 1) normalized for
/// every pixel with height strictly above `contact_threshold` (an absolute
/// height; see contact_threshold_above_median for the default policy).
OrientedPointCloud heightmap_to_cloud(const HeightMap& h, const GradientMaps& g,
                                      double contact_threshold);

/// Default contact-mask policy: the per-frame background is the median
/// height, and contact is anything `offset` above it.
double contact_threshold_above_median(const HeightMap& h, double offset);

/// Expresses every frame's cloud in the first frame's sensor pose (the
/// submap origin is the first touch), concatenates, and voxel-downsamples.
OrientedPointCloud build_submap(const std::vector<TouchFrame>& frames,
                                const RigidTransform& sensor_in_ee,
                                double voxel_size);

/// Grid file: ASCII header `W H pixel_pitch_mm`, then H rows of W values.
Eigen::MatrixXd load_grid(const std::string& path, double& pixel_pitch);
void save_grid(const std::string& path, const Eigen::MatrixXd& grid, double pixel_pitch);

}  // namespace tacloc
