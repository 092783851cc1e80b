#include "tacloc/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "tacloc/features.hpp"

namespace tacloc {

void GradientMaps::validate() const {
  if (gx.rows() != gy.rows() || gx.cols() != gy.cols())
    throw std::invalid_argument("gradients: gx/gy dimension mismatch");
  if (gx.rows() < 2 || gx.cols() < 2)
    throw std::invalid_argument("gradients: grid must be at least 2x2");
  if (pixel_pitch <= 0.0) throw std::invalid_argument("gradients: pixel_pitch <= 0");
  if (!gx.allFinite() || !gy.allFinite())
    throw std::invalid_argument("gradients: non-finite values");
}

void HeightMap::validate() const {
  if (h.rows() < 2 || h.cols() < 2)
    throw std::invalid_argument("heightmap: grid must be at least 2x2");
  if (pixel_pitch <= 0.0) throw std::invalid_argument("heightmap: pixel_pitch <= 0");
  if (!h.allFinite()) throw std::invalid_argument("heightmap: non-finite values");
}

namespace {

/// Forward type-II cosine transform matrix: C(k, n) = cos(pi*(n+0.5)*k/N).
/// Its rows are eigenvectors of the reflective second-difference stencil with
/// eigenvalues 2*cos(pi*k/N) - 2.
Eigen::MatrixXd dct2_matrix(long n) {
  Eigen::MatrixXd c(n, n);
  for (long k = 0; k < n; ++k) {
    for (long i = 0; i < n; ++i) {
      c(k, i) = std::cos(M_PI * (static_cast<double>(i) + 0.5) * static_cast<double>(k) /
                         static_cast<double>(n));
    }
  }
  return c;
}

/// Inverse of dct2_matrix: B(n, k) = w_k cos(pi*(n+0.5)*k/N), w_0 = 1/N,
/// w_k = 2/N otherwise.
Eigen::MatrixXd idct2_matrix(long n) {
  Eigen::MatrixXd b(n, n);
  for (long i = 0; i < n; ++i) {
    for (long k = 0; k < n; ++k) {
      const double w = (k == 0) ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
      b(i, k) = w * std::cos(M_PI * (static_cast<double>(i) + 0.5) * static_cast<double>(k) /
                             static_cast<double>(n));
    }
  }
  return b;
}

double stencil_eigenvalue(long k, long n) {
  return 2.0 * std::cos(M_PI * static_cast<double>(k) / static_cast<double>(n)) - 2.0;
}

}  // namespace

HeightMap poisson_solve_dct(const GradientMaps& g) {
  g.validate();
  const long rows = g.height();  // v / y
  const long cols = g.width();   // u / x
  const double pitch = g.pixel_pitch;

  // Flux-form divergence: average the gradient onto interior cell edges,
  // difference the edges back onto pixels, and drop the missing boundary
  // edges. This is (up to sign) the adjoint of the interior-edge gradient
  // operator, so the least-squares normal equations reduce to L*H = div with
  // L the reflective 5-point Laplacian — exactly what the cosine basis
  // diagonalizes. On interior pixels this equals central differencing; at
  // borders it folds in the one-sided boundary data. Every edge value enters
  // once positively and once negatively, so div sums to zero and the
  // zero-frequency bin carries no information (the gauge fixed below).
  Eigen::MatrixXd div = Eigen::MatrixXd::Zero(rows, cols);
  for (long v = 0; v < rows; ++v) {
    for (long u = 0; u + 1 < cols; ++u) {
      const double edge = 0.5 * (g.gx(v, u) + g.gx(v, u + 1));
      div(v, u) += edge / pitch;
      div(v, u + 1) -= edge / pitch;
    }
  }
  for (long v = 0; v + 1 < rows; ++v) {
    for (long u = 0; u < cols; ++u) {
      const double edge = 0.5 * (g.gy(v, u) + g.gy(v + 1, u));
      div(v, u) += edge / pitch;
      div(v + 1, u) -= edge / pitch;
    }
  }

  Eigen::MatrixXd fhat = dct2_matrix(rows) * div * dct2_matrix(cols).transpose();
  Eigen::MatrixXd hhat = Eigen::MatrixXd::Zero(rows, cols);
  for (long kv = 0; kv < rows; ++kv) {
    for (long ku = 0; ku < cols; ++ku) {
      if (kv == 0 && ku == 0) continue;  // gauge freedom; fixed to zero mean
      const double lambda = stencil_eigenvalue(kv, rows) + stencil_eigenvalue(ku, cols);
      hhat(kv, ku) = pitch * pitch * fhat(kv, ku) / lambda;
    }
  }

  HeightMap out;
  out.pixel_pitch = pitch;
  out.h = idct2_matrix(rows) * hhat * idct2_matrix(cols).transpose();
  out.h.array() -= out.h.mean();
  return out;
}

OrientedPointCloud heightmap_to_cloud(const HeightMap& h, const GradientMaps& g,
                                      double contact_threshold) {
  h.validate();
  g.validate();
  if (h.width() != g.width() || h.height() != g.height())
    throw std::invalid_argument("heightmap_to_cloud: height/gradient dimension mismatch");

  OrientedPointCloud out;
  for (long v = 0; v < h.height(); ++v) {
    for (long u = 0; u < h.width(); ++u) {
      const double z = h.h(v, u);
      if (z <= contact_threshold) continue;
      const Vec3 p(static_cast<double>(u) * h.pixel_pitch,
                   static_cast<double>(v) * h.pixel_pitch, z);
      const Vec3 n = Vec3(-g.gx(v, u), -g.gy(v, u), 1.0).normalized();
      out.push_back(p, n);
    }
  }
  return out;
}

double contact_threshold_above_median(const HeightMap& h, double offset) {
  std::vector<double> values(h.h.data(), h.h.data() + h.h.size());
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid] + offset;
}

OrientedPointCloud build_submap(const std::vector<TouchFrame>& frames,
                                const RigidTransform& sensor_in_ee,
                                double voxel_size) {
  if (frames.empty()) throw std::invalid_argument("build_submap: no frames");
  for (const TouchFrame& f : frames) {
    if (f.cloud.empty()) throw std::invalid_argument("build_submap: empty frame cloud");
    f.cloud.validate();
  }

  const RigidTransform first = compose(frames[0].ee_pose, sensor_in_ee);
  const RigidTransform first_inv = first.inverse();

  OrientedPointCloud merged;
  for (const TouchFrame& f : frames) {
    const RigidTransform sensor_pose = compose(f.ee_pose, sensor_in_ee);
    const RigidTransform rel = compose(first_inv, sensor_pose);
    const OrientedPointCloud placed = apply(rel, f.cloud);
    merged.points.insert(merged.points.end(), placed.points.begin(), placed.points.end());
    merged.normals.insert(merged.normals.end(), placed.normals.begin(),
                          placed.normals.end());
  }
  return voxel_downsample(merged, voxel_size);
}

Eigen::MatrixXd load_grid(const std::string& path, double& pixel_pitch) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("grid: cannot open '" + path + "'");
  long w = 0, h = 0;
  double pitch_mm = 0.0;
  if (!(in >> w >> h >> pitch_mm))
    throw std::runtime_error("grid: bad header in '" + path + "' (want: W H pitch_mm)");
  if (w < 2 || h < 2 || pitch_mm <= 0.0)
    throw std::runtime_error("grid: invalid header values in '" + path + "'");
  Eigen::MatrixXd grid(h, w);
  for (long v = 0; v < h; ++v) {
    for (long u = 0; u < w; ++u) {
      if (!(in >> grid(v, u)))
        throw std::runtime_error("grid: truncated data in '" + path + "'");
    }
  }
  pixel_pitch = pitch_mm * 1e-3;
  return grid;
}

void save_grid(const std::string& path, const Eigen::MatrixXd& grid, double pixel_pitch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("grid: cannot open '" + path + "' for writing");
  out << grid.cols() << ' ' << grid.rows() << ' ' << std::setprecision(17)
      << pixel_pitch * 1e3 << '\n';
  out << std::setprecision(17);
  for (long v = 0; v < grid.rows(); ++v) {
    for (long u = 0; u < grid.cols(); ++u) {
      out << grid(v, u) << (u + 1 == grid.cols() ? '\n' : ' ');
    }
  }
  if (!out) throw std::runtime_error("grid: write failed for '" + path + "'");
}

}  // namespace tacloc
