// Front-end processing: voxel downsampling, normal estimation, mesh sampling,
// ISS keypoints, FPFH descriptors, and L1 feature matching.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tacloc/geometry.hpp"
#include "tacloc/mesh.hpp"

namespace tacloc {

/// 33-bin FPFH signature: three 11-bin angular histograms laid out as
/// [alpha | phi | theta]. Each block sums to 1 unless the keypoint had no
/// neighbors, in which case the descriptor is all-zero and flagged.
struct Descriptor {
  std::array<double, 33> bins{};
  bool degenerate = false;

  double l1_distance(const Descriptor& other) const {
    double d = 0.0;
    for (int i = 0; i < 33; ++i) d += std::abs(bins[i] - other.bins[i]);
    return d;
  }
};

/// A putative keypoint match; indices refer to keypoint sets, not raw clouds.
struct Correspondence {
  int src_index = 0;
  int tgt_index = 0;
  double feature_distance = 0.0;
};

/// One point per occupied voxel: member centroid with the renormalized mean
/// member normal. Voxels whose mean normal nearly cancels (< 1e-6) are
/// dropped. Output voxels appear in first-seen input order, which makes the
/// operation deterministic and idempotent.
OrientedPointCloud voxel_downsample(const OrientedPointCloud& cloud, double voxel_size);

struct NormalEstimate {
  OrientedPointCloud cloud;
  std::vector<std::uint8_t> degenerate;  // 1 where < 3 neighbors forced (0,0,1)
};

/// Per-point normal from the smallest-eigenvalue eigenvector of the local
/// covariance within `radius`, oriented toward `viewpoint`.
NormalEstimate estimate_normals(const std::vector<Vec3>& points, double radius,
                                const Vec3& viewpoint);

/// Area-weighted uniform surface sampling; every sample carries its
/// triangle's face normal. Deterministic per seed.
OrientedPointCloud sample_mesh(const TriangleMesh& mesh, int target_count,
                               std::uint64_t seed);

/// Intrinsic Shape Signatures keypoints: eigenvalue-ratio tests on the
/// weighted neighborhood scatter matrix plus non-maximum suppression on the
/// smallest eigenvalue. Returns sorted point indices; empty when nothing
/// qualifies (perfectly planar patches).
std::vector<int> iss_keypoints(const OrientedPointCloud& cloud, double salient_radius,
                               double nms_radius, double gamma21, double gamma32);

/// Fallback keypoint selection: first point of each occupied cell of a grid
/// with the given spacing, in index order.
std::vector<int> uniform_keypoints(const OrientedPointCloud& cloud, double spacing);

/// Two-pass FPFH at the given keypoints. Keypoints without neighbors in
/// `radius` yield zero descriptors flagged degenerate.
std::vector<Descriptor> fpfh(const OrientedPointCloud& cloud,
                             const std::vector<int>& keypoints, double radius);

/// For each source keypoint, its L1-nearest target descriptor; candidates
/// sorted ascending by distance (ties by src then tgt index) and truncated to
/// max_matches.
std::vector<Correspondence> match_features(const std::vector<Descriptor>& src_desc,
                                           const std::vector<Descriptor>& tgt_desc,
                                           int max_matches);

}  // namespace tacloc
