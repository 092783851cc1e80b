#include "tacloc/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "tacloc/kdtree.hpp"
#include "tacloc/rng.hpp"

namespace tacloc {
namespace {

struct VoxelKey {
  long x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::size_t h = std::hash<long>()(k.x);
    h ^= std::hash<long>()(k.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<long>()(k.z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

VoxelKey voxel_of(const Vec3& p, double voxel_size) {
  return {static_cast<long>(std::floor(p.x() / voxel_size)),
          static_cast<long>(std::floor(p.y() / voxel_size)),
          static_cast<long>(std::floor(p.z() / voxel_size))};
}

}  // namespace

OrientedPointCloud voxel_downsample(const OrientedPointCloud& cloud, double voxel_size) {
  if (voxel_size <= 0.0) throw std::invalid_argument("voxel_downsample: voxel_size <= 0");
  struct Accum {
    Vec3 psum = Vec3::Zero();
    Vec3 nsum = Vec3::Zero();
    long count = 0;
  };
  std::unordered_map<VoxelKey, int, VoxelKeyHash> slots;
  std::vector<Accum> accums;
  slots.reserve(cloud.size());

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const VoxelKey key = voxel_of(cloud.points[i], voxel_size);
    auto [it, fresh] = slots.emplace(key, static_cast<int>(accums.size()));
    if (fresh) accums.emplace_back();
    Accum& a = accums[it->second];
    a.psum += cloud.points[i];
    a.nsum += cloud.normals[i];
    a.count += 1;
  }

  OrientedPointCloud out;
  out.reserve(accums.size());
  for (const Accum& a : accums) {
    const Vec3 mean_normal = a.nsum / static_cast<double>(a.count);
    const double len = mean_normal.norm();
    if (len < 1e-6) continue;  // normals cancelled; voxel is unusable
    out.push_back(a.psum / static_cast<double>(a.count), mean_normal / len);
  }
  return out;
}

NormalEstimate estimate_normals(const std::vector<Vec3>& points, double radius,
                                const Vec3& viewpoint) {
  if (radius <= 0.0) throw std::invalid_argument("estimate_normals: radius <= 0");
  NormalEstimate result;
  result.cloud.reserve(points.size());
  result.degenerate.assign(points.size(), 0);
  if (points.empty()) return result;

  const KdTree tree(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::vector<int> nb = tree.radius_search(points[i], radius);
    Vec3 normal(0, 0, 1);
    if (nb.size() < 3) {
      result.degenerate[i] = 1;
    } else {
      Vec3 mean = Vec3::Zero();
      for (int j : nb) mean += points[j];
      mean /= static_cast<double>(nb.size());
      Mat3 cov = Mat3::Zero();
      for (int j : nb) {
        const Vec3 d = points[j] - mean;
        cov += d * d.transpose();
      }
      Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
      normal = eig.eigenvectors().col(0);  // smallest eigenvalue
      if (normal.dot(viewpoint - points[i]) < 0.0) normal = -normal;
    }
    result.cloud.push_back(points[i], normal);
  }
  return result;
}

OrientedPointCloud sample_mesh(const TriangleMesh& mesh, int target_count,
                               std::uint64_t seed) {
  mesh.validate();
  if (target_count <= 0) throw std::invalid_argument("sample_mesh: target_count <= 0");

  std::vector<double> cumulative(mesh.num_faces());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (total <= 0.0) throw std::invalid_argument("sample_mesh: degenerate all-zero-area mesh");

  Rng rng(seed);
  OrientedPointCloud out;
  out.reserve(static_cast<std::size_t>(target_count));
  for (int s = 0; s < target_count; ++s) {
    const double pick = rng.uniform() * total;
    const std::size_t f = static_cast<std::size_t>(
        std::lower_bound(cumulative.begin(), cumulative.end(), pick) - cumulative.begin());
    const std::size_t face = std::min(f, mesh.num_faces() - 1);
    const auto& tri = mesh.faces[face];
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const Vec3 p = mesh.vertices[tri[0]] +
                   u * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]]) +
                   v * (mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    out.push_back(p, mesh.face_normal(face));
  }
  return out;
}

std::vector<int> iss_keypoints(const OrientedPointCloud& cloud, double salient_radius,
                               double nms_radius, double gamma21, double gamma32) {
  if (salient_radius <= 0.0 || nms_radius <= 0.0)
    throw std::invalid_argument("iss_keypoints: radii must be positive");
  if (gamma21 <= 0.0 || gamma21 >= 1.0 || gamma32 <= 0.0 || gamma32 >= 1.0)
    throw std::invalid_argument("iss_keypoints: gammas must lie in (0, 1)");

  const int n = static_cast<int>(cloud.size());
  std::vector<int> keypoints;
  if (n == 0) return keypoints;

  const KdTree tree(cloud.points);

  // Per-point neighbor lists within the salient radius (self excluded) and
  // the 1/|N| scatter weights.
  std::vector<std::vector<int>> neighbors(n);
  std::vector<double> weight(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> nb = tree.radius_search(cloud.points[i], salient_radius);
    nb.erase(std::remove(nb.begin(), nb.end(), i), nb.end());
    weight[i] = 1.0 / static_cast<double>(std::max<std::size_t>(nb.size(), 1));
    neighbors[i] = std::move(nb);
  }

  constexpr int kMinNeighbors = 5;
  // Smallest scatter eigenvalue for points passing the ratio tests; -1 marks
  // a failed candidate.
  std::vector<double> saliency(n, -1.0);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(neighbors[i].size()) < kMinNeighbors) continue;
    Mat3 scatter = Mat3::Zero();
    double wsum = 0.0;
    for (int j : neighbors[i]) {
      const Vec3 d = cloud.points[j] - cloud.points[i];
      scatter += weight[j] * d * d.transpose();
      wsum += weight[j];
    }
    scatter /= wsum;
    Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
    const double l3 = eig.eigenvalues()(0);
    const double l2 = eig.eigenvalues()(1);
    const double l1 = eig.eigenvalues()(2);
    if (l1 <= 0.0 || l2 <= 0.0) continue;
    if (l2 / l1 >= gamma21 || l3 / l2 >= gamma32) continue;
    if (l3 <= 1e-9 * l1) continue;  // planar/degenerate neighborhoods never peak
    saliency[i] = l3;
  }

  for (int i = 0; i < n; ++i) {
    if (saliency[i] < 0.0) continue;
    bool is_max = true;
    for (int j : tree.radius_search(cloud.points[i], nms_radius)) {
      if (j == i || saliency[j] < 0.0) continue;
      if (saliency[j] > saliency[i] || (saliency[j] == saliency[i] && j < i)) {
        is_max = false;
        break;
      }
    }
    if (is_max) keypoints.push_back(i);
  }
  return keypoints;
}

std::vector<int> uniform_keypoints(const OrientedPointCloud& cloud, double spacing) {
  if (spacing <= 0.0) throw std::invalid_argument("uniform_keypoints: spacing <= 0");
  std::unordered_map<VoxelKey, int, VoxelKeyHash> seen;
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(cloud.size()); ++i) {
    const VoxelKey key = voxel_of(cloud.points[i], spacing);
    if (seen.emplace(key, i).second) out.push_back(i);
  }
  return out;
}

namespace {

/// Darboux-frame pair features between two oriented points; the point whose
/// normal is closer in angle to the connecting line acts as the source.
/// Returns false for coincident points or a connecting line parallel to the
/// source normal.
bool pair_feature(const Vec3& p1, const Vec3& n1, const Vec3& p2, const Vec3& n2,
                  double& alpha, double& phi, double& theta) {
  Vec3 d = p2 - p1;
  const double dist = d.norm();
  if (dist < 1e-12) return false;
  d /= dist;

  const double cos1 = n1.dot(d);
  const double cos2 = n2.dot(d);
  Vec3 u, nt;
  if (std::abs(cos2) > std::abs(cos1)) {  // second point becomes the source
    u = n2;
    nt = n1;
    d = -d;
    phi = -cos2;
  } else {
    u = n1;
    nt = n2;
    phi = cos1;
  }

  Vec3 v = d.cross(u);
  const double vn = v.norm();
  if (vn < 1e-12) return false;
  v /= vn;
  const Vec3 w = u.cross(v);
  alpha = v.dot(nt);
  theta = std::atan2(w.dot(nt), u.dot(nt));
  return true;
}

std::array<int, 3> bin_of(double alpha, double phi, double theta) {
  auto clamp11 = [](int b) { return std::clamp(b, 0, 10); };
  const int ba = clamp11(static_cast<int>(std::floor(11.0 * (alpha + 1.0) * 0.5)));
  const int bp = clamp11(static_cast<int>(std::floor(11.0 * (phi + 1.0) * 0.5)));
  const int bt =
      clamp11(static_cast<int>(std::floor(11.0 * (theta + M_PI) / (2.0 * M_PI))));
  return {ba, 11 + bp, 22 + bt};
}

using Histogram = std::array<double, 33>;

/// Point histogram over all pairs with its neighbors; each 11-bin block is
/// normalized to sum 1 when any valid pair exists.
Histogram spfh_at(const OrientedPointCloud& cloud, int index,
                  const std::vector<int>& nb) {
  Histogram hist{};
  long valid = 0;
  for (int j : nb) {
    double alpha, phi, theta;
    if (!pair_feature(cloud.points[index], cloud.normals[index], cloud.points[j],
                      cloud.normals[j], alpha, phi, theta)) {
      continue;
    }
    for (int b : bin_of(alpha, phi, theta)) hist[b] += 1.0;
    ++valid;
  }
  if (valid > 0) {
    const double inv = 1.0 / static_cast<double>(valid);
    for (double& h : hist) h *= inv;
  }
  return hist;
}

}  // namespace

std::vector<Descriptor> fpfh(const OrientedPointCloud& cloud,
                             const std::vector<int>& keypoints, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("fpfh: radius <= 0");
  cloud.validate();
  for (int k : keypoints) {
    if (k < 0 || k >= static_cast<int>(cloud.size()))
      throw std::invalid_argument("fpfh: keypoint index out of range");
  }

  std::vector<Descriptor> out(keypoints.size());
  if (cloud.empty() || keypoints.empty()) return out;

  const KdTree tree(cloud.points);

  // Neighbor lists for keypoints, then SPFH for keypoints and every point a
  // keypoint references (the two-pass structure of the descriptor).
  std::vector<std::vector<int>> kp_neighbors(keypoints.size());
  std::unordered_map<int, Histogram> spfh;
  for (std::size_t k = 0; k < keypoints.size(); ++k) {
    std::vector<int> nb = tree.radius_search(cloud.points[keypoints[k]], radius);
    nb.erase(std::remove(nb.begin(), nb.end(), keypoints[k]), nb.end());
    for (int j : nb) spfh.emplace(j, Histogram{});
    spfh.emplace(keypoints[k], Histogram{});
    kp_neighbors[k] = std::move(nb);
  }
  for (auto& [index, hist] : spfh) {
    std::vector<int> nb = tree.radius_search(cloud.points[index], radius);
    nb.erase(std::remove(nb.begin(), nb.end(), index), nb.end());
    hist = spfh_at(cloud, index, nb);
  }

  for (std::size_t k = 0; k < keypoints.size(); ++k) {
    const int kp = keypoints[k];
    const std::vector<int>& nb = kp_neighbors[k];
    if (nb.empty()) {
      out[k].degenerate = true;
      continue;
    }
    Histogram acc = spfh.at(kp);
    double contributors = 0.0;
    Histogram weighted{};
    for (int j : nb) {
      const double dist = (cloud.points[j] - cloud.points[kp]).norm();
      if (dist < 1e-12) continue;
      const Histogram& h = spfh.at(j);
      const double w = 1.0 / dist;
      for (int b = 0; b < 33; ++b) weighted[b] += w * h[b];
      contributors += 1.0;
    }
    if (contributors > 0.0) {
      for (int b = 0; b < 33; ++b) acc[b] += weighted[b] / contributors;
    }
    // Renormalize each block so descriptors are comparable across densities.
    for (int block = 0; block < 3; ++block) {
      double sum = 0.0;
      for (int b = 11 * block; b < 11 * (block + 1); ++b) sum += acc[b];
      if (sum > 0.0) {
        for (int b = 11 * block; b < 11 * (block + 1); ++b) acc[b] /= sum;
      }
    }
    out[k].bins = acc;
  }
  return out;
}

std::vector<Correspondence> match_features(const std::vector<Descriptor>& src_desc,
                                           const std::vector<Descriptor>& tgt_desc,
                                           int max_matches) {
  if (src_desc.empty() || tgt_desc.empty())
    throw std::invalid_argument("match_features: empty descriptor set");
  if (max_matches <= 0) throw std::invalid_argument("match_features: max_matches <= 0");

  std::vector<Correspondence> candidates;
  candidates.reserve(src_desc.size());
  for (int i = 0; i < static_cast<int>(src_desc.size()); ++i) {
    int best = 0;
    double best_d = src_desc[i].l1_distance(tgt_desc[0]);
    for (int j = 1; j < static_cast<int>(tgt_desc.size()); ++j) {
      const double d = src_desc[i].l1_distance(tgt_desc[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    candidates.push_back({i, best, best_d});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Correspondence& a, const Correspondence& b) {
              if (a.feature_distance != b.feature_distance)
                return a.feature_distance < b.feature_distance;
              if (a.src_index != b.src_index) return a.src_index < b.src_index;
              return a.tgt_index < b.tgt_index;
            });
  if (static_cast<int>(candidates.size()) > max_matches) {
    candidates.resize(static_cast<std::size_t>(max_matches));
  }
  return candidates;
}

}  // namespace tacloc
