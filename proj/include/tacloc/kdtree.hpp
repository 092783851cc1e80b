// k-d tree over 3D points: nearest neighbor, k-NN, and radius queries.
#pragma once

#include "tacloc/geometry.hpp"

#include <cstdint>
#include <vector>

namespace tacloc {

/// Read-only after construction; safe to query from multiple threads.
/// Ties on distance resolve to the smallest point index, matching the
/// exhaustive scan in nearest_neighbor_linear.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points);

  struct Hit {
    int index = -1;
    double distance = 0.0;
  };

  /// Closest stored point to the query. The cloud is never empty
  /// (construction throws), so this always returns a valid hit.
  Hit nearest(const Vec3& query) const;

  /// Indices of all points within `radius` of the query, ascending index.
  std::vector<int> radius_search(const Vec3& query, double radius) const;

  /// The k closest points, sorted by distance (ties by index).
  std::vector<Hit> knn(const Vec3& query, int k) const;

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  struct Node {
    int left = -1;
    int right = -1;
    int point = -1;   // index into points_
    int axis = 0;
  };

  int build(std::vector<int>& indices, int begin, int end);
  void nearest_impl(int node, const Vec3& q, Hit& best, double& best_sq) const;
  void radius_impl(int node, const Vec3& q, double radius_sq, std::vector<int>& out) const;
  void knn_impl(int node, const Vec3& q, int k, std::vector<Hit>& heap) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Exhaustive-scan reference used as the oracle for KdTree.
KdTree::Hit nearest_neighbor_linear(const std::vector<Vec3>& points, const Vec3& query);

}  // namespace tacloc
