#include "tacloc/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tacloc {

KdTree::KdTree(const std::vector<Vec3>& points) : points_(points) {
  if (points_.empty()) throw std::invalid_argument("KdTree: empty point set");
  for (const Vec3& p : points_) {
    if (!p.allFinite()) throw std::invalid_argument("KdTree: non-finite point");
  }
  std::vector<int> indices(points_.size());
  std::iota(indices.begin(), indices.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(indices, 0, static_cast<int>(indices.size()));
}

int KdTree::build(std::vector<int>& indices, int begin, int end) {
  if (begin >= end) return -1;

  Vec3 lo = points_[indices[begin]];
  Vec3 hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[indices[i]]);
    hi = hi.cwiseMax(points_[indices[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const int mid = begin + (end - begin) / 2;
  std::nth_element(indices.begin() + begin, indices.begin() + mid, indices.begin() + end,
                   [&](int a, int b) {
                     const double pa = points_[a](axis), pb = points_[b](axis);
                     return pa < pb || (pa == pb && a < b);
                   });

  Node node;
  node.point = indices[mid];
  node.axis = axis;
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  nodes_[self].left = build(indices, begin, mid);
  nodes_[self].right = build(indices, mid + 1, end);
  return self;
}

void KdTree::nearest_impl(int node, const Vec3& q, Hit& best, double& best_sq) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Vec3& p = points_[n.point];
  const double d_sq = (p - q).squaredNorm();
  if (d_sq < best_sq || (d_sq == best_sq && n.point < best.index)) {
    best_sq = d_sq;
    best.index = n.point;
  }
  const double delta = q(n.axis) - p(n.axis);
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  nearest_impl(near, q, best, best_sq);
  if (delta * delta <= best_sq) nearest_impl(far, q, best, best_sq);
}

KdTree::Hit KdTree::nearest(const Vec3& query) const {
  Hit best;
  double best_sq = std::numeric_limits<double>::infinity();
  nearest_impl(root_, query, best, best_sq);
  best.distance = std::sqrt(best_sq);
  return best;
}

void KdTree::radius_impl(int node, const Vec3& q, double radius_sq,
                         std::vector<int>& out) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Vec3& p = points_[n.point];
  if ((p - q).squaredNorm() <= radius_sq) out.push_back(n.point);
  const double delta = q(n.axis) - p(n.axis);
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  radius_impl(near, q, radius_sq, out);
  if (delta * delta <= radius_sq) radius_impl(far, q, radius_sq, out);
}

std::vector<int> KdTree::radius_search(const Vec3& query, double radius) const {
  std::vector<int> out;
  radius_impl(root_, query, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::knn_impl(int node, const Vec3& q, int k, std::vector<Hit>& heap) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const Vec3& p = points_[n.point];
  const double d_sq = (p - q).squaredNorm();

  auto worse = [](const Hit& a, const Hit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  Hit hit{n.point, d_sq};
  if (static_cast<int>(heap.size()) < k) {
    heap.push_back(hit);
    std::push_heap(heap.begin(), heap.end(), worse);
  } else if (worse(hit, heap.front())) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    heap.back() = hit;
    std::push_heap(heap.begin(), heap.end(), worse);
  }

  const double delta = q(n.axis) - p(n.axis);
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  knn_impl(near, q, k, heap);
  if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().distance) {
    knn_impl(far, q, k, heap);
  }
}

std::vector<KdTree::Hit> KdTree::knn(const Vec3& query, int k) const {
  std::vector<Hit> heap;
  if (k <= 0) return heap;
  heap.reserve(static_cast<std::size_t>(k) + 1);
  knn_impl(root_, query, k, heap);
  for (Hit& h : heap) h.distance = std::sqrt(h.distance);
  std::sort(heap.begin(), heap.end(), [](const Hit& a, const Hit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  return heap;
}

KdTree::Hit nearest_neighbor_linear(const std::vector<Vec3>& points, const Vec3& query) {
  if (points.empty()) throw std::invalid_argument("nearest_neighbor_linear: empty point set");
  KdTree::Hit best;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d_sq = (points[i] - query).squaredNorm();
    if (d_sq < best_sq) {
      best_sq = d_sq;
      best.index = static_cast<int>(i);
    }
  }
  best.distance = std::sqrt(best_sq);
  return best;
}

}  // namespace tacloc
