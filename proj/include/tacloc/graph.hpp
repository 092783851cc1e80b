// Correspondence compatibility graph and maximal-clique hypothesis
// generation.
#pragma once

#include <cstdint>
#include <vector>

#include "tacloc/features.hpp"
#include "tacloc/geometry.hpp"

namespace tacloc {

/// Graph over correspondences; adjacency rows are bitsets for fast
/// intersection during clique search.
class CompatibilityGraph {
 public:
  explicit CompatibilityGraph(std::vector<Correspondence> nodes);

  void add_edge(int i, int j);
  bool adjacent(int i, int j) const {
    return (rows_[i][static_cast<std::size_t>(j) >> 6] >> (j & 63)) & 1u;
  }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  long edge_count() const { return edge_count_; }
  const std::vector<Correspondence>& nodes() const { return nodes_; }
  const std::vector<std::uint64_t>& row(int i) const { return rows_[i]; }
  std::size_t words_per_row() const { return words_; }
  int degree(int i) const;

 private:
  std::vector<Correspondence> nodes_;
  std::vector<std::vector<std::uint64_t>> rows_;
  std::size_t words_ = 0;
  long edge_count_ = 0;
};

/// True when two correspondences can belong to one rigid motion: the
/// source-pair and target-pair distances agree within delta_d, the
/// source-pair and target-pair normal angles agree within delta_alpha, and
/// the pair shares no source or target point. `src`/`tgt` are the keypoint
/// clouds the correspondence indices refer to.
bool pairwise_consistent(const Correspondence& a, const Correspondence& b,
                         const OrientedPointCloud& src, const OrientedPointCloud& tgt,
                         double delta_d, double delta_alpha);

/// Applies pairwise_consistent to every node pair (preemptive pruning: all
/// three checks gate edge insertion).
CompatibilityGraph build_graph(const std::vector<Correspondence>& correspondences,
                               const OrientedPointCloud& src,
                               const OrientedPointCloud& tgt, double delta_d,
                               double delta_alpha);

struct Clique {
  std::vector<int> members;  // sorted ascending
  int size() const { return static_cast<int>(members.size()); }
};

struct CliqueEnumeration {
  std::vector<Clique> cliques;  // size-descending, ties lexicographic
  bool complete = true;         // false when the expansion budget tripped
  long expansions = 0;
};

/// Bron-Kerbosch with pivoting over a degeneracy ordering. Enumeration stops
/// early after `budget` recursive expansions (worst case is exponential);
/// whatever was found is still sorted and truncated to max_cliques.
CliqueEnumeration maximal_cliques(const CompatibilityGraph& g, int max_cliques,
                                  long budget = 1000000);

struct CliqueSelection {
  std::vector<Clique> cliques;
  bool degenerate_pairs = false;  // fell back to size-2 cliques
};

/// First K cliques from the sorted list, dropping sizes < 3 (a unique rigid
/// transform needs three non-collinear pairs). When nothing of size >= 3
/// exists, size-2 cliques are kept and flagged; size-1 "cliques" are never
/// usable.
CliqueSelection select_top_cliques(const std::vector<Clique>& cliques, int k);

}  // namespace tacloc
