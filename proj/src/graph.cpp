#include "tacloc/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace tacloc {

CompatibilityGraph::CompatibilityGraph(std::vector<Correspondence> nodes)
    : nodes_(std::move(nodes)) {
  words_ = (nodes_.size() + 63) / 64;
  rows_.assign(nodes_.size(), std::vector<std::uint64_t>(words_, 0));
}

void CompatibilityGraph::add_edge(int i, int j) {
  if (i == j) throw std::invalid_argument("CompatibilityGraph: self loop");
  if (adjacent(i, j)) return;
  rows_[i][static_cast<std::size_t>(j) >> 6] |= std::uint64_t(1) << (j & 63);
  rows_[j][static_cast<std::size_t>(i) >> 6] |= std::uint64_t(1) << (i & 63);
  ++edge_count_;
}

int CompatibilityGraph::degree(int i) const {
  int d = 0;
  for (std::uint64_t w : rows_[i]) d += std::popcount(w);
  return d;
}

bool pairwise_consistent(const Correspondence& a, const Correspondence& b,
                         const OrientedPointCloud& src, const OrientedPointCloud& tgt,
                         double delta_d, double delta_alpha) {
  // Injectivity: one-to-one mapping between source and target points.
  if (a.src_index == b.src_index || a.tgt_index == b.tgt_index) return false;

  const double src_dist = (src.points[a.src_index] - src.points[b.src_index]).norm();
  const double tgt_dist = (tgt.points[a.tgt_index] - tgt.points[b.tgt_index]).norm();
  if (std::abs(src_dist - tgt_dist) >= delta_d) return false;

  const double src_angle = angle_between(src.normals[a.src_index], src.normals[b.src_index]);
  const double tgt_angle = angle_between(tgt.normals[a.tgt_index], tgt.normals[b.tgt_index]);
  return std::abs(src_angle - tgt_angle) < delta_alpha;
}

CompatibilityGraph build_graph(const std::vector<Correspondence>& correspondences,
                               const OrientedPointCloud& src,
                               const OrientedPointCloud& tgt, double delta_d,
                               double delta_alpha) {
  if (correspondences.size() < 2)
    throw std::invalid_argument("build_graph: need at least 2 correspondences");
  for (const Correspondence& c : correspondences) {
    if (c.src_index < 0 || c.src_index >= static_cast<int>(src.size()) ||
        c.tgt_index < 0 || c.tgt_index >= static_cast<int>(tgt.size()))
      throw std::invalid_argument("build_graph: correspondence index out of range");
  }

  CompatibilityGraph g(correspondences);
  const int n = g.num_nodes();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (pairwise_consistent(correspondences[i], correspondences[j], src, tgt,
                              delta_d, delta_alpha)) {
        g.add_edge(i, j);
      }
    }
  }
  return g;
}

namespace {

using Bits = std::vector<std::uint64_t>;

void bit_clear(Bits& b, int i) {
  b[static_cast<std::size_t>(i) >> 6] &= ~(std::uint64_t(1) << (i & 63));
}
void bit_set(Bits& b, int i) {
  b[static_cast<std::size_t>(i) >> 6] |= std::uint64_t(1) << (i & 63);
}
bool bit_empty(const Bits& b) {
  for (std::uint64_t w : b) {
    if (w) return false;
  }
  return true;
}
Bits bit_and(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
  return out;
}
int bit_and_count(const Bits& a, const Bits& b) {
  int c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) c += std::popcount(a[i] & b[i]);
  return c;
}

template <typename Fn>
void bit_foreach(const Bits& b, Fn&& fn) {
  for (std::size_t word = 0; word < b.size(); ++word) {
    std::uint64_t w = b[word];
    while (w) {
      const int bit = std::countr_zero(w);
      fn(static_cast<int>(word * 64) + bit);
      w &= w - 1;
    }
  }
}

struct BkState {
  const CompatibilityGraph* g;
  std::vector<Clique>* cliques;
  long budget;
  long expansions = 0;
  bool aborted = false;
};

void bk_recurse(BkState& st, std::vector<int>& r, Bits p, Bits x) {
  if (st.aborted) return;
  if (++st.expansions > st.budget) {
    st.aborted = true;
    return;
  }
  if (bit_empty(p) && bit_empty(x)) {
    Clique c;
    c.members = r;
    std::sort(c.members.begin(), c.members.end());
    st.cliques->push_back(std::move(c));
    return;
  }

  // Pivot on the vertex (from P union X) covering the most of P; only
  // non-neighbors of the pivot need expansion.
  int pivot = -1, best_cover = -1;
  auto consider = [&](int u) {
    const int cover = bit_and_count(p, st.g->row(u));
    if (cover > best_cover) {
      best_cover = cover;
      pivot = u;
    }
  };
  bit_foreach(p, consider);
  bit_foreach(x, consider);

  Bits candidates = p;
  if (pivot >= 0) {
    const Bits& pivot_row = st.g->row(pivot);
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] &= ~pivot_row[i];
  }

  std::vector<int> order;
  bit_foreach(candidates, [&](int v) { order.push_back(v); });
  for (int v : order) {
    if (st.aborted) return;
    const Bits& nv = st.g->row(v);
    r.push_back(v);
    bk_recurse(st, r, bit_and(p, nv), bit_and(x, nv));
    r.pop_back();
    bit_clear(p, v);
    bit_set(x, v);
  }
}

std::vector<int> degeneracy_order(const CompatibilityGraph& g) {
  const int n = g.num_nodes();
  std::vector<int> degree(n), order;
  std::vector<char> removed(n, 0);
  for (int i = 0; i < n; ++i) degree[i] = g.degree(i);
  order.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (!removed[i] && (best < 0 || degree[i] < degree[best])) best = i;
    }
    removed[best] = 1;
    order.push_back(best);
    bit_foreach(g.row(best), [&](int j) {
      if (!removed[j]) --degree[j];
    });
  }
  return order;
}

}  // namespace

CliqueEnumeration maximal_cliques(const CompatibilityGraph& g, int max_cliques,
                                  long budget) {
  if (max_cliques <= 0) throw std::invalid_argument("maximal_cliques: max_cliques <= 0");
  if (budget <= 0) throw std::invalid_argument("maximal_cliques: budget <= 0");

  CliqueEnumeration result;
  const int n = g.num_nodes();
  if (n == 0) return result;

  BkState st{&g, &result.cliques, budget};

  // Outer level follows a degeneracy ordering: each vertex is expanded with
  // candidates restricted to later neighbors, which bounds the subproblem
  // size by the graph degeneracy.
  const std::vector<int> order = degeneracy_order(g);
  std::vector<int> position(n);
  for (int i = 0; i < n; ++i) position[order[i]] = i;

  const std::size_t words = g.words_per_row();
  for (int idx = 0; idx < n && !st.aborted; ++idx) {
    const int v = order[idx];
    Bits p(words, 0), x(words, 0);
    bit_foreach(g.row(v), [&](int u) {
      if (position[u] > idx) {
        bit_set(p, u);
      } else {
        bit_set(x, u);
      }
    });
    std::vector<int> r{v};
    bk_recurse(st, r, std::move(p), std::move(x));
  }

  result.expansions = st.expansions;
  result.complete = !st.aborted;

  std::sort(result.cliques.begin(), result.cliques.end(),
            [](const Clique& a, const Clique& b) {
              if (a.members.size() != b.members.size())
                return a.members.size() > b.members.size();
              return a.members < b.members;
            });
  if (static_cast<int>(result.cliques.size()) > max_cliques) {
    result.cliques.resize(static_cast<std::size_t>(max_cliques));
  }
  return result;
}

CliqueSelection select_top_cliques(const std::vector<Clique>& cliques, int k) {
  if (k <= 0) throw std::invalid_argument("select_top_cliques: k <= 0");
  CliqueSelection sel;
  for (const Clique& c : cliques) {
    if (c.size() >= 3) sel.cliques.push_back(c);
  }
  if (sel.cliques.empty()) {
    for (const Clique& c : cliques) {
      if (c.size() == 2) sel.cliques.push_back(c);
    }
    sel.degenerate_pairs = !sel.cliques.empty();
  }
  if (static_cast<int>(sel.cliques.size()) > k) {
    sel.cliques.resize(static_cast<std::size_t>(k));
  }
  return sel;
}

}  // namespace tacloc
