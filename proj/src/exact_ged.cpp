// Exact graph edit distance by depth-first branch and bound.
//
// Nodes of g1 are assigned, one at a time, either to an unused node of g2 or
// to deletion. Edge costs between a node and the already-assigned nodes are
// charged as soon as both endpoints are fixed; g2 nodes left over at a leaf
// are inserted together with every edge touching them. The bound on the
// unassigned part counts label mismatches between the remaining nodes and
// between the remaining (not yet fully fixed) edges of both graphs, which never
// overestimates the true completion cost.

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "kgeval/error.hpp"
#include "kgeval/fidelity.hpp"

namespace kgeval {

namespace {

constexpr int kDeleted = -1;

struct Edge {
  int from;
  int to;
  int label;
};

struct IndexedGraph {
  std::vector<int> node_labels;
  std::vector<Edge> edges;
  // edge labels per ordered node pair, sorted
  std::vector<std::vector<std::vector<int>>> pair_labels;
};

class LabelInterner {
 public:
  int intern(const std::string& key) {
    auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(ids_.size()));
    return it->second;
  }
  int size() const { return static_cast<int>(ids_.size()); }

 private:
  std::map<std::string, int> ids_;
};

std::string edge_key(const Dependency& d) {
  std::string key(to_string(d.kind));
  key += '|';
  if (d.left.modifier) key += d.left.modifier->name();
  key += '|';
  if (d.right.modifier) key += d.right.modifier->name();
  return key;
}

IndexedGraph index_graph(const KnowledgeGraph& g, LabelInterner& nodes, LabelInterner& edges) {
  IndexedGraph out;
  std::map<std::string, int> position;
  for (const auto& e : g.entities()) {
    position.emplace(e.key(), static_cast<int>(out.node_labels.size()));
    out.node_labels.push_back(nodes.intern(e.key()));
  }
  const std::size_t n = out.node_labels.size();
  out.pair_labels.assign(n, std::vector<std::vector<int>>(n));
  for (const auto& d : g.dependencies()) {
    Edge e{position.at(d.left.entity.key()), position.at(d.right.entity.key()), edges.intern(edge_key(d))};
    out.edges.push_back(e);
    out.pair_labels[e.from][e.to].push_back(e.label);
  }
  for (auto& row : out.pair_labels) {
    for (auto& cell : row) std::sort(cell.begin(), cell.end());
  }
  return out;
}

// Cheapest way to turn multiset `a` into multiset `b` when every relabel costs
// the same: keep the common part, relabel as many of the rest as possible.
double multiset_cost(std::size_t common, std::size_t size_a, std::size_t size_b, double del,
                     double ins, double sub) {
  const double relabel = std::min(sub, del + ins);
  const std::size_t a = size_a - common;
  const std::size_t b = size_b - common;
  const std::size_t k = std::min(a, b);
  return static_cast<double>(k) * relabel + static_cast<double>(a - k) * del +
         static_cast<double>(b - k) * ins;
}

std::size_t sorted_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else { ++common; ++i; ++j; }
  }
  return common;
}

std::size_t count_intersection(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t common = 0;
  for (std::size_t i = 0; i < a.size(); ++i) common += std::min(a[i], b[i]);
  return common;
}

class GedSearch {
 public:
  GedSearch(const IndexedGraph& g1, const IndexedGraph& g2, int node_label_count,
            int edge_label_count, const EditCosts& costs)
      : g1_(g1), g2_(g2), costs_(costs), n1_(g1.node_labels.size()), n2_(g2.node_labels.size()),
        node_label_count_(node_label_count), edge_label_count_(edge_label_count) {
    order_.resize(n1_);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<int> degree(n1_, 0);
    for (const auto& e : g1_.edges) {
      ++degree[e.from];
      ++degree[e.to];
    }
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return degree[a] > degree[b]; });
    mapping_.assign(n1_, kDeleted);
    assigned_.assign(n1_, false);
    used_.assign(n2_, false);
  }

  double run() {
    best_ = greedy_upper_bound();
    descend(0, 0.0);
    return best_;
  }

 private:
  double pair_cost(int u, int v) const {
    const auto& a = g1_.pair_labels[u][v];
    const int fu = mapping_[u];
    const int fv = mapping_[v];
    if (fu == kDeleted || fv == kDeleted) {
      return static_cast<double>(a.size()) * costs_.edge_delete;
    }
    const auto& b = g2_.pair_labels[fu][fv];
    if (a.empty() && b.empty()) return 0.0;
    return multiset_cost(sorted_intersection(a, b), a.size(), b.size(), costs_.edge_delete,
                         costs_.edge_insert, costs_.edge_substitute);
  }

  double node_cost(int u, int target) const {
    if (target == kDeleted) return costs_.node_delete;
    return g1_.node_labels[u] == g2_.node_labels[target] ? 0.0 : costs_.node_substitute;
  }

  // Cost added by fixing node u (already written into mapping_), counting
  // edges to every node fixed before it and its own self loops.
  double incremental_cost(int u, std::size_t depth) const {
    double c = node_cost(u, mapping_[u]);
    c += pair_cost(u, u);
    for (std::size_t k = 0; k < depth; ++k) {
      const int v = order_[k];
      c += pair_cost(u, v) + pair_cost(v, u);
    }
    return c;
  }

  double completion_cost() const {
    double c = 0.0;
    for (std::size_t x = 0; x < n2_; ++x) {
      if (!used_[x]) c += costs_.node_insert;
    }
    for (const auto& e : g2_.edges) {
      if (!used_[e.from] || !used_[e.to]) c += costs_.edge_insert;
    }
    return c;
  }

  double lower_bound() const {
    std::vector<int> left(node_label_count_, 0), right(node_label_count_, 0);
    std::size_t n_left = 0, n_right = 0;
    for (std::size_t u = 0; u < n1_; ++u) {
      if (!assigned_[u]) { ++left[g1_.node_labels[u]]; ++n_left; }
    }
    for (std::size_t x = 0; x < n2_; ++x) {
      if (!used_[x]) { ++right[g2_.node_labels[x]]; ++n_right; }
    }
    const std::size_t common_nodes = count_intersection(left, right);

    double node_bound = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= std::min(n_left, n_right); ++m) {
      const std::size_t mismatched = m > common_nodes ? m - common_nodes : 0;
      node_bound = std::min(node_bound, static_cast<double>(mismatched) * costs_.node_substitute +
                                            static_cast<double>(n_left - m) * costs_.node_delete +
                                            static_cast<double>(n_right - m) * costs_.node_insert);
    }

    std::vector<int> e_left(edge_label_count_, 0), e_right(edge_label_count_, 0);
    std::size_t m_left = 0, m_right = 0;
    for (const auto& e : g1_.edges) {
      if (!assigned_[e.from] || !assigned_[e.to]) { ++e_left[e.label]; ++m_left; }
    }
    for (const auto& e : g2_.edges) {
      if (!used_[e.from] || !used_[e.to]) { ++e_right[e.label]; ++m_right; }
    }
    const double edge_bound = multiset_cost(count_intersection(e_left, e_right), m_left, m_right,
                                            costs_.edge_delete, costs_.edge_insert,
                                            costs_.edge_substitute);
    return node_bound + edge_bound;
  }

  double greedy_upper_bound() {
    double c = 0.0;
    for (std::size_t k = 0; k < n1_; ++k) {
      const int u = order_[k];
      int target = kDeleted;
      for (std::size_t x = 0; x < n2_; ++x) {
        if (!used_[x] && g2_.node_labels[x] == g1_.node_labels[u]) {
          target = static_cast<int>(x);
          break;
        }
      }
      mapping_[u] = target;
      assigned_[u] = true;
      if (target != kDeleted) used_[target] = true;
      c += incremental_cost(u, k);
    }
    c += completion_cost();
    mapping_.assign(n1_, kDeleted);
    assigned_.assign(n1_, false);
    used_.assign(n2_, false);
    return c;
  }

  void descend(std::size_t depth, double cost) {
    if (depth == n1_) {
      best_ = std::min(best_, cost + completion_cost());
      return;
    }
    if (cost + lower_bound() >= best_) return;

    const int u = order_[depth];
    auto try_target = [&](int target) {
      mapping_[u] = target;
      assigned_[u] = true;
      if (target != kDeleted) used_[target] = true;
      const double next = cost + incremental_cost(u, depth);
      if (next < best_) descend(depth + 1, next);
      if (target != kDeleted) used_[target] = false;
      assigned_[u] = false;
      mapping_[u] = kDeleted;
    };

    // Same-label candidates first so good solutions are found early.
    for (std::size_t x = 0; x < n2_; ++x) {
      if (!used_[x] && g2_.node_labels[x] == g1_.node_labels[u]) try_target(static_cast<int>(x));
    }
    for (std::size_t x = 0; x < n2_; ++x) {
      if (!used_[x] && g2_.node_labels[x] != g1_.node_labels[u]) try_target(static_cast<int>(x));
    }
    try_target(kDeleted);
  }

  const IndexedGraph& g1_;
  const IndexedGraph& g2_;
  const EditCosts& costs_;
  const std::size_t n1_;
  const std::size_t n2_;
  const int node_label_count_;
  const int edge_label_count_;
  std::vector<int> order_;
  std::vector<int> mapping_;
  std::vector<bool> assigned_;
  std::vector<bool> used_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

double exact_ged(const KnowledgeGraph& g1, const KnowledgeGraph& g2, const EditCosts& costs,
                 std::size_t node_cap) {
  const std::size_t total = g1.entities().size() + g2.entities().size();
  if (total > node_cap) {
    throw Error(ErrorCode::SizeCapExceeded, std::to_string(total) + " nodes exceed the cap of " +
                                                std::to_string(node_cap));
  }
  LabelInterner node_labels;
  LabelInterner edge_labels;
  IndexedGraph a = index_graph(g1, node_labels, edge_labels);
  IndexedGraph b = index_graph(g2, node_labels, edge_labels);
  GedSearch search(a, b, node_labels.size(), edge_labels.size(), costs);
  return search.run();
}

}  // namespace kgeval
