#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairgen/error.hpp"

namespace fairgen {

using NodeId = std::uint32_t;

/// Undirected edge stored with first < second.
using Edge = std::pair<NodeId, NodeId>;

inline Edge make_edge(NodeId u, NodeId v) { return u < v ? Edge{u, v} : Edge{v, u}; }

/// Immutable undirected simple graph over dense ids 0..n-1 with CSR
/// adjacency. External ids map the dense ids back to the input tokens.
class Graph {
 public:
  Graph() = default;

  /// Self-loops are dropped and duplicates merged; ids must be < n.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges,
                          std::vector<std::string> external_ids = {}) {
    Graph g;
    g.n_ = n;
    std::vector<Edge> clean;
    clean.reserve(edges.size());
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) {
        throw Error("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                    ") references a node outside [0, " + std::to_string(n) + ")");
      }
      if (u != v) clean.push_back(make_edge(u, v));
    }
    std::sort(clean.begin(), clean.end());
    clean.erase(std::unique(clean.begin(), clean.end()), clean.end());
    g.edges_ = std::move(clean);

    std::vector<std::size_t> deg(n, 0);
    for (auto [u, v] : g.edges_) {
      ++deg[u];
      ++deg[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
    g.targets_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : g.edges_) {
      g.targets_[cursor[u]++] = v;
      g.targets_[cursor[v]++] = u;
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                g.targets_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
    }

    if (external_ids.empty()) {
      external_ids.reserve(n);
      for (std::size_t i = 0; i < n; ++i) external_ids.push_back(std::to_string(i));
    }
    if (external_ids.size() != n) throw Error("external id table size does not match node count");
    g.external_ids_ = std::move(external_ids);
    g.index_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!g.index_.emplace(g.external_ids_[i], static_cast<NodeId>(i)).second) {
        throw Error("duplicate external node id '" + g.external_ids_[i] + "'");
      }
    }
    return g;
  }

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  bool has_edge(NodeId u, NodeId v) const {
    if (degree(u) > degree(v)) std::swap(u, v);
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Sorted, each edge once with first < second.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  const std::string& external_id(NodeId u) const { return external_ids_[u]; }
  const std::vector<std::string>& external_ids() const noexcept { return external_ids_; }

  std::optional<NodeId> find(std::string_view external) const {
    auto it = index_.find(std::string(external));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t degree_sum() const noexcept { return 2 * edges_.size(); }

  std::vector<NodeId> isolated_nodes() const {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < n_; ++u)
      if (degree(u) == 0) out.push_back(u);
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<Edge> edges_;
  std::vector<std::string> external_ids_;
  std::unordered_map<std::string, NodeId> index_;
};

/// Membership mask over the nodes of a graph.
using NodeMask = std::vector<char>;

inline NodeMask make_mask(std::size_t n, std::span<const NodeId> nodes) {
  NodeMask mask(n, 0);
  for (NodeId u : nodes) {
    if (u >= n) throw Error("node " + std::to_string(u) + " is not in the graph");
    mask[u] = 1;
  }
  return mask;
}

inline std::vector<NodeId> mask_nodes(const NodeMask& mask) {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<NodeId>(i));
  return out;
}

/// Partial node labels over classes [0, C).
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::size_t n, int num_classes) : classes_(num_classes), label_(n, -1) {
    if (num_classes < 1) throw Error("label set needs at least one class");
  }

  void set(NodeId u, int cls) {
    if (u >= label_.size()) throw Error("labeled node " + std::to_string(u) + " is not in the graph");
    if (cls < 0 || cls >= classes_) {
      throw Error("class " + std::to_string(cls) + " outside [0, " + std::to_string(classes_) + ")");
    }
    if (label_[u] < 0) ++count_;
    label_[u] = cls;
  }

  std::optional<int> get(NodeId u) const {
    if (u >= label_.size() || label_[u] < 0) return std::nullopt;
    return label_[u];
  }
  bool has(NodeId u) const { return u < label_.size() && label_[u] >= 0; }

  std::size_t size() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  int num_classes() const noexcept { return classes_; }
  std::size_t num_nodes() const noexcept { return label_.size(); }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < label_.size(); ++i)
      if (label_[i] >= 0) out.push_back(static_cast<NodeId>(i));
    return out;
  }

  std::vector<NodeId> nodes_of_class(int cls) const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < label_.size(); ++i)
      if (label_[i] == cls) out.push_back(static_cast<NodeId>(i));
    return out;
  }

  bool covers_all_classes() const {
    std::vector<char> seen(static_cast<std::size_t>(classes_), 0);
    for (int c : label_)
      if (c >= 0) seen[static_cast<std::size_t>(c)] = 1;
    return std::all_of(seen.begin(), seen.end(), [](char s) { return s != 0; });
  }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  int classes_ = 0;
  std::vector<int> label_;
  std::size_t count_ = 0;
};

/// Protected group S+ and its complement S- over all nodes.
class GroupMembership {
 public:
  GroupMembership() = default;
  GroupMembership(std::size_t n, std::span<const NodeId> protected_nodes)
      : mask_(make_mask(n, protected_nodes)) {
    protected_count_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
  }

  bool is_protected(NodeId u) const { return mask_[u] != 0; }
  std::size_t num_nodes() const noexcept { return mask_.size(); }
  std::size_t protected_count() const noexcept { return protected_count_; }
  std::size_t unprotected_count() const noexcept { return mask_.size() - protected_count_; }
  const NodeMask& mask() const noexcept { return mask_; }

  std::vector<NodeId> protected_nodes() const { return mask_nodes(mask_); }
  std::vector<NodeId> unprotected_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < mask_.size(); ++i)
      if (!mask_[i]) out.push_back(static_cast<NodeId>(i));
    return out;
  }

 private:
  NodeMask mask_;
  std::size_t protected_count_ = 0;
};

/// Lazy walk matrix M = (A D^-1 + I) / 2 in compressed-column form.
/// Column j is the next-step distribution of a walker sitting at j.
class TransitionMatrix {
 public:
  /// Isolated nodes are rejected unless allowed, in which case their column
  /// is the unit vector e_j.
  static TransitionMatrix build(const Graph& g, bool allow_isolated = false) {
    TransitionMatrix m;
    const std::size_t n = g.num_nodes();
    m.n_ = n;
    m.col_offsets_.assign(n + 1, 0);
    m.rows_.reserve(n + g.degree_sum());
    m.values_.reserve(n + g.degree_sum());
    for (NodeId j = 0; j < n; ++j) {
      const std::size_t d = g.degree(j);
      if (d == 0) {
        if (!allow_isolated) {
          throw Error("node '" + g.external_id(j) + "' is isolated; transition matrix undefined");
        }
        m.rows_.push_back(j);
        m.values_.push_back(1.0);
      } else {
        const double w = 0.5 / static_cast<double>(d);
        bool placed_self = false;
        for (NodeId i : g.neighbors(j)) {
          if (!placed_self && i > j) {
            m.rows_.push_back(j);
            m.values_.push_back(0.5);
            placed_self = true;
          }
          m.rows_.push_back(i);
          m.values_.push_back(w);
        }
        if (!placed_self) {
          m.rows_.push_back(j);
          m.values_.push_back(0.5);
        }
      }
      m.col_offsets_[j + 1] = m.rows_.size();
    }
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  /// y = M x.
  void multiply(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) y[rows_[k]] += values_[k] * xj;
    }
  }

  double entry(std::size_t i, std::size_t j) const {
    for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k)
      if (rows_[k] == i) return values_[k];
    return 0.0;
  }

  double column_sum(std::size_t j) const {
    double s = 0.0;
    for (std::size_t k = col_offsets_[j]; k < col_offsets_[j + 1]; ++k) s += values_[k];
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> col_offsets_;
  std::vector<NodeId> rows_;
  std::vector<double> values_;
};

inline std::size_t volume(const Graph& g, const NodeMask& s) {
  std::size_t vol = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (s[u]) vol += g.degree(u);
  return vol;
}

inline std::size_t cut_size(const Graph& g, const NodeMask& s) {
  std::size_t cut = 0;
  for (auto [u, v] : g.edges())
    if (s[u] != s[v]) ++cut;
  return cut;
}

/// cut(S, V\S) / min(vol(S), vol(V\S)).
inline double conductance(const Graph& g, const NodeMask& s) {
  const std::size_t members = static_cast<std::size_t>(std::count(s.begin(), s.end(), 1));
  if (members == 0) throw Error("conductance of the empty set is undefined");
  if (members == g.num_nodes()) throw Error("conductance of the full node set is undefined");
  const std::size_t vol_s = volume(g, s);
  const std::size_t vol_rest = g.degree_sum() - vol_s;
  const std::size_t denom = std::min(vol_s, vol_rest);
  if (denom == 0) throw Error("conductance undefined: one side has zero volume");
  return static_cast<double>(cut_size(g, s)) / static_cast<double>(denom);
}

inline double conductance(const Graph& g, std::span<const NodeId> s) {
  return conductance(g, make_mask(g.num_nodes(), s));
}

/// Induced subgraph; node i of the result is nodes[i] (sorted, unique).
inline Graph induced_subgraph(const Graph& g, std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<NodeId> local(g.num_nodes(), static_cast<NodeId>(-1));
  std::vector<std::string> ids;
  ids.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.num_nodes()) throw Error("node " + std::to_string(nodes[i]) + " is not in the graph");
    local[nodes[i]] = static_cast<NodeId>(i);
    ids.push_back(g.external_id(nodes[i]));
  }
  std::vector<Edge> edges;
  for (NodeId u : nodes)
    for (NodeId v : g.neighbors(u))
      if (u < v && local[v] != static_cast<NodeId>(-1)) edges.emplace_back(local[u], local[v]);
  return Graph::from_edges(nodes.size(), std::move(edges), std::move(ids));
}

/// Induced subgraph on the anchors and their 1-hop neighbours.
inline Graph ego_subgraph(const Graph& g, std::span<const NodeId> anchors) {
  if (anchors.empty()) throw Error("ego subgraph needs at least one anchor");
  NodeMask keep = make_mask(g.num_nodes(), anchors);
  for (NodeId a : anchors)
    for (NodeId v : g.neighbors(a)) keep[v] = 1;
  return induced_subgraph(g, mask_nodes(keep));
}

/// Components in order of their smallest node; each list sorted.
inline std::vector<std::vector<NodeId>> connected_components(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<NodeId>> comps;
  std::deque<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<NodeId> comp;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      NodeId u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (NodeId v : g.neighbors(u)) {
        if (!seen[v]) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace fairgen
