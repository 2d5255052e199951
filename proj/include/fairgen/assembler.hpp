#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"
#include "fairgen/sampler.hpp"

namespace fairgen {

struct ScoredPair {
  NodeId u = 0;  // u < v
  NodeId v = 0;
  std::uint64_t count = 0;

  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

/// Symmetric edge-transition counts; only the upper triangle is stored,
/// sorted by (u, v), zero entries omitted.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t n, std::vector<ScoredPair> entries) : n_(n), entries_(std::move(entries)) {
    for (auto& e : entries_) {
      if (e.u > e.v) std::swap(e.u, e.v);
      if (e.v >= n_) throw Error("score entry outside the node universe");
      if (e.u == e.v) throw Error("score matrix has no diagonal");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const ScoredPair& a, const ScoredPair& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
    std::vector<ScoredPair> merged;
    for (const auto& e : entries_) {
      if (e.count == 0) continue;
      if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
        merged.back().count += e.count;
      } else {
        merged.push_back(e);
      }
    }
    entries_ = std::move(merged);
  }

  std::size_t num_nodes() const noexcept { return n_; }
  const std::vector<ScoredPair>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t support() const noexcept { return entries_.size(); }

  std::uint64_t at(NodeId i, NodeId j) const {
    if (i == j) return 0;
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{i, j},
                               [](const ScoredPair& e, const std::pair<NodeId, NodeId>& k) {
                                 return std::tie(e.u, e.v) < std::tie(k.first, k.second);
                               });
    return (it != entries_.end() && it->u == i && it->v == j) ? it->count : 0;
  }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (const auto& e : entries_) s += e.count;
    return s;
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<ScoredPair> entries_;
};

/// B(i, j) = number of adjacent occurrences of {i, j} across all walks.
inline ScoreMatrix accumulate_scores(const WalkBatch& walks, std::size_t n, unsigned threads = 1) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, walks.size()));
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> partial(workers);
  const std::size_t chunk = (walks.size() + workers - 1) / std::max<std::size_t>(1, workers);
  parallel_for(workers, threads, [&](std::size_t k) {
    auto& counts = partial[k];
    const std::size_t end = std::min(walks.size(), (k + 1) * chunk);
    for (std::size_t i = k * chunk; i < end; ++i) {
      const auto& nodes = walks.walks[i].nodes;
      for (std::size_t t = 0; t < nodes.size(); ++t) {
        if (nodes[t] >= n) throw Error("walk node " + std::to_string(nodes[t]) + " outside the node universe");
        if (t == 0 || nodes[t] == nodes[t - 1]) continue;
        const auto [a, b] = std::minmax(nodes[t - 1], nodes[t]);
        ++counts[(static_cast<std::uint64_t>(a) << 32) | b];
      }
    }
  });
  std::vector<ScoredPair> entries;
  for (const auto& counts : partial)
    for (auto [key, c] : counts)
      entries.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu), c});
  return ScoreMatrix(n, std::move(entries));
}

/// Sorted "i j count" lines with dense ids.
inline void write_scores(std::ostream& out, const ScoreMatrix& b) {
  for (const auto& e : b.entries()) out << e.u << ' ' << e.v << ' ' << e.count << '\n';
}

inline ScoreMatrix read_scores(std::istream& in, std::size_t n) {
  std::vector<ScoredPair> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    long long u, v;
    unsigned long long c;
    std::string extra;
    if (!(fields >> u >> v >> c) || (fields >> extra)) throw ParseError("expected 'i j count'", lineno);
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw ParseError("score entry outside the node universe", lineno);
    if (u == v) throw ParseError("score matrix has no diagonal", lineno);
    entries.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), c});
  }
  return ScoreMatrix(n, std::move(entries));
}

namespace detail {

/// ceil(x) that ignores representation noise such as 0.07 * 100 = 7.000000000000001.
inline std::size_t ceil_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

/// Descending count, then (min id, max id) ascending.
inline bool score_order(const ScoredPair& a, const ScoredPair& b) {
  if (a.count != b.count) return a.count > b.count;
  return std::tie(a.u, a.v) < std::tie(b.u, b.v);
}

inline std::vector<ScoredPair> ranked(const ScoreMatrix& b) {
  std::vector<ScoredPair> r = b.entries();
  std::sort(r.begin(), r.end(), score_order);
  return r;
}

inline std::uint64_t pair_key(NodeId u, NodeId v) {
  const auto [a, b] = std::minmax(u, v);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace detail

struct AssembleOptions {
  double volume_tolerance = 0.1;
};

struct AssembleResult {
  Graph graph;
  std::size_t coverage_edges = 0;   // phase 1
  std::size_t protected_edges = 0;  // phase 2
  std::size_t fill_edges = 0;       // phase 3
  std::size_t capped = 0;           // fill candidates deferred by the upper volume bound
  double original_protected_volume = 0.0;
  double protected_volume = 0.0;
  std::vector<std::string> warnings;
};

/// Thresholds B into a graph with the original edge count. Phase 1 gives
/// every node its best pair, phase 2 raises protected volume to within tol
/// of the original, phase 3 fills by global score without pushing protected
/// volume above (1 + tol) times the original; deferred pairs are used only
/// if the budget cannot be met otherwise.
inline AssembleResult assemble(const ScoreMatrix& b, const Graph& original, const GroupMembership& groups,
                               const AssembleOptions& opts = {}) {
  if (b.empty()) throw Error("score matrix is all zero");
  const std::size_t n = original.num_nodes();
  if (b.num_nodes() != n || groups.num_nodes() != n) throw Error("score matrix, graph and groups disagree on size");
  if (!(opts.volume_tolerance >= 0.0 && opts.volume_tolerance < 1.0)) throw Error("volume tolerance must lie in [0, 1)");
  const std::size_t budget = original.num_edges();
  const auto order = detail::ranked(b);

  AssembleResult res;
  res.original_protected_volume = static_cast<double>(volume(original, groups.mask()));
  const double lower = (1.0 - opts.volume_tolerance) * res.original_protected_volume;
  const double upper = (1.0 + opts.volume_tolerance) * res.original_protected_volume;

  std::vector<Edge> chosen;
  std::unordered_set<std::uint64_t> taken;
  std::vector<std::size_t> degree(n, 0);
  double pvol = 0.0;
  auto gain = [&](const ScoredPair& e) {
    return static_cast<double>(groups.is_protected(e.u)) + static_cast<double>(groups.is_protected(e.v));
  };
  auto admit = [&](const ScoredPair& e) {
    chosen.emplace_back(e.u, e.v);
    taken.insert(detail::pair_key(e.u, e.v));
    ++degree[e.u];
    ++degree[e.v];
    pvol += gain(e);
  };
  auto is_taken = [&](const ScoredPair& e) { return taken.count(detail::pair_key(e.u, e.v)) != 0; };

  // Phase 1: best incident pair per node. `order` is globally ranked, so the
  // first pair seen for a node is its best.
  std::vector<const ScoredPair*> best(n, nullptr);
  for (const auto& e : order) {
    if (!best[e.u]) best[e.u] = &e;
    if (!best[e.v]) best[e.v] = &e;
  }
  for (NodeId u = 0; u < n; ++u) {
    if (degree[u] > 0) continue;
    if (!best[u]) throw Error("node '" + original.external_id(u) + "' has no scored pair to cover it");
    admit(*best[u]);
    ++res.coverage_edges;
  }
  if (chosen.size() > budget) res.warnings.push_back("coverage alone exceeds the edge budget");

  // Phase 2: protected-incident pairs.
  for (const auto& e : order) {
    if (pvol >= lower || chosen.size() >= budget) break;
    if (gain(e) == 0.0 || is_taken(e)) continue;
    admit(e);
    ++res.protected_edges;
  }

  // Phase 3: global fill.
  std::vector<const ScoredPair*> deferred;
  for (const auto& e : order) {
    if (chosen.size() >= budget) break;
    if (is_taken(e)) continue;
    if (gain(e) > 0.0 && pvol + gain(e) > upper) {
      deferred.push_back(&e);
      continue;
    }
    admit(e);
    ++res.fill_edges;
  }
  res.capped = deferred.size();
  for (const ScoredPair* e : deferred) {
    if (chosen.size() >= budget) break;
    admit(*e);
    ++res.fill_edges;
  }
  if (chosen.size() < budget) {
    res.warnings.push_back("score matrix supports only " + std::to_string(chosen.size()) + " of " +
                           std::to_string(budget) + " edges");
  }
  res.protected_volume = pvol;
  res.graph = Graph::from_edges(n, std::move(chosen), original.external_ids());
  return res;
}

struct AugmentResult {
  Graph graph;
  std::size_t added = 0;
  std::vector<std::string> warnings;
};

/// Original graph plus the ceil(fraction * m) best-scoring novel pairs.
inline AugmentResult augment(const ScoreMatrix& b, const Graph& original, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("augment fraction must lie in (0, 1]");
  if (b.num_nodes() != original.num_nodes()) throw Error("score matrix and graph disagree on size");
  const std::size_t wanted = detail::ceil_count(fraction * static_cast<double>(original.num_edges()));
  AugmentResult res;
  std::vector<Edge> edges = original.edges();
  for (const auto& e : detail::ranked(b)) {
    if (res.added >= wanted) break;
    if (original.has_edge(e.u, e.v)) continue;
    edges.emplace_back(e.u, e.v);
    ++res.added;
  }
  if (res.added < wanted) {
    res.warnings.push_back("only " + std::to_string(res.added) + " novel pairs available of " +
                           std::to_string(wanted) + " requested");
  }
  res.graph = Graph::from_edges(original.num_nodes(), std::move(edges), original.external_ids());
  return res;
}

}  // namespace fairgen
