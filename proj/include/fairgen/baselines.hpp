#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"

namespace fairgen {

namespace detail {

/// Index k of the upper-triangle enumeration (0,1), (0,2), ..., (n-2,n-1).
inline Edge pair_from_index(std::uint64_t k, std::uint64_t n) {
  auto offset = [n](std::uint64_t u) { return u * (2 * n - u - 1) / 2; };
  std::uint64_t lo = 0, hi = n - 1;  // largest u with offset(u) <= k
  while (lo + 1 < hi) {
    const std::uint64_t mid = (lo + hi) / 2;
    if (offset(mid) <= k) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const std::uint64_t u = lo;
  return {static_cast<NodeId>(u), static_cast<NodeId>(k - offset(u) + u + 1)};
}

}  // namespace detail

/// G(n, m): m distinct pairs drawn uniformly (Floyd's subset sampling).
inline Graph er_generate(std::size_t n, std::size_t m, std::uint64_t seed) {
  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (m > total) throw Error("an ER graph on " + std::to_string(n) + " nodes holds at most " + std::to_string(total) + " edges");
  Rng rng = make_rng(seed, "er");
  std::unordered_set<std::uint64_t> picked;
  picked.reserve(m * 2);
  std::vector<std::uint64_t> order;
  order.reserve(m);
  for (std::uint64_t j = total - m; j < total; ++j) {
    const std::uint64_t t = static_cast<std::uint64_t>(uniform_index(rng, static_cast<std::size_t>(j + 1)));
    const std::uint64_t k = picked.insert(t).second ? t : j;
    if (k == j) picked.insert(j);
    order.push_back(k);
  }
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t k : order) edges.push_back(detail::pair_from_index(k, n));
  return Graph::from_edges(n, std::move(edges));
}

/// Preferential attachment from a (k+1)-clique; each new node links to k
/// distinct existing nodes chosen proportionally to degree.
inline Graph ba_generate(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw Error("BA attachment count must be at least 1");
  if (n <= k) throw Error("BA graph needs more than k nodes");
  Rng rng = make_rng(seed, "ba");
  std::vector<Edge> edges;
  std::vector<NodeId> ends;  // each node appears once per incident edge
  for (NodeId u = 0; u <= k; ++u)
    for (NodeId v = u + 1; v <= k; ++v) {
      edges.emplace_back(u, v);
      ends.push_back(u);
      ends.push_back(v);
    }
  for (std::size_t u = k + 1; u < n; ++u) {
    std::vector<NodeId> targets;
    while (targets.size() < k) {
      const NodeId t = ends[uniform_index(rng, ends.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(t, static_cast<NodeId>(u));
      ends.push_back(t);
      ends.push_back(static_cast<NodeId>(u));
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

struct PlantedGraph {
  Graph graph;
  std::vector<int> block;  // block index per node
};

/// Stochastic block model with blocks laid out contiguously.
inline PlantedGraph sbm_generate(const std::vector<std::size_t>& sizes, double p_in, double p_out,
                                 std::uint64_t seed) {
  if (!(p_in >= 0.0 && p_in <= 1.0 && p_out >= 0.0 && p_out <= 1.0)) throw Error("SBM probabilities must lie in [0, 1]");
  PlantedGraph out;
  for (std::size_t b = 0; b < sizes.size(); ++b) out.block.insert(out.block.end(), sizes[b], static_cast<int>(b));
  const std::size_t n = out.block.size();
  Rng rng = make_rng(seed, "sbm");
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (uniform01(rng) < (out.block[u] == out.block[v] ? p_in : p_out)) edges.emplace_back(u, v);
  out.graph = Graph::from_edges(n, std::move(edges));
  return out;
}

}  // namespace fairgen
