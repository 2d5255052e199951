#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"

namespace fairgen {

enum class WalkOrigin { uniform_start, label_start, generated };

struct Walk {
  std::vector<NodeId> nodes;
  WalkOrigin origin = WalkOrigin::uniform_start;
  int start_class = -1;  // set for label_start walks

  friend bool operator==(const Walk&, const Walk&) = default;
};

enum class WalkRole { positive, negative };

struct WalkBatch {
  std::vector<Walk> walks;
  WalkRole role = WalkRole::positive;

  std::size_t size() const noexcept { return walks.size(); }
  bool empty() const noexcept { return walks.empty(); }
  /// Common walk length; 0 for an empty batch.
  std::size_t length() const {
    if (walks.empty()) return 0;
    const std::size_t t = walks.front().nodes.size();
    for (const auto& w : walks)
      if (w.nodes.size() != t) throw Error("walk batch mixes walk lengths");
    return t;
  }
  void append(const WalkBatch& other) {
    walks.insert(walks.end(), other.walks.begin(), other.walks.end());
  }

  friend bool operator==(const WalkBatch&, const WalkBatch&) = default;
};

struct SamplerConfig {
  std::size_t walk_length = 10;  // T
  double mix_ratio = 0.5;        // r: probability of a uniform-start walk
  double return_param = 1.0;     // p
  double inout_param = 1.0;      // q
  std::size_t walks = 1000;      // K
  bool class_balanced = false;   // pick class first, then a node of that class
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const {
    if (walk_length < 2) throw Error("walk length must be at least 2");
    if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) throw Error("mix ratio must lie in [0, 1]");
    if (!(return_param > 0.0) || !(inout_param > 0.0)) throw Error("p and q must be positive");
  }
};

/// Second-order walk: the first hop is uniform, later hops from v (having
/// come from t) weight a neighbour x by 1/p if x == t, 1 if x ~ t, else 1/q.
inline Walk biased_walk(const Graph& g, NodeId start, const SamplerConfig& cfg, Rng& rng) {
  cfg.validate();
  if (start >= g.num_nodes()) throw Error("walk start outside the graph");
  if (g.degree(start) == 0) throw Error("cannot walk from isolated node '" + g.external_id(start) + "'");
  Walk walk;
  walk.nodes.reserve(cfg.walk_length);
  walk.nodes.push_back(start);
  const bool first_order = cfg.return_param == 1.0 && cfg.inout_param == 1.0;
  std::vector<double> weights;
  while (walk.nodes.size() < cfg.walk_length) {
    const NodeId cur = walk.nodes.back();
    auto nb = g.neighbors(cur);
    if (walk.nodes.size() == 1 || first_order) {
      walk.nodes.push_back(nb[uniform_index(rng, nb.size())]);
      continue;
    }
    const NodeId prev = walk.nodes[walk.nodes.size() - 2];
    weights.resize(nb.size());
    double total = 0.0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      const NodeId x = nb[i];
      double w = 1.0 / cfg.inout_param;
      if (x == prev) {
        w = 1.0 / cfg.return_param;
      } else if (g.has_edge(prev, x)) {
        w = 1.0;
      }
      weights[i] = w;
      total += w;
    }
    double u = uniform01(rng) * total;
    std::size_t pick = nb.size() - 1;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
    walk.nodes.push_back(nb[pick]);
  }
  return walk;
}

/// Next-hop probabilities of the second-order walk at `cur` having come
/// from `prev`, aligned with g.neighbors(cur).
inline std::vector<double> transition_weights(const Graph& g, NodeId prev, NodeId cur,
                                              const SamplerConfig& cfg) {
  auto nb = g.neighbors(cur);
  std::vector<double> w(nb.size());
  double total = 0.0;
  for (std::size_t i = 0; i < nb.size(); ++i) {
    if (nb[i] == prev) {
      w[i] = 1.0 / cfg.return_param;
    } else if (g.has_edge(prev, nb[i])) {
      w[i] = 1.0;
    } else {
      w[i] = 1.0 / cfg.inout_param;
    }
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

/// Nodes a walk may start from (degree >= 1).
inline std::vector<NodeId> walkable_nodes(const Graph& g) {
  std::vector<NodeId> out;
  out.reserve(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.degree(u) > 0) out.push_back(u);
  return out;
}

/// Label-informed context sampler. Walk i draws from its own stream
/// (cfg.seed, "walk", i): with probability r it starts at a uniformly random
/// node, otherwise at a labeled node. The coin is only drawn for 0 < r < 1.
inline WalkBatch sample_context(const Graph& g, const LabelSet& labels, const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.mix_ratio < 1.0 && labels.empty()) throw Error("label-informed sampling needs at least one label");
  const auto starts = walkable_nodes(g);
  if (starts.empty()) throw Error("graph has no edges to walk on");
  const auto labeled = labels.nodes();
  for (NodeId u : labeled)
    if (cfg.mix_ratio < 1.0 && g.degree(u) == 0)
      throw Error("labeled node '" + g.external_id(u) + "' is isolated");
  std::vector<std::vector<NodeId>> by_class;
  if (cfg.class_balanced) {
    for (int c = 0; c < labels.num_classes(); ++c) {
      auto members = labels.nodes_of_class(c);
      if (!members.empty()) by_class.push_back(std::move(members));
    }
  }

  WalkBatch batch;
  batch.role = WalkRole::positive;
  batch.walks.resize(cfg.walks);
  parallel_for(cfg.walks, cfg.threads, [&](std::size_t i) {
    Rng rng = make_rng(cfg.seed, "walk", i);
    bool uniform = cfg.mix_ratio >= 1.0;
    if (cfg.mix_ratio > 0.0 && cfg.mix_ratio < 1.0) uniform = uniform01(rng) < cfg.mix_ratio;
    NodeId start;
    if (uniform) {
      start = starts[uniform_index(rng, starts.size())];
    } else if (cfg.class_balanced) {
      const auto& members = by_class[uniform_index(rng, by_class.size())];
      start = members[uniform_index(rng, members.size())];
    } else {
      start = labeled[uniform_index(rng, labeled.size())];
    }
    Walk w = biased_walk(g, start, cfg, rng);
    if (uniform) {
      w.origin = WalkOrigin::uniform_start;
    } else {
      w.origin = WalkOrigin::label_start;
      w.start_class = *labels.get(start);
    }
    batch.walks[i] = std::move(w);
  });
  return batch;
}

/// Node frequencies over a batch raised to `power` (unnormalised).
inline std::vector<double> unigram_weights(const WalkBatch& batch, std::size_t n, double power = 0.75) {
  std::vector<double> counts(n, 0.0);
  for (const auto& w : batch.walks)
    for (NodeId u : w.nodes) {
      if (u >= n) throw Error("walk node outside the graph");
      counts[u] += 1.0;
    }
  for (double& c : counts) c = c > 0.0 ? std::pow(c, power) : 0.0;
  return counts;
}

/// Sequences of i.i.d. draws from the unigram^(3/4) distribution of `source`.
inline WalkBatch unigram_negatives(const WalkBatch& source, std::size_t n, std::size_t count,
                                   std::size_t length, std::uint64_t seed) {
  auto weights = unigram_weights(source, n);
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; }))
    throw Error("cannot draw negatives from an empty walk pool");
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  WalkBatch out;
  out.role = WalkRole::negative;
  out.walks.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = make_rng(seed, "unigram-negative", i);
    Walk w;
    w.origin = WalkOrigin::generated;
    w.nodes.resize(length);
    for (auto& u : w.nodes) u = static_cast<NodeId>(dist(rng));
    out.walks[i] = std::move(w);
  }
  return out;
}

/// Real walks with their node order shuffled (ablation alternative).
inline WalkBatch shuffled_negatives(const WalkBatch& source, std::uint64_t seed) {
  WalkBatch out = source;
  out.role = WalkRole::negative;
  for (std::size_t i = 0; i < out.walks.size(); ++i) {
    Rng rng = make_rng(seed, "shuffled-negative", i);
    std::shuffle(out.walks[i].nodes.begin(), out.walks[i].nodes.end(), rng);
    out.walks[i].origin = WalkOrigin::generated;
    out.walks[i].start_class = -1;
  }
  return out;
}

inline std::string origin_token(const Walk& w) {
  switch (w.origin) {
    case WalkOrigin::uniform_start:
      return "uniform";
    case WalkOrigin::label_start:
      return "label:" + std::to_string(w.start_class);
    case WalkOrigin::generated:
      return "generated";
  }
  return "generated";
}

/// Line-per-walk text: "origin<TAB>n0 n1 ... n(T-1)" with dense node ids.
inline void write_walks(std::ostream& out, const WalkBatch& batch) {
  for (const auto& w : batch.walks) {
    out << origin_token(w) << '\t';
    for (std::size_t i = 0; i < w.nodes.size(); ++i) {
      if (i) out << ' ';
      out << w.nodes[i];
    }
    out << '\n';
  }
}

inline WalkBatch read_walks(std::istream& in, WalkRole role = WalkRole::positive) {
  WalkBatch batch;
  batch.role = role;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("walk line lacks an origin field", lineno);
    Walk w;
    const std::string origin = line.substr(0, tab);
    if (origin == "uniform") {
      w.origin = WalkOrigin::uniform_start;
    } else if (origin == "generated") {
      w.origin = WalkOrigin::generated;
    } else if (origin.rfind("label:", 0) == 0) {
      w.origin = WalkOrigin::label_start;
      w.start_class = std::stoi(origin.substr(6));
    } else {
      throw ParseError("unknown walk origin '" + origin + "'", lineno);
    }
    std::istringstream nodes(line.substr(tab + 1));
    long long id;
    while (nodes >> id) {
      if (id < 0) throw ParseError("negative node id in walk", lineno);
      w.nodes.push_back(static_cast<NodeId>(id));
    }
    if (!nodes.eof()) throw ParseError("malformed node id in walk", lineno);
    batch.walks.push_back(std::move(w));
  }
  batch.length();
  return batch;
}

}  // namespace fairgen
