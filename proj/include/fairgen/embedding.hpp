#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"
#include "fairgen/sampler.hpp"

namespace fairgen {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n x d node vectors, one row per node.
struct EmbeddingTable {
  RowMatrix vectors;

  std::size_t num_nodes() const { return static_cast<std::size_t>(vectors.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors.cols()); }
  bool finite() const { return vectors.allFinite(); }
};

struct SkipGramConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 1;
  double learning_rate = 0.025;
  std::uint64_t seed = 0;
};

struct PretrainResult {
  EmbeddingTable table;
  std::vector<NodeId> unvisited;  // rows left at zero
};

/// word2vec-style initialisation: uniform in (-0.5/d, 0.5/d).
inline EmbeddingTable skipgram_init(std::size_t n, std::size_t dim, std::uint64_t seed) {
  EmbeddingTable t;
  t.vectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  Rng rng = make_rng(seed, "skipgram-init");
  std::uniform_real_distribution<double> u(-0.5 / static_cast<double>(dim), 0.5 / static_cast<double>(dim));
  for (Eigen::Index i = 0; i < t.vectors.rows(); ++i)
    for (Eigen::Index j = 0; j < t.vectors.cols(); ++j) t.vectors(i, j) = u(rng);
  return t;
}

/// Skip-gram with negative sampling over the walk corpus. Negatives come
/// from the unigram^(3/4) distribution of the walk nodes; nodes that never
/// occur in a walk get a zero vector and are reported back.
inline PretrainResult pretrain_embeddings(const WalkBatch& walks, std::size_t n, const SkipGramConfig& cfg) {
  if (walks.empty()) throw Error("skip-gram pretraining needs at least one walk");
  if (cfg.dim == 0) throw Error("embedding dimension must be positive");
  PretrainResult out;
  out.table = skipgram_init(n, cfg.dim, cfg.seed);
  auto weights = unigram_weights(walks, n);
  for (NodeId u = 0; u < n; ++u) {
    if (weights[u] == 0.0) {
      out.unvisited.push_back(u);
      out.table.vectors.row(u).setZero();
    }
  }
  if (cfg.epochs == 0) return out;

  RowMatrix& in = out.table.vectors;
  RowMatrix ctx = RowMatrix::Zero(in.rows(), in.cols());
  std::discrete_distribution<std::size_t> noise(weights.begin(), weights.end());
  Vector grad(in.cols());

  std::size_t tokens = 0;
  for (const auto& w : walks.walks) tokens += w.nodes.size();
  const double total_steps = static_cast<double>(tokens * cfg.epochs);
  double done = 0.0;

  std::vector<std::size_t> order(walks.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng = make_rng(cfg.seed, "skipgram-epoch", epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t wi : order) {
      const auto& nodes = walks.walks[wi].nodes;
      for (std::size_t pos = 0; pos < nodes.size(); ++pos) {
        const double lr = std::max(cfg.learning_rate * 1e-4, cfg.learning_rate * (1.0 - done / total_steps));
        done += 1.0;
        const std::size_t shrink = cfg.window > 1 ? uniform_index(rng, cfg.window) : 0;
        const std::size_t reach = cfg.window - shrink;
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(nodes.size() - 1, pos + reach);
        const NodeId center = nodes[pos];
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          const NodeId context = nodes[c];
          grad.setZero();
          for (std::size_t k = 0; k <= cfg.negatives; ++k) {
            NodeId target = context;
            double label = 1.0;
            if (k > 0) {
              target = static_cast<NodeId>(noise(rng));
              if (target == context) continue;
              label = 0.0;
            }
            const double score = in.row(center).dot(ctx.row(target));
            const double sig = 1.0 / (1.0 + std::exp(-std::clamp(score, -30.0, 30.0)));
            const double g = (label - sig) * lr;
            grad += g * ctx.row(target).transpose();
            ctx.row(target) += g * in.row(center);
          }
          in.row(center) += grad.transpose();
        }
      }
    }
  }
  return out;
}

/// "node v1 ... vd" per line, using external ids when a graph is given.
inline void write_embeddings(std::ostream& out, const EmbeddingTable& t, const Graph* g = nullptr) {
  out << std::setprecision(9);
  for (Eigen::Index i = 0; i < t.vectors.rows(); ++i) {
    if (g) {
      out << g->external_id(static_cast<NodeId>(i));
    } else {
      out << i;
    }
    for (Eigen::Index j = 0; j < t.vectors.cols(); ++j) out << ' ' << t.vectors(i, j);
    out << '\n';
  }
}

inline double cosine(const EmbeddingTable& t, NodeId a, NodeId b) {
  const double na = t.vectors.row(a).norm();
  const double nb = t.vectors.row(b).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return t.vectors.row(a).dot(t.vectors.row(b)) / (na * nb);
}

}  // namespace fairgen
