#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "fairgen/embedding.hpp"
#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"
#include "fairgen/sampler.hpp"

namespace fairgen {

struct GeneratorShape {
  std::size_t nodes = 0;
  std::size_t dim = 100;
  std::size_t max_length = 10;  // T; positions 0..T-1 have encodings
  std::size_t heads = 4;
  std::size_t ffn = 128;

  void validate() const {
    if (nodes == 0) throw Error("generator needs at least one node");
    if (dim == 0 || heads == 0 || dim % heads != 0) throw Error("embedding dim must be a positive multiple of heads");
    if (max_length < 2) throw Error("generator walk length must be at least 2");
    if (ffn == 0) throw Error("feed-forward width must be positive");
  }
  friend bool operator==(const GeneratorShape&, const GeneratorShape&) = default;
};

/// Trainable tensors of the sequence model; also used for gradients.
struct GeneratorParams {
  RowMatrix embed;             // n x d, shared by input lookup and output scoring
  RowMatrix wq, wk, wv, wo;    // d x d
  RowMatrix w1;                // f x d
  Vector b1;                   // f
  RowMatrix w2;                // d x f
  Vector b2;                   // d
  RowMatrix out;               // d x d output projection
  Vector out_bias;             // n

  static GeneratorParams zeros(const GeneratorShape& s) {
    const auto n = static_cast<Eigen::Index>(s.nodes), d = static_cast<Eigen::Index>(s.dim),
               f = static_cast<Eigen::Index>(s.ffn);
    GeneratorParams p;
    p.embed = RowMatrix::Zero(n, d);
    p.wq = RowMatrix::Zero(d, d);
    p.wk = RowMatrix::Zero(d, d);
    p.wv = RowMatrix::Zero(d, d);
    p.wo = RowMatrix::Zero(d, d);
    p.w1 = RowMatrix::Zero(f, d);
    p.b1 = Vector::Zero(f);
    p.w2 = RowMatrix::Zero(d, f);
    p.b2 = Vector::Zero(d);
    p.out = RowMatrix::Zero(d, d);
    p.out_bias = Vector::Zero(n);
    return p;
  }

  /// Visits every block in checkpoint order.
  template <class Fn>
  void for_each_block(Fn&& fn) {
    fn("embed", embed.data(), embed.size());
    fn("wq", wq.data(), wq.size());
    fn("wk", wk.data(), wk.size());
    fn("wv", wv.data(), wv.size());
    fn("wo", wo.data(), wo.size());
    fn("w1", w1.data(), w1.size());
    fn("b1", b1.data(), b1.size());
    fn("w2", w2.data(), w2.size());
    fn("b2", b2.data(), b2.size());
    fn("out", out.data(), out.size());
    fn("out_bias", out_bias.data(), out_bias.size());
  }
  template <class Fn>
  void for_each_block(Fn&& fn) const {
    const_cast<GeneratorParams*>(this)->for_each_block(
        [&](const char* name, double* data, Eigen::Index size) { fn(name, static_cast<const double*>(data), size); });
  }

  void set_zero() {
    for_each_block([](const char*, double* data, Eigen::Index size) { std::fill(data, data + size, 0.0); });
  }

  /// this += scale * other
  void add_scaled(const GeneratorParams& other, double scale) {
    std::vector<const double*> src;
    other.for_each_block([&](const char*, const double* data, Eigen::Index) { src.push_back(data); });
    std::size_t k = 0;
    for_each_block([&](const char*, double* data, Eigen::Index size) {
      const double* s = src[k++];
      for (Eigen::Index i = 0; i < size; ++i) data[i] += scale * s[i];
    });
  }

  bool all_finite() const {
    bool ok = true;
    for_each_block([&](const char*, const double* data, Eigen::Index size) {
      for (Eigen::Index i = 0; i < size && ok; ++i) ok = std::isfinite(data[i]);
    });
    return ok;
  }
};

/// Intermediates of one forward pass over a node sequence of length L.
struct ForwardCache {
  std::vector<NodeId> tokens;
  RowMatrix input;       // L x d, embedding + position
  RowMatrix q, k, v;     // L x d
  std::vector<RowMatrix> attn;  // per head, L x L (row-stochastic, causal)
  RowMatrix mixed;       // L x d, concatenated head outputs
  RowMatrix resid1;      // L x d
  RowMatrix hidden_pre;  // L x f
  RowMatrix hidden;      // L x f
  RowMatrix block_out;   // L x d
  RowMatrix projected;   // L x d
  RowMatrix logits;      // L x n; row t scores the node at position t+1
};

/// Autoregressive next-node model: one causal multi-head self-attention
/// block with a ReLU feed-forward layer, both residual, followed by an
/// output projection scored against the (tied) node embedding table.
class GeneratorModel {
 public:
  GeneratorModel() = default;

  GeneratorModel(const GeneratorShape& shape, std::uint64_t seed, const EmbeddingTable* pretrained = nullptr)
      : shape_(shape) {
    shape_.validate();
    params_ = GeneratorParams::zeros(shape_);
    Rng rng = make_rng(seed, "generator-init");
    const double d = static_cast<double>(shape_.dim);
    auto fill = [&](RowMatrix& m, double stddev) {
      std::normal_distribution<double> nd(0.0, stddev);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    };
    if (pretrained) {
      if (pretrained->num_nodes() != shape_.nodes || pretrained->dim() != shape_.dim)
        throw Error("pretrained embedding shape does not match the generator");
      params_.embed = pretrained->vectors;
    } else {
      fill(params_.embed, 0.1);
    }
    fill(params_.wq, 1.0 / std::sqrt(d));
    fill(params_.wk, 1.0 / std::sqrt(d));
    fill(params_.wv, 1.0 / std::sqrt(d));
    fill(params_.wo, 0.5 / std::sqrt(d));
    fill(params_.w1, 1.0 / std::sqrt(d));
    fill(params_.w2, 0.5 / std::sqrt(static_cast<double>(shape_.ffn)));
    fill(params_.out, 1.0 / std::sqrt(d));
    build_positions();
  }

  GeneratorModel(const GeneratorShape& shape, GeneratorParams params) : shape_(shape), params_(std::move(params)) {
    shape_.validate();
    build_positions();
  }

  const GeneratorShape& shape() const noexcept { return shape_; }
  std::size_t num_nodes() const noexcept { return shape_.nodes; }
  GeneratorParams& params() noexcept { return params_; }
  const GeneratorParams& params() const noexcept { return params_; }
  const RowMatrix& positions() const noexcept { return positions_; }

  ForwardCache forward(std::span<const NodeId> tokens) const {
    const auto len = static_cast<Eigen::Index>(tokens.size());
    if (len == 0) throw Error("forward pass needs at least one token");
    if (tokens.size() > shape_.max_length) throw Error("sequence longer than the model's walk length");
    const auto d = static_cast<Eigen::Index>(shape_.dim);
    const auto heads = static_cast<Eigen::Index>(shape_.heads);
    const Eigen::Index dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const GeneratorParams& p = params_;

    ForwardCache c;
    c.tokens.assign(tokens.begin(), tokens.end());
    c.input.resize(len, d);
    for (Eigen::Index t = 0; t < len; ++t) {
      if (tokens[static_cast<std::size_t>(t)] >= shape_.nodes) throw Error("token outside the node universe");
      c.input.row(t) = p.embed.row(tokens[static_cast<std::size_t>(t)]) + positions_.row(t);
    }
    c.q = c.input * p.wq.transpose();
    c.k = c.input * p.wk.transpose();
    c.v = c.input * p.wv.transpose();
    c.mixed = RowMatrix::Zero(len, d);
    c.attn.resize(static_cast<std::size_t>(heads));
    for (Eigen::Index h = 0; h < heads; ++h) {
      RowMatrix a = RowMatrix::Zero(len, len);
      for (Eigen::Index t = 0; t < len; ++t) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j <= t; ++j) {
          a(t, j) = scale * c.q.row(t).segment(h * dh, dh).dot(c.k.row(j).segment(h * dh, dh));
          mx = std::max(mx, a(t, j));
        }
        double z = 0.0;
        for (Eigen::Index j = 0; j <= t; ++j) {
          a(t, j) = std::exp(a(t, j) - mx);
          z += a(t, j);
        }
        for (Eigen::Index j = 0; j <= t; ++j) a(t, j) /= z;
      }
      c.mixed.middleCols(h * dh, dh) = a * c.v.middleCols(h * dh, dh);
      c.attn[static_cast<std::size_t>(h)] = std::move(a);
    }
    c.resid1 = c.input + c.mixed * p.wo.transpose();
    c.hidden_pre = (c.resid1 * p.w1.transpose()).rowwise() + p.b1.transpose();
    c.hidden = c.hidden_pre.cwiseMax(0.0);
    c.block_out = c.resid1 + ((c.hidden * p.w2.transpose()).rowwise() + p.b2.transpose());
    c.projected = c.block_out * p.out.transpose();
    c.logits = (c.projected * p.embed.transpose()).rowwise() + p.out_bias.transpose();
    return c;
  }

  /// Accumulates parameter gradients for upstream gradient d_logits.
  void backward(const ForwardCache& c, const RowMatrix& d_logits, GeneratorParams& g) const {
    const GeneratorParams& p = params_;
    const Eigen::Index len = c.input.rows();
    const auto d = static_cast<Eigen::Index>(shape_.dim);
    const auto heads = static_cast<Eigen::Index>(shape_.heads);
    const Eigen::Index dh = d / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    g.out_bias += d_logits.colwise().sum().transpose();
    g.embed.noalias() += d_logits.transpose() * c.projected;
    const RowMatrix d_proj = d_logits * p.embed;
    g.out.noalias() += d_proj.transpose() * c.block_out;
    const RowMatrix d_block = d_proj * p.out;

    RowMatrix d_resid1 = d_block;
    g.b2 += d_block.colwise().sum().transpose();
    g.w2.noalias() += d_block.transpose() * c.hidden;
    RowMatrix d_hidden = d_block * p.w2;
    for (Eigen::Index i = 0; i < d_hidden.size(); ++i)
      if (c.hidden_pre.data()[i] <= 0.0) d_hidden.data()[i] = 0.0;
    g.b1 += d_hidden.colwise().sum().transpose();
    g.w1.noalias() += d_hidden.transpose() * c.resid1;
    d_resid1.noalias() += d_hidden * p.w1;

    RowMatrix d_input = d_resid1;
    g.wo.noalias() += d_resid1.transpose() * c.mixed;
    const RowMatrix d_mixed = d_resid1 * p.wo;

    RowMatrix dq = RowMatrix::Zero(len, d), dk = RowMatrix::Zero(len, d), dv = RowMatrix::Zero(len, d);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const RowMatrix& a = c.attn[static_cast<std::size_t>(h)];
      const RowMatrix d_out_h = d_mixed.middleCols(h * dh, dh);
      const RowMatrix v_h = c.v.middleCols(h * dh, dh);
      const RowMatrix d_a = d_out_h * v_h.transpose();
      dv.middleCols(h * dh, dh).noalias() += a.transpose() * d_out_h;
      RowMatrix d_s = RowMatrix::Zero(len, len);
      for (Eigen::Index t = 0; t < len; ++t) {
        double dot = 0.0;
        for (Eigen::Index j = 0; j <= t; ++j) dot += a(t, j) * d_a(t, j);
        for (Eigen::Index j = 0; j <= t; ++j) d_s(t, j) = a(t, j) * (d_a(t, j) - dot) * scale;
      }
      dq.middleCols(h * dh, dh).noalias() += d_s * c.k.middleCols(h * dh, dh);
      dk.middleCols(h * dh, dh).noalias() += d_s.transpose() * c.q.middleCols(h * dh, dh);
    }
    g.wq.noalias() += dq.transpose() * c.input;
    g.wk.noalias() += dk.transpose() * c.input;
    g.wv.noalias() += dv.transpose() * c.input;
    d_input.noalias() += dq * p.wq + dk * p.wk + dv * p.wv;
    for (Eigen::Index t = 0; t < len; ++t) g.embed.row(c.tokens[static_cast<std::size_t>(t)]) += d_input.row(t);
  }

  /// Distribution of the node following `prefix` (1 <= |prefix| <= T-1).
  Vector next_node_distribution(std::span<const NodeId> prefix) const {
    if (prefix.empty()) throw Error("next-node distribution needs a non-empty prefix");
    if (prefix.size() > shape_.max_length - 1) throw Error("prefix longer than T-1");
    const ForwardCache c = forward(prefix);
    return softmax(c.logits.row(c.logits.rows() - 1).transpose());
  }

  /// Sum over t = 2..T of log g(w_t | w_<t).
  double walk_log_likelihood(std::span<const NodeId> walk) const {
    if (walk.size() < 2) return 0.0;
    const ForwardCache c = forward(walk.first(walk.size() - 1));
    double total = 0.0;
    for (Eigen::Index t = 0; t < c.logits.rows(); ++t)
      total += log_softmax_at(c.logits.row(t).transpose(), walk[static_cast<std::size_t>(t) + 1]);
    return total;
  }

  static Vector softmax(const Vector& logits) {
    const double mx = logits.maxCoeff();
    Vector e = (logits.array() - mx).exp().matrix();
    return e / e.sum();
  }

  static double log_softmax_at(const Vector& logits, NodeId target) {
    const double mx = logits.maxCoeff();
    const double lse = mx + std::log((logits.array() - mx).exp().sum());
    return logits(target) - lse;
  }

 private:
  void build_positions() {
    const auto d = static_cast<Eigen::Index>(shape_.dim);
    positions_.resize(static_cast<Eigen::Index>(shape_.max_length), d);
    for (Eigen::Index t = 0; t < positions_.rows(); ++t) {
      for (Eigen::Index i = 0; i < d; ++i) {
        const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
        positions_(t, i) = (i % 2 == 0) ? std::sin(static_cast<double>(t) * freq) : std::cos(static_cast<double>(t) * freq);
      }
    }
  }

  GeneratorShape shape_;
  GeneratorParams params_;
  RowMatrix positions_;
};

struct GenTrainConfig {
  double negative_weight = 0.1;    // mu
  double negative_floor = -10.0;   // log-prob floor for negatives
  std::size_t epochs = 1;
  std::size_t batch_size = 16;
  double learning_rate = 0.01;
  std::size_t max_steps = 0;  // 0 = no cap
  std::uint64_t seed = 0;

  void validate() const {
    if (!(negative_weight >= 0.0)) throw Error("negative weight must be non-negative");
    if (!(negative_floor < 0.0)) throw Error("negative log-prob floor must be negative");
    if (batch_size == 0) throw Error("generator batch size must be positive");
    if (!(learning_rate >= 0.0)) throw Error("generator learning rate must be non-negative");
  }
};

struct GenTrainTrace {
  std::vector<double> loss;            // per step
  std::vector<double> positive_loglik; // per step, mean over the positive batch
};

/// Contrastive objective on one minibatch, accumulating gradients:
///   -mean_pos sum_t log g(w_t|w<t) + mu * mean_neg sum_t max(log g(w_t|w<t), floor)
/// Returns {loss, mean positive log-likelihood}.
inline std::pair<double, double> generator_batch_loss(const GeneratorModel& model,
                                                      std::span<const Walk* const> pos,
                                                      std::span<const Walk* const> neg,
                                                      const GenTrainConfig& cfg, GeneratorParams* grad) {
  double loss = 0.0, pos_ll = 0.0;
  auto run = [&](const Walk& w, bool positive, double coef) {
    const std::span<const NodeId> nodes(w.nodes);
    if (nodes.size() < 2) return;
    const ForwardCache c = model.forward(nodes.first(nodes.size() - 1));
    RowMatrix d_logits = RowMatrix::Zero(c.logits.rows(), c.logits.cols());
    double walk_ll = 0.0;
    for (Eigen::Index t = 0; t < c.logits.rows(); ++t) {
      const NodeId target = nodes[static_cast<std::size_t>(t) + 1];
      const Vector logits = c.logits.row(t).transpose();
      const Vector prob = GeneratorModel::softmax(logits);
      const double lp = GeneratorModel::log_softmax_at(logits, target);
      walk_ll += lp;
      if (positive) {
        loss -= coef * lp;
        d_logits.row(t) = coef * prob.transpose();
        d_logits(t, target) -= coef;
      } else {
        if (lp > cfg.negative_floor) {
          loss += coef * lp;
          d_logits.row(t) = -coef * prob.transpose();
          d_logits(t, target) += coef;
        } else {
          loss += coef * cfg.negative_floor;
        }
      }
    }
    if (positive) pos_ll += walk_ll / static_cast<double>(pos.size());
    if (grad) model.backward(c, d_logits, *grad);
  };
  for (const Walk* w : pos) run(*w, true, 1.0 / static_cast<double>(pos.size()));
  if (cfg.negative_weight > 0.0 && !neg.empty())
    for (const Walk* w : neg) run(*w, false, cfg.negative_weight / static_cast<double>(neg.size()));
  return {loss, pos_ll};
}

/// Minibatch SGD over the positive pool; each positive minibatch is paired
/// with the next slice of a shuffled negative pool. Deterministic in cfg.seed.
inline GenTrainTrace train_generator(GeneratorModel& model, const WalkBatch& pos, const WalkBatch& neg,
                                     const GenTrainConfig& cfg) {
  cfg.validate();
  if (pos.empty()) throw Error("generator training needs positive walks");
  if (neg.empty() && cfg.negative_weight > 0.0) throw Error("generator training needs negative walks");
  if (!neg.empty() && neg.length() != pos.length()) throw Error("positive and negative walks differ in length");
  for (const auto* batch : {&pos, &neg})
    for (const auto& w : batch->walks)
      for (NodeId u : w.nodes)
        if (u >= model.num_nodes()) throw Error("walk node outside the generator's node universe");

  GenTrainTrace trace;
  GeneratorParams grad = GeneratorParams::zeros(model.shape());
  std::vector<std::size_t> pos_order(pos.size()), neg_order(neg.size());
  std::size_t neg_cursor = 0;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng = make_rng(cfg.seed, "generator-epoch", epoch);
    std::iota(pos_order.begin(), pos_order.end(), std::size_t{0});
    std::shuffle(pos_order.begin(), pos_order.end(), rng);
    if (!neg.empty() && epoch == 0) {
      std::iota(neg_order.begin(), neg_order.end(), std::size_t{0});
      std::shuffle(neg_order.begin(), neg_order.end(), rng);
    }
    for (std::size_t begin = 0; begin < pos.size(); begin += cfg.batch_size) {
      if (cfg.max_steps && step >= cfg.max_steps) return trace;
      const std::size_t end = std::min(pos.size(), begin + cfg.batch_size);
      std::vector<const Walk*> pb, nb;
      for (std::size_t i = begin; i < end; ++i) pb.push_back(&pos.walks[pos_order[i]]);
      if (!neg.empty() && cfg.negative_weight > 0.0) {
        for (std::size_t i = 0; i < end - begin; ++i) {
          nb.push_back(&neg.walks[neg_order[neg_cursor]]);
          neg_cursor = (neg_cursor + 1) % neg.size();
        }
      }
      grad.set_zero();
      auto [loss, pos_ll] = generator_batch_loss(model, pb, nb, cfg, &grad);
      if (!std::isfinite(loss) || !grad.all_finite()) {
        throw NumericalError("generator loss became non-finite at step " + std::to_string(step) +
                             " (epoch " + std::to_string(epoch) + ", loss " + std::to_string(loss) + ")");
      }
      model.params().add_scaled(grad, -cfg.learning_rate);
      trace.loss.push_back(loss);
      trace.positive_loglik.push_back(pos_ll);
      ++step;
    }
  }
  return trace;
}

/// Empirical start-node frequencies of a walk pool.
inline std::vector<double> start_distribution(const WalkBatch& batch, std::size_t n) {
  std::vector<double> dist(n, 0.0);
  for (const auto& w : batch.walks)
    if (!w.nodes.empty()) dist[w.nodes.front()] += 1.0;
  return dist;
}

/// Samples `count` walks autoregressively; walk i uses stream (seed, i).
inline WalkBatch generate_walks(const GeneratorModel& model, std::size_t count, std::size_t length,
                                const std::vector<double>& start_dist, std::uint64_t seed, unsigned threads = 1) {
  if (start_dist.size() != model.num_nodes()) throw Error("start distribution size does not match the model");
  double mass = 0.0;
  for (double w : start_dist) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("start distribution has a negative or non-finite weight");
    mass += w;
  }
  if (!(mass > 0.0)) throw Error("start distribution has no mass");
  if (length < 1 || length > model.shape().max_length) throw Error("generated walk length outside [1, T]");
  std::discrete_distribution<std::size_t> start(start_dist.begin(), start_dist.end());
  WalkBatch out;
  out.role = WalkRole::negative;
  out.walks.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng = make_rng(seed, "generate", i);
    auto start_local = start;
    Walk w;
    w.origin = WalkOrigin::generated;
    w.nodes.reserve(length);
    w.nodes.push_back(static_cast<NodeId>(start_local(rng)));
    while (w.nodes.size() < length) {
      const Vector p = model.next_node_distribution(w.nodes);
      double u = uniform01(rng);
      std::size_t pick = static_cast<std::size_t>(p.size()) - 1;
      for (Eigen::Index j = 0; j < p.size(); ++j) {
        u -= p(j);
        if (u < 0.0) {
          pick = static_cast<std::size_t>(j);
          break;
        }
      }
      w.nodes.push_back(static_cast<NodeId>(pick));
    }
    out.walks[i] = std::move(w);
  });
  return out;
}

// Checkpoint: 8-byte magic, then little-endian uint32 version, n, d, T,
// heads, ffn, then every parameter block as little-endian float32.
inline constexpr char kCheckpointMagic[8] = {'F', 'G', 'E', 'N', 'M', 'D', 'L', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated checkpoint");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

inline void save_checkpoint(std::ostream& out, const GeneratorModel& model) {
  const auto& s = model.shape();
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  detail::put_u32(out, kCheckpointVersion);
  for (std::size_t v : {s.nodes, s.dim, s.max_length, s.heads, s.ffn}) detail::put_u32(out, static_cast<std::uint32_t>(v));
  model.params().for_each_block([&](const char*, const double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(data[i])));
  });
  if (!out) throw Error("failed to write checkpoint");
}

inline GeneratorModel load_checkpoint(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0) throw Error("not a generator checkpoint");
  const std::uint32_t version = detail::get_u32(in);
  if (version != kCheckpointVersion) throw Error("unsupported checkpoint version " + std::to_string(version));
  GeneratorShape s;
  s.nodes = detail::get_u32(in);
  s.dim = detail::get_u32(in);
  s.max_length = detail::get_u32(in);
  s.heads = detail::get_u32(in);
  s.ffn = detail::get_u32(in);
  s.validate();
  GeneratorParams p = GeneratorParams::zeros(s);
  p.for_each_block([&](const char*, double* data, Eigen::Index size) {
    for (Eigen::Index i = 0; i < size; ++i) data[i] = std::bit_cast<float>(detail::get_u32(in));
  });
  return GeneratorModel(s, std::move(p));
}

}  // namespace fairgen
