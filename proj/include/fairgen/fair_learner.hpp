#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fairgen/embedding.hpp"
#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"

namespace fairgen {

/// Floor applied to every log-probability the fair learner consumes.
inline constexpr double kLogFloor = -30.0;

struct FairLossWeights {
  double alpha = 1.0;  // prediction
  double beta = 1.0;   // label propagation
  double gamma = 1.0;  // parity

  void validate() const {
    for (double w : {alpha, beta, gamma})
      if (!std::isfinite(w) || w < 0.0) throw Error("loss weights must be finite and non-negative");
  }
};

struct DiscriminatorParams {
  RowMatrix w1;  // h x d
  Vector b1;
  RowMatrix w2;  // h x h
  Vector b2;
  RowMatrix w3;  // C x h
  Vector b3;

  static DiscriminatorParams zeros(std::size_t dim, std::size_t hidden, std::size_t classes) {
    const auto d = static_cast<Eigen::Index>(dim), h = static_cast<Eigen::Index>(hidden),
               c = static_cast<Eigen::Index>(classes);
    return {RowMatrix::Zero(h, d), Vector::Zero(h), RowMatrix::Zero(h, h),
            Vector::Zero(h),       RowMatrix::Zero(c, h), Vector::Zero(c)};
  }

  template <class Fn>
  void for_each_block(Fn&& fn) {
    fn("w1", w1.data(), w1.size());
    fn("b1", b1.data(), b1.size());
    fn("w2", w2.data(), w2.size());
    fn("b2", b2.data(), b2.size());
    fn("w3", w3.data(), w3.size());
    fn("b3", b3.data(), b3.size());
  }
  template <class Fn>
  void for_each_block(Fn&& fn) const {
    const_cast<DiscriminatorParams*>(this)->for_each_block(
        [&](const char* name, double* data, Eigen::Index size) { fn(name, static_cast<const double*>(data), size); });
  }
};

/// Three affine layers d -> h -> h -> C with ReLU between and a softmax head.
class Discriminator {
 public:
  Discriminator() = default;

  Discriminator(std::size_t dim, std::size_t classes, std::uint64_t seed, std::size_t hidden = 64) {
    if (dim == 0 || hidden == 0) throw Error("discriminator widths must be positive");
    if (classes < 2) throw Error("discriminator needs at least two classes");
    p_ = DiscriminatorParams::zeros(dim, hidden, classes);
    Rng rng = make_rng(seed, "discriminator-init");
    auto fill = [&](RowMatrix& m) {
      std::normal_distribution<double> nd(0.0, std::sqrt(2.0 / static_cast<double>(m.cols())));
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
    };
    fill(p_.w1);
    fill(p_.w2);
    fill(p_.w3);
  }

  explicit Discriminator(DiscriminatorParams p) : p_(std::move(p)) {}

  std::size_t input_dim() const { return static_cast<std::size_t>(p_.w1.cols()); }
  std::size_t hidden() const { return static_cast<std::size_t>(p_.w1.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(p_.w3.rows()); }
  DiscriminatorParams& params() noexcept { return p_; }
  const DiscriminatorParams& params() const noexcept { return p_; }

  struct Cache {
    RowMatrix input, pre1, act1, pre2, act2, logits, log_prob;  // log_prob unclamped
  };

  Cache forward(const RowMatrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim()) throw Error("feature width does not match the discriminator");
    Cache c;
    c.input = x;
    c.pre1 = (x * p_.w1.transpose()).rowwise() + p_.b1.transpose();
    c.act1 = c.pre1.cwiseMax(0.0);
    c.pre2 = (c.act1 * p_.w2.transpose()).rowwise() + p_.b2.transpose();
    c.act2 = c.pre2.cwiseMax(0.0);
    c.logits = (c.act2 * p_.w3.transpose()).rowwise() + p_.b3.transpose();
    c.log_prob.resize(c.logits.rows(), c.logits.cols());
    for (Eigen::Index i = 0; i < c.logits.rows(); ++i) {
      const double mx = c.logits.row(i).maxCoeff();
      const double lse = mx + std::log((c.logits.row(i).array() - mx).exp().sum());
      c.log_prob.row(i) = c.logits.row(i).array() - lse;
    }
    return c;
  }

  /// Backpropagates d(loss)/d(log_prob) (unclamped) into parameter gradients.
  void backward(const Cache& c, const RowMatrix& d_log_prob, DiscriminatorParams& g) const {
    RowMatrix d_logits(d_log_prob.rows(), d_log_prob.cols());
    for (Eigen::Index i = 0; i < d_log_prob.rows(); ++i) {
      const double s = d_log_prob.row(i).sum();
      d_logits.row(i) = d_log_prob.row(i).array() - c.log_prob.row(i).array().exp() * s;
    }
    g.b3 += d_logits.colwise().sum().transpose();
    g.w3.noalias() += d_logits.transpose() * c.act2;
    RowMatrix d2 = d_logits * p_.w3;
    for (Eigen::Index i = 0; i < d2.size(); ++i)
      if (c.pre2.data()[i] <= 0.0) d2.data()[i] = 0.0;
    g.b2 += d2.colwise().sum().transpose();
    g.w2.noalias() += d2.transpose() * c.act1;
    RowMatrix d1 = d2 * p_.w2;
    for (Eigen::Index i = 0; i < d1.size(); ++i)
      if (c.pre1.data()[i] <= 0.0) d1.data()[i] = 0.0;
    g.b1 += d1.colwise().sum().transpose();
    g.w1.noalias() += d1.transpose() * c.input;
  }

  /// Clamped log Pr(y = c | x_i) for every row of `features`.
  RowMatrix log_probabilities(const RowMatrix& features) const {
    return forward(features).log_prob.cwiseMax(kLogFloor);
  }

 private:
  DiscriminatorParams p_;
};

/// xi_x: 1/|S+| for protected nodes, 1/|S-| otherwise.
inline double cost_weight(NodeId x, const GroupMembership& groups) {
  if (groups.protected_count() == 0 || groups.unprotected_count() == 0)
    throw Error("cost-sensitive weights need both groups non-empty");
  return groups.is_protected(x) ? 1.0 / static_cast<double>(groups.protected_count())
                                : 1.0 / static_cast<double>(groups.unprotected_count());
}

struct ParityTerms {
  Vector protected_mean;    // m+
  Vector unprotected_mean;  // m-
};

/// Per-class group means of clamped log-probabilities.
inline ParityTerms parity_terms_from(const RowMatrix& log_prob, const GroupMembership& groups) {
  if (groups.protected_count() == 0 || groups.unprotected_count() == 0)
    throw Error("parity terms need both groups non-empty");
  const Eigen::Index c = log_prob.cols();
  ParityTerms t{Vector::Zero(c), Vector::Zero(c)};
  for (Eigen::Index i = 0; i < log_prob.rows(); ++i) {
    const Vector row = log_prob.row(i).transpose().cwiseMax(kLogFloor);
    if (groups.is_protected(static_cast<NodeId>(i))) {
      t.protected_mean += row;
    } else {
      t.unprotected_mean += row;
    }
  }
  t.protected_mean /= static_cast<double>(groups.protected_count());
  t.unprotected_mean /= static_cast<double>(groups.unprotected_count());
  return t;
}

inline ParityTerms parity_terms(const Discriminator& d, const EmbeddingTable& feats, const GroupMembership& groups) {
  return parity_terms_from(d.log_probabilities(feats.vectors), groups);
}

/// gamma * sum_c |m+_c - m-_c|
inline double fairness_loss(const Vector& m_plus, const Vector& m_minus, double gamma) {
  if (m_plus.size() != m_minus.size()) throw Error("parity vectors differ in length");
  return gamma * (m_plus - m_minus).cwiseAbs().sum();
}

/// Binary selection vectors v^(c) with the threshold schedule.
struct SelfPacedState {
  std::size_t num_nodes = 0;
  std::size_t num_classes = 0;
  std::vector<std::uint8_t> v;  // row-major n x C
  double lambda = 0.105;
  double lambda0 = 0.105;
  double growth = 1.5;
  std::size_t cycle = 0;
  LabelSet ground_truth;
  RowMatrix log_prob;  // clamped model log-probabilities from the last update; empty before one

  SelfPacedState() = default;

  /// v starts at the ground-truth one-hot vectors.
  SelfPacedState(const LabelSet& truth, double lambda_init = 0.105, double rho = 1.5)
      : num_nodes(truth.num_nodes()),
        num_classes(static_cast<std::size_t>(truth.num_classes())),
        v(truth.num_nodes() * static_cast<std::size_t>(truth.num_classes()), 0),
        lambda(lambda_init),
        lambda0(lambda_init),
        growth(rho),
        ground_truth(truth) {
    if (!(lambda_init > 0.0)) throw Error("self-paced threshold must be positive");
    if (!(rho > 1.0)) throw Error("self-paced growth must exceed 1");
    apply_ground_truth();
  }

  bool selected(NodeId i, std::size_t c) const { return v[i * num_classes + c] != 0; }
  std::size_t selected_count() const {
    return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
  }
  void advance() {
    lambda *= growth;
    ++cycle;
  }
  void apply_ground_truth() {
    for (NodeId u : ground_truth.nodes()) {
      const auto cls = static_cast<std::size_t>(*ground_truth.get(u));
      for (std::size_t c = 0; c < num_classes; ++c) v[u * num_classes + c] = c == cls;
    }
  }

  friend bool operator==(const SelfPacedState& a, const SelfPacedState& b) {
    return a.v == b.v && a.lambda == b.lambda && a.cycle == b.cycle && a.ground_truth == b.ground_truth;
  }
};

/// v_ic = 1 iff -log Pr(c | x_i) < lambda (strict).
inline std::vector<std::uint8_t> self_paced_select(const RowMatrix& log_prob, double lambda) {
  if (!(lambda > 0.0)) throw Error("self-paced threshold must be positive");
  std::vector<std::uint8_t> v(static_cast<std::size_t>(log_prob.size()), 0);
  for (Eigen::Index i = 0; i < log_prob.rows(); ++i)
    for (Eigen::Index c = 0; c < log_prob.cols(); ++c)
      v[static_cast<std::size_t>(i * log_prob.cols() + c)] = -log_prob(i, c) < lambda;
  return v;
}

inline SelfPacedState update_self_paced(const Discriminator& d, const EmbeddingTable& feats, const SelfPacedState& sp) {
  if (d.num_classes() != sp.num_classes || feats.num_nodes() != sp.num_nodes)
    throw Error("self-paced state does not match the model");
  SelfPacedState next = sp;
  next.log_prob = d.log_probabilities(feats.vectors);
  next.v = self_paced_select(next.log_prob, sp.lambda);
  next.apply_ground_truth();
  return next;
}

/// Ground truth plus unlabeled nodes with a selected class: each gets the
/// most probable selected class, lowest index on ties.
inline LabelSet pseudo_labels(const SelfPacedState& sp) {
  LabelSet out = sp.ground_truth;
  if (sp.log_prob.size() == 0) return out;
  for (NodeId i = 0; i < sp.num_nodes; ++i) {
    if (sp.ground_truth.has(i)) continue;
    int best = -1;
    for (std::size_t c = 0; c < sp.num_classes; ++c) {
      if (!sp.selected(i, c)) continue;
      if (best < 0 || sp.log_prob(i, static_cast<Eigen::Index>(c)) > sp.log_prob(i, best)) best = static_cast<int>(c);
    }
    if (best >= 0) out.set(i, best);
  }
  return out;
}

/// "node<TAB>class<TAB>confidence<TAB>cycle" for every pseudo-labeled node.
inline void write_pseudo_label_audit(std::ostream& out, const Graph& g, const SelfPacedState& sp) {
  const LabelSet all = pseudo_labels(sp);
  out << std::setprecision(9);
  for (NodeId u : all.nodes()) {
    if (sp.ground_truth.has(u)) continue;
    const int c = *all.get(u);
    out << g.external_id(u) << '\t' << c << '\t' << std::exp(sp.log_prob(u, c)) << '\t' << sp.cycle << '\n';
  }
}

struct DiscriminatorLoss {
  double prediction = 0.0;  // J_P
  double label_prop = 0.0;  // J_L
  double fairness = 0.0;    // J_F
  double total() const { return prediction + label_prop + fairness; }
};

/// J_P over `supervised` (ground-truth nodes), J_L over `propagated` using v,
/// J_F over the full groups. Accumulates parameter gradients when asked.
inline DiscriminatorLoss discriminator_objective(const Discriminator& d, const EmbeddingTable& feats,
                                                 const LabelSet& truth, std::span<const NodeId> supervised,
                                                 const SelfPacedState& sp, std::span<const NodeId> propagated,
                                                 const GroupMembership& groups, const FairLossWeights& w,
                                                 DiscriminatorParams* grad) {
  w.validate();
  const auto classes = static_cast<Eigen::Index>(d.num_classes());
  const auto cache = d.forward(feats.vectors);
  const RowMatrix& lp = cache.log_prob;
  RowMatrix d_lp = RowMatrix::Zero(lp.rows(), lp.cols());
  // dmax(x, floor)/dx
  auto live = [&](Eigen::Index i, Eigen::Index c) { return lp(i, c) > kLogFloor ? 1.0 : 0.0; };
  auto clamped = [&](Eigen::Index i, Eigen::Index c) { return std::max(lp(i, c), kLogFloor); };
  DiscriminatorLoss loss;

  for (NodeId u : supervised) {
    const auto cls = truth.get(u);
    if (!cls) throw Error("supervised node '" + std::to_string(u) + "' has no label");
    if (*cls >= classes) throw Error("label class exceeds the discriminator's classes");
    const double xi = cost_weight(u, groups);
    loss.prediction -= w.alpha * xi * clamped(u, *cls);
    d_lp(u, *cls) -= w.alpha * xi * live(u, *cls);
  }

  for (NodeId u : propagated) {
    for (Eigen::Index c = 0; c < classes; ++c) {
      if (!sp.selected(u, static_cast<std::size_t>(c))) continue;
      loss.label_prop -= w.beta * clamped(u, c);
      d_lp(u, c) -= w.beta * live(u, c);
    }
  }

  if (w.gamma > 0.0) {
    const ParityTerms t = parity_terms_from(lp, groups);
    loss.fairness = fairness_loss(t.protected_mean, t.unprotected_mean, w.gamma);
    const double np = static_cast<double>(groups.protected_count());
    const double nu = static_cast<double>(groups.unprotected_count());
    for (Eigen::Index c = 0; c < classes; ++c) {
      const double diff = t.protected_mean(c) - t.unprotected_mean(c);
      const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      if (sign == 0.0) continue;
      for (Eigen::Index i = 0; i < lp.rows(); ++i) {
        const double share = groups.is_protected(static_cast<NodeId>(i)) ? 1.0 / np : -1.0 / nu;
        d_lp(i, c) += w.gamma * sign * share * live(i, c);
      }
    }
  }
  if (grad) d.backward(cache, d_lp, *grad);
  return loss;
}

/// alpha * sum over labeled nodes of xi_x * CE(Pr(.|x), y_x)
inline double prediction_loss(const Discriminator& d, const EmbeddingTable& feats, const LabelSet& labels,
                              const GroupMembership& groups, double alpha) {
  if (labels.empty()) throw Error("prediction loss needs labels");
  const auto nodes = labels.nodes();
  return discriminator_objective(d, feats, labels, nodes, SelfPacedState(), {}, groups, {alpha, 0.0, 0.0}, nullptr)
      .prediction;
}

/// -beta * sum_i sum_c v_ic log Pr(c | x_i)
inline double label_prop_loss(const Discriminator& d, const EmbeddingTable& feats, const SelfPacedState& sp,
                              double beta) {
  const RowMatrix lp = d.log_probabilities(feats.vectors);
  double total = 0.0;
  for (NodeId i = 0; i < sp.num_nodes; ++i)
    for (std::size_t c = 0; c < sp.num_classes; ++c)
      if (sp.selected(i, c)) total -= lp(i, static_cast<Eigen::Index>(c));
  return beta * total;
}

/// One SGD step on J_P + J_L + J_F over `batch`; returns the pre-step loss.
inline DiscriminatorLoss train_discriminator_step(Discriminator& d, const EmbeddingTable& feats, const LabelSet& truth,
                                                  const GroupMembership& groups, const SelfPacedState& sp,
                                                  const FairLossWeights& w, std::span<const NodeId> batch, double lr) {
  std::vector<NodeId> supervised;
  for (NodeId u : batch)
    if (truth.has(u)) supervised.push_back(u);
  DiscriminatorParams grad =
      DiscriminatorParams::zeros(d.input_dim(), d.hidden(), d.num_classes());
  const DiscriminatorLoss loss =
      discriminator_objective(d, feats, truth, supervised, sp, batch, groups, w, &grad);
  if (!std::isfinite(loss.total())) throw NumericalError("discriminator loss became non-finite");
  std::vector<const double*> src;
  grad.for_each_block([&](const char*, const double* data, Eigen::Index) { src.push_back(data); });
  std::size_t k = 0;
  d.params().for_each_block([&](const char*, double* data, Eigen::Index size) {
    const double* g = src[k++];
    for (Eigen::Index i = 0; i < size; ++i) data[i] -= lr * g[i];
  });
  return loss;
}

}  // namespace fairgen
