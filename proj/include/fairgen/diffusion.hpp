#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"

namespace fairgen {

namespace detail {

inline void require_member(const NodeMask& s, NodeId x) {
  if (x >= s.size() || !s[x]) throw Error("node " + std::to_string(x) + " is not in the set");
}

}  // namespace detail

/// Escape probabilities of the lazy walk from x truncated to S, for every
/// horizon 0..t: entry k is 1 - 1'(diag(chi_S) M)^k chi_x. The killed mass
/// is accumulated directly so a walk that cannot leave scores exactly 0.
inline std::vector<double> escape_trace(const TransitionMatrix& m, const NodeMask& s, NodeId x,
                                        std::size_t t) {
  detail::require_member(s, x);
  const std::size_t n = m.size();
  std::vector<double> p(n, 0.0), next(n, 0.0);
  p[x] = 1.0;
  std::vector<double> trace(t + 1, 0.0);
  double killed = 0.0;
  for (std::size_t step = 1; step <= t; ++step) {
    m.multiply(p, next);
    for (std::size_t i = 0; i < n; ++i) {
      if (!s[i]) {
        killed += next[i];
        next[i] = 0.0;
      }
    }
    std::swap(p, next);
    trace[step] = std::min(1.0, killed);
  }
  return trace;
}

inline double escape_probability(const TransitionMatrix& m, const NodeMask& s, NodeId x, std::size_t t) {
  return escape_trace(m, s, x, t).back();
}

inline double escape_probability(const Graph& g, std::span<const NodeId> s, NodeId x, std::size_t t) {
  return escape_probability(TransitionMatrix::build(g, true), make_mask(g.num_nodes(), s), x, t);
}

/// 1 - chi_S' M^t chi_x, the mass of the untruncated walk outside S at step t.
inline double outside_probability(const TransitionMatrix& m, const NodeMask& s, NodeId x, std::size_t t) {
  detail::require_member(s, x);
  const std::size_t n = m.size();
  std::vector<double> p(n, 0.0), next(n, 0.0);
  p[x] = 1.0;
  for (std::size_t step = 0; step < t; ++step) {
    m.multiply(p, next);
    std::swap(p, next);
  }
  double outside = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!s[i]) outside += p[i];
  return std::min(1.0, outside);
}

inline double outside_probability(const Graph& g, std::span<const NodeId> s, NodeId x, std::size_t t) {
  return outside_probability(TransitionMatrix::build(g, true), make_mask(g.num_nodes(), s), x, t);
}

/// Conductance with the closed-set convention: 0 when no edge leaves S
/// (including S equal to the whole node set).
inline double set_conductance(const Graph& g, const NodeMask& s) {
  if (std::count(s.begin(), s.end(), 1) == 0) throw Error("node set is empty");
  if (cut_size(g, s) == 0) return 0.0;
  return conductance(g, s);
}

/// (delta, t)-diffusion core: members x with outside probability at step t
/// below delta * phi(S). A set with phi(S) = 0 is its own core.
inline std::vector<NodeId> diffusion_core(const Graph& g, const NodeMask& s, double delta, std::size_t t) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error("diffusion core needs delta in (0, 1)");
  const double phi = set_conductance(g, s);
  if (phi == 0.0) return mask_nodes(s);
  const auto m = TransitionMatrix::build(g, true);
  const double bound = delta * phi;
  std::vector<NodeId> core;
  for (NodeId x : mask_nodes(s))
    if (outside_probability(m, s, x, t) < bound) core.push_back(x);
  return core;
}

inline std::vector<NodeId> diffusion_core(const Graph& g, std::span<const NodeId> s, double delta,
                                          std::size_t t) {
  return diffusion_core(g, make_mask(g.num_nodes(), s), delta, t);
}

struct LemmaNodeResult {
  NodeId node = 0;
  bool in_core = false;   // the bound is only claimed for core members
  double worst_ratio = 0.0;  // max over T of escape(T) / (T delta phi); 0 when phi = 0
  double min_slack = std::numeric_limits<double>::infinity();  // min over T of T delta phi - escape(T)
  bool violated = false;
};

struct LemmaReport {
  double conductance = 0.0;
  double delta = 0.0;
  std::size_t t_max = 0;
  std::vector<NodeId> core;
  std::vector<LemmaNodeResult> nodes;  // every member of S
  std::size_t checked = 0;
  std::size_t violations = 0;

  bool core_empty() const noexcept { return core.empty(); }
  bool passed() const noexcept { return violations == 0; }
};

/// Round-off allowance when comparing exact-arithmetic quantities.
inline constexpr double kLemmaTolerance = 1e-12;

/// Checks escape(S, x, T) <= T * delta * phi(S) for every core member x of
/// the (delta, t_max)-diffusion core and every horizon 1 <= T <= t_max.
inline LemmaReport verify_lemma_bound(const Graph& g, const NodeMask& s, double delta, std::size_t t_max) {
  LemmaReport report;
  report.delta = delta;
  report.t_max = t_max;
  report.conductance = set_conductance(g, s);
  report.core = diffusion_core(g, s, delta, t_max);
  const auto m = TransitionMatrix::build(g, true);
  NodeMask in_core = make_mask(g.num_nodes(), report.core);
  for (NodeId x : mask_nodes(s)) {
    LemmaNodeResult r;
    r.node = x;
    r.in_core = in_core[x] != 0;
    if (r.in_core) {
      ++report.checked;
      const auto trace = escape_trace(m, s, x, t_max);
      for (std::size_t big_t = 1; big_t <= t_max; ++big_t) {
        const double bound = static_cast<double>(big_t) * delta * report.conductance;
        r.min_slack = std::min(r.min_slack, bound - trace[big_t]);
        if (bound > 0.0) r.worst_ratio = std::max(r.worst_ratio, trace[big_t] / bound);
        if (trace[big_t] > bound + kLemmaTolerance) r.violated = true;
      }
      if (r.violated) ++report.violations;
    }
    report.nodes.push_back(r);
  }
  return report;
}

}  // namespace fairgen
