#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/rng.hpp"

namespace fairgen {

enum class Metric { ad, lcc, tc, ple, gini, ede, aspl, ncc, cc };

inline constexpr std::array<Metric, 9> kAllMetrics = {Metric::ad,   Metric::lcc, Metric::tc,
                                                      Metric::ple,  Metric::gini, Metric::ede,
                                                      Metric::aspl, Metric::ncc, Metric::cc};

inline constexpr std::string_view metric_name(Metric m) {
  constexpr std::array<std::string_view, 9> names = {"AD", "LCC", "TC", "PLE", "Gini", "EDE", "ASPL", "NCC", "CC"};
  return names[static_cast<std::size_t>(m)];
}

inline std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    const auto ref = metric_name(m);
    if (ref.size() == name.size() &&
        std::equal(ref.begin(), ref.end(), name.begin(), [](char a, char b) { return std::tolower(a) == std::tolower(b); }))
      return m;
  }
  return std::nullopt;
}

/// A metric value; NaN with a note when the metric is undefined.
struct MetricValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
  std::string note;

  static MetricValue of(double v) { return {v, true, {}}; }
  static MetricValue undefined(std::string why) { return {std::numeric_limits<double>::quiet_NaN(), false, std::move(why)}; }
};

/// Per-node triangle counts; each triangle is found once from its lowest edge.
inline std::vector<std::uint64_t> triangles_per_node(const Graph& g) {
  std::vector<std::uint64_t> t(g.num_nodes(), 0);
  for (auto [u, v] : g.edges()) {
    auto a = g.neighbors(u), b = g.neighbors(v);
    auto ia = std::upper_bound(a.begin(), a.end(), v);
    auto ib = std::upper_bound(b.begin(), b.end(), v);
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++t[u];
        ++t[v];
        ++t[*ia];
        ++ia;
        ++ib;
      }
    }
  }
  return t;
}

inline std::uint64_t triangle_count(const Graph& g) {
  std::uint64_t s = 0;
  for (auto c : triangles_per_node(g)) s += c;
  return s / 3;
}

struct PathStats {
  std::uint64_t distance_sum = 0;  // over ordered reachable pairs
  std::uint64_t reachable_pairs = 0;
  std::uint64_t unreachable_pairs = 0;
};

inline PathStats path_stats(const Graph& g, unsigned threads = 1) {
  const std::size_t n = g.num_nodes();
  std::vector<PathStats> per(n);
  parallel_for(n, threads, [&](std::size_t s) {
    std::vector<std::uint32_t> dist(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<NodeId> frontier{static_cast<NodeId>(s)};
    dist[s] = 0;
    PathStats p;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId u = frontier[head];
      for (NodeId w : g.neighbors(u)) {
        if (dist[w] != std::numeric_limits<std::uint32_t>::max()) continue;
        dist[w] = dist[u] + 1;
        p.distance_sum += dist[w];
        ++p.reachable_pairs;
        frontier.push_back(w);
      }
    }
    p.unreachable_pairs = (n - 1) - p.reachable_pairs;
    per[s] = p;
  });
  PathStats total;
  for (const auto& p : per) {
    total.distance_sum += p.distance_sum;
    total.reachable_pairs += p.reachable_pairs;
    total.unreachable_pairs += p.unreachable_pairs;
  }
  return total;
}

inline std::vector<std::size_t> sorted_degrees(const Graph& g) {
  std::vector<std::size_t> d(g.num_nodes());
  for (NodeId u = 0; u < g.num_nodes(); ++u) d[u] = g.degree(u);
  std::sort(d.begin(), d.end());
  return d;
}

namespace detail {

inline MetricValue power_law_exponent(const Graph& g) {
  std::size_t dmin = std::numeric_limits<std::size_t>::max(), count = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.degree(u) > 0) dmin = std::min(dmin, g.degree(u)), ++count;
  if (count == 0) return MetricValue::undefined("no edges");
  double s = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.degree(u) > 0) s += std::log(static_cast<double>(g.degree(u)) / static_cast<double>(dmin));
  if (s == 0.0) return MetricValue::undefined("all degrees equal");
  return MetricValue::of(1.0 + static_cast<double>(count) / s);
}

/// sum_i (2i - n - 1) d_(i) / (n sum d) over ascending degrees; the integer
/// numerator makes any regular graph score exactly 0.
inline MetricValue gini(const Graph& g) {
  const auto d = sorted_degrees(g);
  const auto n = static_cast<std::int64_t>(d.size());
  std::int64_t weighted = 0, total = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto di = static_cast<std::int64_t>(d[static_cast<std::size_t>(i)]);
    weighted += (2 * (i + 1) - n - 1) * di;
    total += di;
  }
  if (total == 0) return MetricValue::undefined("no edges");
  return MetricValue::of(static_cast<double>(weighted) / (static_cast<double>(n) * static_cast<double>(total)));
}

inline MetricValue edge_distribution_entropy(const Graph& g) {
  const double n = static_cast<double>(g.num_nodes());
  const double mass = static_cast<double>(g.degree_sum());
  if (mass == 0.0) return MetricValue::undefined("no edges");
  if (g.num_nodes() < 2) return MetricValue::undefined("single node");
  // Grouped by degree as sum (c d / mass) log(mass / d): for a regular graph
  // both factors are exact, so the ratio to log n is exactly 1.
  std::map<std::size_t, std::size_t> hist;
  for (NodeId u = 0; u < g.num_nodes(); ++u)
    if (g.degree(u) > 0) ++hist[g.degree(u)];
  double h = 0.0;
  for (auto [deg, count] : hist) {
    const double d = static_cast<double>(deg);
    h += (static_cast<double>(count) * d / mass) * std::log(mass / d);
  }
  return MetricValue::of(h / std::log(n));
}

inline MetricValue clustering(const Graph& g, const std::vector<std::uint64_t>& tri) {
  double s = 0.0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const double d = static_cast<double>(g.degree(u));
    if (d >= 2.0) s += static_cast<double>(tri[u]) / (d * (d - 1.0) / 2.0);
  }
  return MetricValue::of(s / static_cast<double>(g.num_nodes()));
}

inline MetricValue aspl(const PathStats& p) {
  if (p.reachable_pairs == 0) return MetricValue::undefined("no connected pairs");
  MetricValue v = MetricValue::of(static_cast<double>(p.distance_sum) / static_cast<double>(p.reachable_pairs));
  if (p.unreachable_pairs > 0) v.note = std::to_string(p.unreachable_pairs / 2) + " unreachable pairs";
  return v;
}

}  // namespace detail

using MetricSet = std::array<MetricValue, kAllMetrics.size()>;

/// All nine statistics, sharing the triangle and BFS passes.
inline MetricSet compute_metrics(const Graph& g, unsigned threads = 1) {
  if (g.empty()) throw Error("metrics need a non-empty graph");
  MetricSet out;
  const auto comps = connected_components(g);
  std::size_t lcc = 0;
  for (const auto& c : comps) lcc = std::max(lcc, c.size());
  const auto tri = triangles_per_node(g);
  std::uint64_t tsum = 0;
  for (auto t : tri) tsum += t;

  out[static_cast<std::size_t>(Metric::ad)] =
      MetricValue::of(static_cast<double>(g.degree_sum()) / static_cast<double>(g.num_nodes()));
  out[static_cast<std::size_t>(Metric::lcc)] = MetricValue::of(static_cast<double>(lcc));
  out[static_cast<std::size_t>(Metric::tc)] = MetricValue::of(static_cast<double>(tsum / 3));
  out[static_cast<std::size_t>(Metric::ple)] = detail::power_law_exponent(g);
  out[static_cast<std::size_t>(Metric::gini)] = detail::gini(g);
  out[static_cast<std::size_t>(Metric::ede)] = detail::edge_distribution_entropy(g);
  out[static_cast<std::size_t>(Metric::aspl)] = detail::aspl(path_stats(g, threads));
  out[static_cast<std::size_t>(Metric::ncc)] = MetricValue::of(static_cast<double>(comps.size()));
  out[static_cast<std::size_t>(Metric::cc)] = detail::clustering(g, tri);
  return out;
}

inline MetricValue compute_metric(Metric m, const Graph& g, unsigned threads = 1) {
  if (g.empty()) throw Error("metrics need a non-empty graph");
  switch (m) {
    case Metric::ple:
      return detail::power_law_exponent(g);
    case Metric::gini:
      return detail::gini(g);
    case Metric::ede:
      return detail::edge_distribution_entropy(g);
    case Metric::aspl:
      return detail::aspl(path_stats(g, threads));
    case Metric::tc:
      return MetricValue::of(static_cast<double>(triangle_count(g)));
    case Metric::cc:
      return detail::clustering(g, triangles_per_node(g));
    default:
      return compute_metrics(g, threads)[static_cast<std::size_t>(m)];
  }
}

/// |f(G) - f(G~)| / |f(G)|; undefined when either side is or f(G) = 0.
inline MetricValue discrepancy(const MetricValue& reference, const MetricValue& generated) {
  if (!reference.defined) return MetricValue::undefined("undefined on the original graph");
  if (!generated.defined) return MetricValue::undefined("undefined on the generated graph");
  if (reference.value == 0.0) return MetricValue::undefined("zero on the original graph");
  return MetricValue::of(std::abs((reference.value - generated.value) / reference.value));
}

inline MetricValue overall_discrepancy(const Graph& g, const Graph& generated, Metric m, unsigned threads = 1) {
  return discrepancy(compute_metric(m, g, threads), compute_metric(m, generated, threads));
}

inline MetricValue protected_discrepancy(const Graph& g, const Graph& generated, const GroupMembership& groups,
                                         Metric m, unsigned threads = 1) {
  const auto anchors = groups.protected_nodes();
  if (anchors.empty()) return MetricValue::undefined("protected group is empty");
  if (generated.num_nodes() != g.num_nodes()) throw Error("graphs must share a node universe");
  return discrepancy(compute_metric(m, ego_subgraph(g, anchors), threads),
                     compute_metric(m, ego_subgraph(generated, anchors), threads));
}

struct MetricRow {
  Metric metric = Metric::ad;
  MetricValue original, generated;                      // on the full graphs
  MetricValue original_protected, generated_protected;  // on protected ego networks
  MetricValue overall, protected_;                      // R and R+
};

struct MetricReport {
  std::size_t original_nodes = 0, original_edges = 0;
  std::size_t generated_nodes = 0, generated_edges = 0;
  std::size_t protected_count = 0;
  std::vector<MetricRow> rows;
};

/// Overall and protected discrepancies for every metric; protected rows need `groups`.
inline MetricReport evaluate(const Graph& g, const Graph& generated, const GroupMembership* groups,
                             unsigned threads = 1) {
  if (generated.num_nodes() != g.num_nodes()) throw Error("graphs must share a node universe");
  MetricReport r;
  r.original_nodes = g.num_nodes();
  r.original_edges = g.num_edges();
  r.generated_nodes = generated.num_nodes();
  r.generated_edges = generated.num_edges();
  const MetricSet a = compute_metrics(g, threads), b = compute_metrics(generated, threads);
  MetricSet ap, bp;
  const bool with_groups = groups && groups->protected_count() > 0;
  if (with_groups) {
    r.protected_count = groups->protected_count();
    const auto anchors = groups->protected_nodes();
    ap = compute_metrics(ego_subgraph(g, anchors), threads);
    bp = compute_metrics(ego_subgraph(generated, anchors), threads);
  }
  for (Metric m : kAllMetrics) {
    const auto i = static_cast<std::size_t>(m);
    MetricRow row;
    row.metric = m;
    row.original = a[i];
    row.generated = b[i];
    row.overall = discrepancy(a[i], b[i]);
    if (with_groups) {
      row.original_protected = ap[i];
      row.generated_protected = bp[i];
      row.protected_ = discrepancy(ap[i], bp[i]);
    } else {
      row.original_protected = row.generated_protected = row.protected_ =
          MetricValue::undefined("no protected group given");
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string join_notes(const MetricRow& row) {
  std::string out;
  auto add = [&](std::string_view tag, const MetricValue& v) {
    if (v.note.empty()) return;
    if (!out.empty()) out += "; ";
    out += std::string(tag) + ": " + v.note;
  };
  add("G", row.original);
  add("G~", row.generated);
  add("R", row.overall);
  add("G+", row.original_protected);
  add("G~+", row.generated_protected);
  add("R+", row.protected_);
  return out;
}

}  // namespace detail

/// One row per metric: name, f(G), f(G~), R, R+, flags.
inline void write_report_csv(std::ostream& out, const MetricReport& r) {
  out << "metric,original,generated,R,original_protected,generated_protected,R_protected,flags\n";
  for (const auto& row : r.rows) {
    std::string flags = detail::join_notes(row);
    std::replace(flags.begin(), flags.end(), ',', ';');
    out << metric_name(row.metric) << ',' << detail::format_number(row.original.value) << ','
        << detail::format_number(row.generated.value) << ',' << detail::format_number(row.overall.value) << ','
        << detail::format_number(row.original_protected.value) << ','
        << detail::format_number(row.generated_protected.value) << ','
        << detail::format_number(row.protected_.value) << ',' << flags << '\n';
  }
}

inline const MetricRow& report_row(const MetricReport& r, Metric m) {
  for (const auto& row : r.rows)
    if (row.metric == m) return row;
  throw Error("metric missing from report");
}

}  // namespace fairgen
