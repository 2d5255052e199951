#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairgen/error.hpp"
#include "fairgen/graph.hpp"

namespace fairgen {

struct EdgeListOptions {
  /// Keep nodes whose only lines were self-loops. Such nodes get an
  /// identity column in the transition matrix and are never walk starts.
  bool allow_isolated = false;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline bool skip_line(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return in;
}

inline const Graph& require_node(const Graph& g, const std::string& token, std::size_t line,
                                 NodeId& out) {
  auto id = g.find(token);
  if (!id) throw ParseError("unknown node '" + token + "'", line);
  out = *id;
  return g;
}

}  // namespace detail

/// Dense ids are assigned in order of first appearance.
inline Graph read_edge_list(std::istream& in, const EdgeListOptions& opts = {}) {
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> names;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& tok) {
    auto [it, inserted] = ids.emplace(tok, static_cast<NodeId>(names.size()));
    if (inserted) names.push_back(tok);
    return it->second;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skip_line(line)) continue;
    auto toks = detail::split_ws(line);
    if (toks.size() != 2) throw ParseError("expected two node tokens, got " + std::to_string(toks.size()), lineno);
    NodeId u = intern(toks[0]);
    NodeId v = intern(toks[1]);
    edges.emplace_back(u, v);
  }
  if (names.empty()) throw Error("edge list is empty");
  const std::size_t n = names.size();
  Graph g = Graph::from_edges(n, std::move(edges), std::move(names));
  if (!opts.allow_isolated) {
    auto iso = g.isolated_nodes();
    if (!iso.empty()) throw Error("node '" + g.external_id(iso.front()) + "' is isolated (only self-loops)");
  }
  return g;
}

inline Graph load_edge_list(const std::filesystem::path& path, const EdgeListOptions& opts = {}) {
  auto in = detail::open_input(path);
  return read_edge_list(in, opts);
}

/// "node<TAB>class" lines; the class count is max class + 1 unless given.
inline LabelSet read_labels(std::istream& in, const Graph& g, int num_classes = 0) {
  std::vector<std::pair<NodeId, int>> entries;
  std::unordered_map<NodeId, int> seen;
  std::string line;
  std::size_t lineno = 0;
  int max_class = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skip_line(line)) continue;
    auto toks = detail::split_ws(line);
    if (toks.size() != 2) throw ParseError("expected 'node<TAB>class'", lineno);
    NodeId u;
    detail::require_node(g, toks[0], lineno, u);
    int cls = 0;
    auto [ptr, ec] = std::from_chars(toks[1].data(), toks[1].data() + toks[1].size(), cls);
    if (ec != std::errc() || ptr != toks[1].data() + toks[1].size() || cls < 0) {
      throw ParseError("invalid class '" + toks[1] + "'", lineno);
    }
    auto [it, fresh] = seen.emplace(u, cls);
    if (!fresh && it->second != cls) throw ParseError("node '" + toks[0] + "' labeled twice", lineno);
    entries.emplace_back(u, cls);
    max_class = std::max(max_class, cls);
  }
  const int classes = num_classes > 0 ? num_classes : max_class + 1;
  if (classes < 1) throw Error("label file holds no labels");
  LabelSet labels(g.num_nodes(), classes);
  for (auto [u, c] : entries) labels.set(u, c);
  return labels;
}

inline LabelSet load_labels(const std::filesystem::path& path, const Graph& g, int num_classes = 0) {
  auto in = detail::open_input(path);
  return read_labels(in, g, num_classes);
}

/// One external node id per line.
inline std::vector<NodeId> read_node_set(std::istream& in, const Graph& g) {
  std::vector<NodeId> nodes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skip_line(line)) continue;
    auto toks = detail::split_ws(line);
    if (toks.size() != 1) throw ParseError("expected one node per line", lineno);
    NodeId u;
    detail::require_node(g, toks[0], lineno, u);
    nodes.push_back(u);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

inline std::vector<NodeId> load_node_set(const std::filesystem::path& path, const Graph& g) {
  auto in = detail::open_input(path);
  return read_node_set(in, g);
}

inline GroupMembership load_protected(const std::filesystem::path& path, const Graph& g) {
  auto nodes = load_node_set(path, g);
  return GroupMembership(g.num_nodes(), nodes);
}

/// Re-expresses `other` in the dense id space of `reference`, matching by
/// external id. Reference nodes absent from `other` become isolated.
inline Graph reindex_like(const Graph& reference, const Graph& other) {
  std::vector<NodeId> map(other.num_nodes());
  for (NodeId u = 0; u < other.num_nodes(); ++u) {
    auto id = reference.find(other.external_id(u));
    if (!id) throw Error("node '" + other.external_id(u) + "' does not exist in the reference graph");
    map[u] = *id;
  }
  std::vector<Edge> edges;
  edges.reserve(other.num_edges());
  for (auto [u, v] : other.edges()) edges.emplace_back(map[u], map[v]);
  return Graph::from_edges(reference.num_nodes(), std::move(edges), reference.external_ids());
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  for (auto [u, v] : g.edges()) out << g.external_id(u) << ' ' << g.external_id(v) << '\n';
}

inline void write_labels(std::ostream& out, const Graph& g, const LabelSet& labels) {
  for (NodeId u : labels.nodes()) out << g.external_id(u) << '\t' << *labels.get(u) << '\n';
}

inline void write_node_set(std::ostream& out, const Graph& g, std::span<const NodeId> nodes) {
  for (NodeId u : nodes) out << g.external_id(u) << '\n';
}

}  // namespace fairgen
