#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "fairgen/baselines.hpp"
#include "fairgen/graph.hpp"
#include "fairgen/graph_io.hpp"
#include "support/graphs.hpp"

using namespace fairgen;

namespace {

Graph parse(const std::string& text, EdgeListOptions opts = {}) {
  std::istringstream in(text);
  return read_edge_list(in, opts);
}

}  // namespace

TEST(EdgeList, TriangleLoads) {
  const Graph g = parse("0 1\n1 2\n0 2\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 3u);
}

TEST(EdgeList, DuplicatesAndSelfLoopsDropped) {
  const Graph g = parse("0 1\n1 0\n0 0\n");
  EXPECT_EQ(g.num_nodes(), 2u);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(EdgeList, CommentsAndBlankLinesSkipped) {
  const Graph g = parse("# header\n\n a b \n\t# indented comment\nb c\n");
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.external_id(0), "a");
  EXPECT_EQ(g.external_id(2), "c");
}

TEST(EdgeList, DenseIdsFollowFirstAppearance) {
  const Graph g = parse("x y\nz x\n");
  EXPECT_EQ(*g.find("x"), 0u);
  EXPECT_EQ(*g.find("y"), 1u);
  EXPECT_EQ(*g.find("z"), 2u);
  EXPECT_FALSE(g.find("w"));
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    parse("0 1\n1 2 3\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(EdgeList, EmptyFileRejected) {
  EXPECT_THROW(parse("# nothing\n"), Error);
}

TEST(EdgeList, SelfLoopOnlyNodeIsIsolated) {
  EXPECT_THROW(parse("0 1\n2 2\n"), Error);
  const Graph g = parse("0 1\n2 2\n", {.allow_isolated = true});
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.isolated_nodes(), std::vector<NodeId>{2});
}

TEST(EdgeList, RoundTripKeepsExternalIds) {
  const Graph g = parse("alice bob\nbob carol\n");
  std::ostringstream out;
  write_edge_list(out, g);
  const Graph h = parse(out.str());
  EXPECT_EQ(g, h);
  EXPECT_EQ(h.external_ids(), g.external_ids());
}

TEST(Graph, AdjacencyIsSymmetricAndSorted) {
  const Graph g = er_generate(60, 300, 4);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto nb = g.neighbors(u);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    for (NodeId v : nb) {
      EXPECT_NE(u, v);
      EXPECT_TRUE(g.has_edge(v, u));
    }
  }
}

TEST(Graph, OutOfRangeEdgeRejected) {
  EXPECT_THROW(Graph::from_edges(2, {{0, 2}}), Error);
}

TEST(Graph, DuplicateExternalIdRejected) {
  EXPECT_THROW(Graph::from_edges(2, {{0, 1}}, {"a", "a"}), Error);
}

TEST(Labels, ParsesAndValidates) {
  const Graph g = parse("a b\nb c\n");
  std::istringstream in("a\t0\nc\t1\n");
  const LabelSet labels = read_labels(in, g);
  EXPECT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels.num_classes(), 2);
  EXPECT_EQ(labels.get(*g.find("c")), 1);
  EXPECT_FALSE(labels.has(*g.find("b")));
  EXPECT_TRUE(labels.covers_all_classes());
}

TEST(Labels, UnknownNodeAndBadClassRejected) {
  const Graph g = parse("a b\n");
  std::istringstream unknown("z\t0\n");
  EXPECT_THROW(read_labels(unknown, g), ParseError);
  std::istringstream bad("a\tx\n");
  EXPECT_THROW(read_labels(bad, g), ParseError);
  std::istringstream conflict("a\t0\na\t1\n");
  EXPECT_THROW(read_labels(conflict, g), ParseError);
}

TEST(Labels, ClassOutsideRangeRejected) {
  LabelSet labels(3, 2);
  EXPECT_THROW(labels.set(0, 2), Error);
  EXPECT_THROW(labels.set(5, 0), Error);
}

TEST(Groups, ComplementIsExact) {
  const std::vector<NodeId> prot{1, 3};
  GroupMembership groups(5, prot);
  EXPECT_EQ(groups.protected_count(), 2u);
  EXPECT_EQ(groups.unprotected_nodes(), (std::vector<NodeId>{0, 2, 4}));
  const std::vector<NodeId> outside{7};
  EXPECT_THROW(GroupMembership(5, outside), Error);
}

TEST(Transition, K2IsAllHalves) {
  const auto m = TransitionMatrix::build(fixtures::clique(2));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(m.entry(i, j), 0.5);
}

TEST(Transition, PathMiddleColumn) {
  const auto m = TransitionMatrix::build(fixtures::path(3));
  EXPECT_DOUBLE_EQ(m.entry(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(m.entry(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.entry(2, 1), 0.25);
}

TEST(Transition, ColumnsStochasticAndLazy) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = ba_generate(80, 3, seed);
    const auto m = TransitionMatrix::build(g);
    for (std::size_t j = 0; j < g.num_nodes(); ++j) {
      EXPECT_NEAR(m.column_sum(j), 1.0, 1e-12);
      EXPECT_GE(m.entry(j, j), 0.5);
    }
  }
}

TEST(Transition, IsolatedNodeNamedInError) {
  const Graph g = Graph::from_edges(3, {{0, 1}}, {"a", "b", "lonely"});
  try {
    (void)TransitionMatrix::build(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("lonely"), std::string::npos);
  }
  const auto m = TransitionMatrix::build(g, true);
  EXPECT_DOUBLE_EQ(m.entry(2, 2), 1.0);
}

TEST(Conductance, HandExamples) {
  const Graph k2 = fixtures::clique(2);
  const std::vector<NodeId> zero{0};
  EXPECT_DOUBLE_EQ(conductance(k2, zero), 1.0);
  const std::vector<NodeId> tri{0, 1, 2};
  EXPECT_DOUBLE_EQ(conductance(fixtures::bridged_triangles(), tri), 1.0 / 7.0);
  const Graph twins = fixtures::twin_cliques(4);
  const std::vector<NodeId> comp{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(conductance(twins, comp), 0.0);
}

TEST(Conductance, EmptyAndFullSetsRejected) {
  const Graph g = fixtures::path(3);
  EXPECT_THROW(conductance(g, std::vector<NodeId>{}), Error);
  EXPECT_THROW(conductance(g, std::vector<NodeId>{0, 1, 2}), Error);
}

TEST(Conductance, ComplementSymmetric) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = er_generate(30, 80, static_cast<std::uint64_t>(trial));
    NodeMask s(30, 0), rest(30, 0);
    for (NodeId u = 0; u < 30; ++u) (rng() % 2 ? s : rest)[u] = 1;
    if (std::count(s.begin(), s.end(), 1) == 0 || std::count(rest.begin(), rest.end(), 1) == 0) continue;
    if (volume(g, s) == 0 || volume(g, rest) == 0) continue;
    EXPECT_DOUBLE_EQ(conductance(g, s), conductance(g, rest));
  }
}

TEST(Ego, HandExamples) {
  const Graph star = fixtures::star(4);
  const std::vector<NodeId> center{0};
  EXPECT_EQ(ego_subgraph(star, center).num_edges(), 4u);
  const std::vector<NodeId> leaf{0};
  const Graph ego = ego_subgraph(fixtures::path(4), leaf);
  EXPECT_EQ(ego.num_nodes(), 2u);
  EXPECT_EQ(ego.num_edges(), 1u);
  const Graph g = er_generate(25, 60, 9);
  std::vector<NodeId> all(25);
  std::iota(all.begin(), all.end(), NodeId{0});
  EXPECT_EQ(ego_subgraph(g, all), g);
  EXPECT_THROW(ego_subgraph(g, std::vector<NodeId>{}), Error);
}

TEST(Ego, MonotoneInAnchors) {
  const Graph g = er_generate(40, 70, 2);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<NodeId> small, big;
    for (NodeId u = 0; u < 40; ++u) {
      const auto r = rng() % 4;
      if (r == 0) small.push_back(u);
      if (r <= 1) big.push_back(u);
    }
    if (small.empty()) continue;
    const Graph a = ego_subgraph(g, small), b = ego_subgraph(g, big);
    const std::set<std::string> na(a.external_ids().begin(), a.external_ids().end());
    const std::set<std::string> nb(b.external_ids().begin(), b.external_ids().end());
    EXPECT_TRUE(std::includes(nb.begin(), nb.end(), na.begin(), na.end()));
  }
}

TEST(Components, Counts) {
  EXPECT_EQ(connected_components(fixtures::clique(3)).size(), 1u);
  EXPECT_EQ(connected_components(Graph::from_edges(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}})).size(), 2u);
  EXPECT_EQ(connected_components(Graph::from_edges(4, {})).size(), 4u);
}

TEST(Components, Partition) {
  const Graph g = er_generate(50, 40, 5);
  const auto comps = connected_components(g);
  std::vector<int> owner(50, -1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (NodeId u : comps[c]) {
      EXPECT_EQ(owner[u], -1);
      owner[u] = static_cast<int>(c);
    }
  for (int o : owner) EXPECT_GE(o, 0);
  for (auto [u, v] : g.edges()) EXPECT_EQ(owner[u], owner[v]);
}
