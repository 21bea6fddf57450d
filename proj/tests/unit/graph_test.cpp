#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "polarsim/graph.hpp"

using namespace polarsim;

namespace {

LoadedGraph parse(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

std::string data_file(const std::string& name) { return std::string(POLARSIM_DATA_DIR) + "/" + name; }

}  // namespace

TEST(EdgeList, TwoLines) {
  auto g = parse("0 1\n1 2\n");
  EXPECT_EQ(g.graph.node_count(), 3u);
  EXPECT_EQ(g.graph.edge_count(), 2u);
  EXPECT_EQ(g.dropped(), 0u);
}

TEST(EdgeList, DropsSelfLoopsAndDuplicates) {
  auto g = parse("0 0\n0 1\n0 1\n");
  EXPECT_EQ(g.graph.node_count(), 2u);
  EXPECT_EQ(g.graph.edge_count(), 1u);
  EXPECT_EQ(g.dropped_self_loops, 1u);
  EXPECT_EQ(g.dropped_duplicates, 1u);
  EXPECT_EQ(g.dropped(), 2u);
}

TEST(EdgeList, ReversedPairIsDuplicate) {
  auto g = parse("3 7\n7 3\n");
  EXPECT_EQ(g.graph.edge_count(), 1u);
  EXPECT_EQ(g.dropped_duplicates, 1u);
}

TEST(EdgeList, FirstAppearanceRemap) {
  auto g = parse("# header\n\n10 5\n5 42\n");
  ASSERT_EQ(g.original_ids.size(), 3u);
  EXPECT_EQ(g.original_ids[0], 10u);
  EXPECT_EQ(g.original_ids[1], 5u);
  EXPECT_EQ(g.original_ids[2], 42u);
  EXPECT_EQ(g.dense_id(42), 2u);
  EXPECT_TRUE(g.graph.has_edge(0, 1));
  EXPECT_TRUE(g.graph.has_edge(1, 2));
  EXPECT_THROW(g.dense_id(6), std::out_of_range);
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  for (const char* text : {"0 1\n1 x\n", "0 1\n1\n", "0 1\n1 2 3\n", "0 1\n-1 2\n", "0 1\n1.5 2\n"}) {
    try {
      parse(text);
      FAIL() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u) << text;
    }
  }
}

TEST(EdgeList, EmptyInputIsAnError) {
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("# only a comment\n\n"), ParseError);
}

TEST(EdgeList, BundledKarate) {
  auto g = load_edge_list_file(data_file("karate.txt"));
  // Count the data lines of the bundled file independently of the parser.
  std::ifstream in(data_file("karate.txt"));
  std::string line;
  std::size_t lines = 0;
  std::set<std::string> tokens;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    ++lines;
    std::istringstream ls(line);
    std::string a, b;
    ls >> a >> b;
    tokens.insert(a);
    tokens.insert(b);
  }
  EXPECT_EQ(lines, 78u);
  EXPECT_EQ(tokens.size(), 34u);
  EXPECT_EQ(g.graph.node_count(), 34u);
  EXPECT_EQ(g.graph.edge_count(), 78u);
  EXPECT_EQ(g.dropped(), 0u);
}

TEST(EdgeList, RoundTripPreservesEdgeSet) {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    Graph g = oracle::gnp(30, 0.15, seed);
    std::ostringstream out;
    write_edge_list(out, g);
    if (g.edge_count() == 0) continue;
    auto back = parse(out.str());
    std::set<std::pair<std::uint64_t, std::uint64_t>> a, b;
    for (EdgeId e : g.edges()) a.insert({e.lo, e.hi});
    for (EdgeId e : back.graph.edges()) {
      auto x = back.original_ids[e.lo], y = back.original_ids[e.hi];
      b.insert({std::min(x, y), std::max(x, y)});
    }
    EXPECT_EQ(a, b);
  }
}

TEST(Graph, RejectsInvalidEdges) {
  EXPECT_THROW(EdgeId::of(2, 2), std::invalid_argument);
  EXPECT_THROW(Graph::from_edges(3, {EdgeId::of(0, 1), EdgeId::of(1, 0)}), std::invalid_argument);
  EXPECT_THROW(Graph::from_edges(3, {EdgeId::of(0, 3)}), std::invalid_argument);
  EXPECT_THROW(Graph::from_edges(3, {}, {0, 1}), std::invalid_argument);
}

TEST(Graph, DegreeSumAndAdjacencyConsistency) {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    Graph g = oracle::gnp(40, 0.1, seed);
    std::size_t total = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) total += g.degree(v);
    EXPECT_EQ(total, 2 * g.edge_count());
    std::size_t appearances = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      for (NodeId w : g.neighbors(v)) {
        EXPECT_NE(v, w);
        EXPECT_TRUE(g.has_edge(v, w));
        ++appearances;
      }
    }
    EXPECT_EQ(appearances, 2 * g.edge_count());
    for (EdgeId e : g.edges()) {
      EXPECT_LT(e.lo, e.hi);
      EXPECT_EQ(g.edges()[g.edge_index(e)], e);
    }
  }
}

TEST(Components, Path) {
  auto c = connected_components(oracle::path_graph(3));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (std::vector<NodeId>{0, 1, 2}));
}

TEST(Components, TwoPieces) {
  Graph g = Graph::from_edges(4, {EdgeId::of(0, 1), EdgeId::of(2, 3)});
  auto c = connected_components(g);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(c[1], (std::vector<NodeId>{2, 3}));
}

TEST(Components, IsAPartition) {
  for (std::uint32_t seed = 1; seed <= 30; ++seed) {
    Graph g = oracle::gnp(50, 0.03, seed);
    auto comps = connected_components(g);
    std::vector<int> owner(g.node_count(), -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
      for (NodeId v : comps[c]) {
        EXPECT_EQ(owner[v], -1);
        owner[v] = static_cast<int>(c);
      }
    }
    for (int o : owner) EXPECT_GE(o, 0);
    for (EdgeId e : g.edges()) EXPECT_EQ(owner[e.lo], owner[e.hi]);
  }
}

TEST(RemoveEdges, TriangleMinusOneEdgeIsPath) {
  Graph t = oracle::complete_graph(3);
  Graph p = remove_edges(t, {EdgeId::of(0, 2)});
  EXPECT_EQ(p.node_count(), 3u);
  EXPECT_EQ(p.edge_count(), 2u);
  EXPECT_TRUE(p.has_edge(0, 1));
  EXPECT_TRUE(p.has_edge(1, 2));
  EXPECT_FALSE(p.has_edge(0, 2));
}

TEST(RemoveEdges, AllEdges) {
  Graph g = oracle::complete_graph(5);
  std::set<EdgeId> all(g.edges().begin(), g.edges().end());
  Graph e = remove_edges(g, all);
  EXPECT_EQ(e.node_count(), 5u);
  EXPECT_EQ(e.edge_count(), 0u);
  EXPECT_EQ(connected_components(e).size(), 5u);
}

TEST(RemoveEdges, MissingVictim) {
  EXPECT_THROW(remove_edges(oracle::path_graph(3), {EdgeId::of(0, 2)}), std::invalid_argument);
}
