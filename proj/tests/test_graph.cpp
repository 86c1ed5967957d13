#include <random>
#include <sstream>

#include "doctest.h"
#include "latent/graph.hpp"
#include "oracles.hpp"

using namespace latent;

TEST_SUITE("graph") {

TEST_CASE("reciprocal pair") {
  const Graph g = parse_edge_list("a\tb\nb\ta\n", true);
  CHECK(g.n_nodes() == 2);
  CHECK(g.n_edges() == 2);
  CHECK(g.weight(0, 1) == 1);
  CHECK(g.weight(1, 0) == 1);
}

TEST_CASE("weighted line") {
  const Graph g = parse_edge_list("a\tb\t3\n", true);
  REQUIRE(g.n_edges() == 1);
  CHECK(g.edges()[0] == Edge{0, 1, 3});
  CHECK(g.weight(1, 0) == 0);
  CHECK(g.max_weight() == 3);
}

TEST_CASE("self-loop is rejected with its line number") {
  try {
    parse_edge_list("a\ta\n", true);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  try {
    parse_edge_list("# header\na\tb\n\nc\tc\n", true);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("malformed edge lists") {
  CHECK_THROWS_AS(parse_edge_list("a\tb\tx\n", true), ParseError);
  CHECK_THROWS_AS(parse_edge_list("a\tb\t-1\n", true), ParseError);
  CHECK_THROWS_AS(parse_edge_list("a\tb\t1\t2\n", true), ParseError);
  CHECK_THROWS_AS(parse_edge_list("a\t\n", true), ParseError);
  CHECK_THROWS_AS(parse_edge_list("a\tb\t1\na\tb\t2\n", true), ParseError);
}

TEST_CASE("comments, blank lines, CRLF and isolated nodes") {
  const Graph g = parse_edge_list("# c\r\n\r\na\tb\r\nz\r\na\tb\r\n", true);
  CHECK(g.n_nodes() == 3);
  CHECK(g.n_edges() == 1);
  CHECK(g.node_ids()[2] == "z");
}

TEST_CASE("undirected edges are stored once") {
  const Graph g = parse_edge_list("a\tb\nb\ta\n", false);
  CHECK(g.n_edges() == 1);
  CHECK(g.weight(1, 0) == 1);
  CHECK(degree(g, 0) == Degree{1, 1});
}

TEST_CASE("cumulative: one star") {
  const auto g = parse_cumulative("j\tt1\ti\nj\tt1\tk\n");
  REQUIRE(g.n_actions() == 1);
  CHECK(g.actions()[0].author == 0);
  CHECK(g.actions()[0].adopters == std::vector<NodeIndex>{1, 2});
  CHECK(g.actions_by(0) == 1);
}

TEST_CASE("cumulative: two actions") {
  const auto g = parse_cumulative("j\tt1\ti\nj\tt2\ti\n");
  CHECK(g.actions_by(g.node_ids().find("j")) == 2);
  for (const auto& a : g.actions()) CHECK(a.adopters == std::vector<NodeIndex>{1});
}

TEST_CASE("cumulative errors") {
  CHECK_THROWS_AS(parse_cumulative("j\tt1\tj\n"), ParseError);
  CHECK_THROWS_AS(parse_cumulative("j\tt1\ti\nj\tt1\ti\n"), ParseError);
  CHECK_THROWS_AS(parse_cumulative("j\tt1\ti\tx\n"), ParseError);
}

TEST_CASE("cumulative action without adopters") {
  const auto g = parse_cumulative("j\tt1\nj\tt2\ti\n");
  CHECK(g.n_actions() == 2);
  CHECK(g.actions()[0].adopters.empty());
}

TEST_CASE("degree") {
  const Graph single = parse_edge_list("a\tb\n", true);
  CHECK(degree(single, 0) == Degree{1, 0});
  CHECK(degree(single, 1) == Degree{0, 1});

  Graph empty(true);
  for (int i = 0; i < 3; ++i) empty.add_node(oracle::name(i));
  for (int i = 0; i < 3; ++i) CHECK(degree(empty, i) == Degree{0, 0});

  Graph complete(true);
  for (int i = 0; i < 4; ++i) complete.add_node(oracle::name(i));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) complete.add_edge(i, j);
  for (int i = 0; i < 4; ++i) CHECK(degree(complete, i) == Degree{3, 3});
}

TEST_CASE("degree sums equal the edge count") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(rng, 15, 0.3, true);
    std::size_t out = 0, in = 0;
    for (NodeIndex i = 0; i < g.n_nodes(); ++i) {
      out += degree(g, i).out_degree;
      in += degree(g, i).in_degree;
    }
    CHECK(out == g.n_edges());
    CHECK(in == g.n_edges());
  }
}

TEST_CASE("edge list round trip") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const bool directed = trial % 2 == 0;
    Graph g = oracle::random_graph(rng, 3 + trial % 9, 0.25, directed, 4);
    g.add_node("isolated");
    const Graph back = parse_edge_list(serialize_edge_list(g), directed);
    CHECK(back == g);
  }
}

TEST_CASE("cumulative round trip") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_cumulative(rng, 2 + trial % 7, 3, 0.4);
    CHECK(parse_cumulative(serialize_cumulative(g)) == g);
  }
}

TEST_CASE("level validation") {
  WeightedGraph wg{parse_edge_list("a\tb\t2\n", true), 3};
  CHECK_NOTHROW(validate_levels(wg));
  wg.levels = 2;
  CHECK_THROWS_AS(validate_levels(wg), std::invalid_argument);
}

}  // TEST_SUITE
