#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>

#include "brava/centrality.hpp"
#include "brava/error.hpp"
#include "brava/preprocess.hpp"
#include "../support.hpp"

using namespace brava;

TEST_CASE("leaves are removed") {
  const Graph g = build_graph(EdgeList{{{0, 1}, {1, 2}}, false});
  const auto pr = prune(g);
  CHECK(pr.kept == std::vector<NodeId>{1});
  CHECK(pr.reduced.num_nodes() == 1);
  CHECK(pr.reduced.num_arcs() == 0);
  REQUIRE(pr.removed.size() == 2);
  CHECK(pr.removed[0].reason == RemovalReason::leaf);
}

TEST_CASE("triangle is removed entirely") {
  const Graph g = build_graph(EdgeList{{{0, 1}, {1, 2}, {2, 0}}, false});
  const auto pr = prune(g);
  CHECK(pr.reduced.num_nodes() == 0);
  REQUIRE(pr.removed.size() == 3);
  for (const auto& r : pr.removed) CHECK(r.reason == RemovalReason::clique_neighborhood);
}

TEST_CASE("directed clique rule only looks at in -> out pairs") {
  // 0 -> 1 -> 2 and 0 -> 2: node 1's only 2-hop path 0->1->2 is shortcut.
  const Graph shortcut = build_graph(EdgeList{{{0, 1}, {1, 2}, {0, 2}}, true});
  const auto pr = prune(shortcut);
  CHECK(pr.kept.empty());
  // Without the shortcut node 1 mediates 0 -> 2.
  const Graph chain = build_graph(EdgeList{{{0, 1}, {1, 2}}, true});
  CHECK(prune(chain).kept == std::vector<NodeId>{1});
}

TEST_CASE("pruned nodes have zero betweenness") {
  Rng rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const bool directed = rep % 2 == 1;
    const Graph g = testing::random_graph(5 + rep % 25, 0.1 + 0.004 * rep, directed, rng);
    const auto bc = brute_force_betweenness(g);
    const auto pr = prune(g);
    CHECK(pr.kept.size() + pr.removed.size() == g.num_nodes());
    for (const auto& r : pr.removed) CHECK(bc[r.node] == 0.0);
    // reduced arcs are original arcs between survivors
    for (NodeId u = 0; u < pr.reduced.num_nodes(); ++u)
      for (NodeId v : pr.reduced.out_neighbors(u)) CHECK(g.has_arc(pr.kept[u], pr.kept[v]));
  }
}

TEST_CASE("reinsert scores") {
  SUBCASE("sentinel below the minimum") {
    const Graph g = build_graph(EdgeList{{{0, 1}, {1, 2}}, false});
    const auto pr = prune(g);
    const std::vector<double> reduced{0.4};
    const auto full = reinsert_scores(pr, reduced);
    CHECK(full[0] == doctest::Approx(-0.6));
    CHECK(full[1] == 0.4);
    CHECK(full[2] == full[0]);
  }
  SUBCASE("nothing removed") {
    const Graph g = build_graph(EdgeList{{{0, 1}, {1, 2}, {2, 3}, {3, 0}}, false});
    const auto pr = prune(g);
    REQUIRE(pr.removed.empty());
    const std::vector<double> s{1, 2, 3, 4};
    CHECK(reinsert_scores(pr, s) == s);
  }
  SUBCASE("everything removed") {
    const Graph g = build_graph(EdgeList{{{0, 1}, {1, 2}, {2, 0}}, false});
    CHECK(reinsert_scores(prune(g), {}) == std::vector<double>(3, 0.0));
  }
  SUBCASE("length mismatch") {
    const Graph g = build_graph(EdgeList{{{0, 1}, {1, 2}}, false});
    const std::vector<double> wrong{1, 2};
    CHECK_THROWS_AS(reinsert_scores(prune(g), wrong), ContractError);
  }
}

TEST_CASE("removal report") {
  const Graph g = build_graph(EdgeList{{{10, 11}, {11, 12}}, false});
  const auto path = std::filesystem::temp_directory_path() / "brava-removal.csv";
  save_removal_report(path, g, prune(g));
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "id,reason\n10,leaf\n12,leaf\n");
}
