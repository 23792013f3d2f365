#include <doctest.h>

#include <random>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "forage/routing.hpp"

using namespace forage;

namespace {

RoadGraph line_graph() {
  // 1 -> 2 -> 3 two-way, plus a one-way shortcut 3 -> 1.
  std::vector<RoadNode> nodes = {{1, fixture::kOrigin},
                                 {2, fixture::offset(fixture::kOrigin, 1000, 0)},
                                 {3, fixture::offset(fixture::kOrigin, 2000, 0)},
                                 {4, fixture::offset(fixture::kOrigin, 50000, 0)}};
  std::vector<RoadEdge> edges = {{1, 2, 1000, false}, {2, 3, 1000, false}, {3, 1, 500, true}};
  return RoadGraph(nodes, edges);
}

}  // namespace

TEST_SUITE("routing") {
  TEST_CASE("one way arcs are respected") {
    auto g = line_graph();
    const auto i1 = *g.index_of(1), i3 = *g.index_of(3), i4 = *g.index_of(4);
    std::vector<std::uint32_t> targets = {i3, i1, i4};
    auto d = one_to_many(i1, targets, g);
    CHECK(d[0] == 2000.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == kUnreachable);
    d = one_to_many(i3, std::vector{i1}, g);
    CHECK(d[0] == 500.0);
  }

  TEST_CASE("snapping respects the limit and ties") {
    auto g = line_graph();
    auto s = snap(fixture::offset(fixture::kOrigin, 990, 30), g);
    REQUIRE(s);
    CHECK(g.node(s->node).id == 2);
    CHECK(s->leg_m == doctest::Approx(31.6).epsilon(0.01));
    CHECK_FALSE(snap(fixture::offset(fixture::kOrigin, 20000, 0), g, 500.0));
    // Exactly halfway between nodes 1 and 2: smallest id.
    auto mid = snap(fixture::offset(fixture::kOrigin, 500, 0), g, 600.0);
    REQUIRE(mid);
    CHECK(g.node(mid->node).id == 1);
  }

  TEST_CASE("network distance adds both access legs") {
    auto g = line_graph();
    const LatLon home = fixture::offset(fixture::kOrigin, 0, 40);
    const LatLon shop = fixture::offset(fixture::kOrigin, 2000, -30);
    auto d = network_distance(home, shop, g);
    REQUIRE(d);
    CHECK(*d == doctest::Approx(2070.0).epsilon(1e-4));
    CHECK_FALSE(network_distance(home, fixture::offset(fixture::kOrigin, 50000, 0), g));
    CHECK_FALSE(network_distance(home, fixture::offset(fixture::kOrigin, 30000, 0), g));
  }

  TEST_CASE("graph construction errors carry the edge index") {
    std::vector<RoadNode> nodes = {{1, fixture::kOrigin}, {2, fixture::kOrigin}};
    try {
      RoadGraph(nodes, std::vector<RoadEdge>{{1, 2, 5, false}, {1, 3, 5, false}});
      FAIL("expected a throw");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()) == "edges.csv edge 2: unknown node 3");
    }
    CHECK_THROWS_AS(RoadGraph({{1, fixture::kOrigin}, {1, fixture::kOrigin}}, {}), InputError);
  }

  TEST_CASE("dijkstra equals bellman-ford on random graphs") {
    std::mt19937_64 rng(5);
    DijkstraWorkspace ws;
    for (int round = 0; round < 25; ++round) {
      const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 120)(rng);
      auto rg = fixture::random_graph(rng, n);
      RoadGraph g(rg.nodes, rg.edges);
      auto arcs = oracle::arcs_of(g);
      std::vector<std::uint32_t> all(n);
      for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
      for (std::uint32_t src = 0; src < n; src += 7) {
        auto expect = oracle::bellman_ford(n, arcs, src);
        std::vector<double> got;
        ws.run(g, src, all, got);
        CHECK(got == expect);
      }
    }
  }
}
