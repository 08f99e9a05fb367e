#include <doctest.h>

#include <random>

#include "dt/graph.hpp"
#include "oracles.hpp"

using dt::graph::Graph;

namespace {

Graph make(std::size_t n, const std::vector<oracle::WEdge>& edges) {
  Graph g(n);
  for (const auto& e : edges) g.add_edge(e.u, e.v, e.w);
  return g;
}

std::vector<oracle::WEdge> two_triangles(bool bridge) {
  std::vector<oracle::WEdge> e{{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {3, 4, 1}, {3, 5, 1}, {4, 5, 1}};
  if (bridge) e.push_back({2, 3, 1});
  std::sort(e.begin(), e.end(), [](auto& a, auto& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
  return e;
}

std::vector<oracle::WEdge> random_graph(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution keep(0.2 + 0.6 * std::uniform_real_distribution<double>(0, 1)(rng));
  std::uniform_int_distribution<int> w(1, 3);
  std::vector<oracle::WEdge> e;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (keep(rng)) e.push_back({u, v, static_cast<double>(w(rng))});
  return e;
}

}  // namespace

TEST_CASE("graph storage") {
  Graph g(3);
  g.add_edge(2, 0, 1.5);
  g.add_edge(0, 2, 0.5);
  g.add_edge(1, 1, 9);
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0] == Graph::Edge{0, 2, 2.0});
  CHECK_THROWS(g.add_edge(0, 3));
  g.remove_edge(0);
  CHECK(g.edges().empty());
}

TEST_CASE("edge betweenness") {
  auto path = dt::graph::edge_betweenness(make(3, {{0, 1, 1}, {1, 2, 1}}));
  CHECK(path == std::vector<double>{2, 2});
  auto k3 = dt::graph::edge_betweenness(make(3, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}}));
  CHECK(k3 == std::vector<double>{1, 1, 1});
  CHECK(dt::graph::edge_betweenness(make(2, {{0, 1, 1}})) == std::vector<double>{1});

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    auto e = random_graph(rng, n);
    auto got = dt::graph::edge_betweenness(make(n, e));
    auto want = oracle::betweenness_by_paths(n, e);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]));
  }
}

TEST_CASE("modularity") {
  CHECK(dt::graph::modularity(make(2, {{0, 1, 1}}), {0, 0}) == doctest::Approx(0.0));
  auto tri = two_triangles(false);
  CHECK(oracle::modularity_by_definition(6, tri, {0, 0, 0, 1, 1, 1}) == doctest::Approx(0.5));
  CHECK(dt::graph::modularity(make(6, tri), {0, 0, 0, 1, 1, 1}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(dt::graph::modularity(Graph(3), {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(dt::graph::modularity(make(2, {{0, 1, 1}}), {0}), std::invalid_argument);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    auto e = random_graph(rng, n);
    if (e.empty()) continue;
    std::vector<std::size_t> part(n);
    for (auto& c : part) c = rng() % 3;
    const double q = dt::graph::modularity(make(n, e), part);
    CHECK(q == doctest::Approx(oracle::modularity_by_definition(n, e, part)));
    CHECK(q <= oracle::best_partition_q(n, e) + 1e-12);
  }
}

TEST_CASE("connected components are numbered by lowest member") {
  auto p = dt::graph::connected_components(make(6, {{4, 5, 1}, {0, 3, 1}}));
  CHECK(p == dt::graph::Partition{0, 1, 2, 0, 3, 3});
}

TEST_CASE("Girvan-Newman on two triangles joined by a bridge") {
  auto e = two_triangles(true);
  auto bc = oracle::betweenness_by_paths(6, e);
  auto top = std::max_element(bc.begin(), bc.end()) - bc.begin();
  CHECK(e[static_cast<std::size_t>(top)].u == 2);
  CHECK(e[static_cast<std::size_t>(top)].v == 3);

  auto r = dt::graph::girvan_newman(make(6, e));
  REQUIRE_FALSE(r.removed.empty());
  CHECK(r.removed.front() == std::pair<std::size_t, std::size_t>{2, 3});
  CHECK(r.partition == dt::graph::Partition{0, 0, 0, 1, 1, 1});
  CHECK(r.best_iteration == 1);
  // Hand evaluation: m = 7, each side has 3 internal edges and degree sum 7.
  const double hand = 2 * (3.0 / 7 - (7.0 / 14) * (7.0 / 14));
  CHECK(hand == doctest::Approx(5.0 / 14));
  CHECK(r.modularity == doctest::Approx(hand).epsilon(1e-12));
  CHECK(std::abs(r.modularity - 0.357) < 1e-3);
  CHECK(oracle::best_partition_q(6, e) == doctest::Approx(r.modularity));
}

TEST_CASE("Girvan-Newman scores a disconnected input before removing anything") {
  auto r = dt::graph::girvan_newman(make(6, two_triangles(false)));
  CHECK(r.best_iteration == 0);
  CHECK(r.partition == dt::graph::Partition{0, 0, 0, 1, 1, 1});
  CHECK(r.modularity == doctest::Approx(0.5));
}

TEST_CASE("Girvan-Newman on a star") {
  std::vector<oracle::WEdge> star{{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {0, 4, 1}};
  auto r = dt::graph::girvan_newman(make(5, star));
  CHECK(r.modularity == doctest::Approx(oracle::girvan_newman_q(5, star)));
  CHECK(r.modularity == doctest::Approx(0.0));
}

TEST_CASE("Girvan-Newman matches the brute-force oracle on random graphs up to 8 nodes") {
  std::mt19937_64 rng(12);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    auto e = random_graph(rng, n);
    if (e.empty()) continue;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    const double want = oracle::girvan_newman_q(n, e, &order);
    auto r = dt::graph::girvan_newman(make(n, e));
    INFO("trial " << trial << " n=" << n << " m=" << e.size());
    CHECK(r.modularity == doctest::Approx(want).epsilon(1e-12));
    CHECK(r.removed == order);
    CHECK(r.modularity == doctest::Approx(dt::graph::modularity(make(n, e), r.partition)));
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("no removal sequence beats the tie-branching search") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 150; ++i) {
    const std::size_t n = 2 + rng() % 6;
    auto e = random_graph(rng, n);
    if (e.empty()) continue;
    const double got = dt::graph::girvan_newman(make(n, e)).modularity;
    CHECK(got <= oracle::gn_best_over_sequences(n, e) + 1e-12);
  }
}
