#include <benchmark/benchmark.h>

#include <random>

#include "dt/graph.hpp"

namespace {

dt::graph::Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(p);
  dt::graph::Graph g(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (keep(rng)) g.add_edge(u, v, 1.0 + static_cast<double>(rng() % 5));
  return g;
}

void BM_Betweenness(benchmark::State& state) {
  auto g = random_graph(static_cast<std::size_t>(state.range(0)), 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dt::graph::edge_betweenness(g));
  state.counters["edges"] = static_cast<double>(g.edges().size());
}
BENCHMARK(BM_Betweenness)->RangeMultiplier(2)->Range(16, 256);

void BM_GirvanNewman(benchmark::State& state) {
  auto g = random_graph(static_cast<std::size_t>(state.range(0)), 4.0 / static_cast<double>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(dt::graph::girvan_newman(g));
  state.counters["edges"] = static_cast<double>(g.edges().size());
}
BENCHMARK(BM_GirvanNewman)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
