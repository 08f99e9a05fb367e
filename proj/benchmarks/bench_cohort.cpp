#include <benchmark/benchmark.h>

#include "dt/approach_map.hpp"
#include "dt/network.hpp"
#include "dt/simcohort.hpp"

namespace {

void BM_SimulateAttempt(benchmark::State& state) {
  const auto& p = dt::ProblemBank::standard().at("7.3");
  const auto policy = dt::sim::default_policies()[2];
  std::size_t i = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(dt::sim::simulate(p, policy, "S" + std::to_string(i++), dt::Group::T2, 0));
}
BENCHMARK(BM_SimulateAttempt)->Unit(benchmark::kMillisecond);

void BM_Cohort(benchmark::State& state) {
  dt::sim::CohortConfig config;
  config.per_group = static_cast<std::size_t>(state.range(0));
  config.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(dt::sim::generate_cohort(config));
}
BENCHMARK(BM_Cohort)->Arg(2)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_MineProblem(benchmark::State& state) {
  dt::sim::CohortConfig config;
  config.per_group = 10;
  config.threads = 1;
  std::vector<dt::InteractionEvent> events;
  for (const auto& log : dt::sim::generate_cohort(config))
    for (const auto& e : log.events)
      if (e.problem == "2.4") events.push_back(e);
  const auto& spec = dt::ProblemBank::standard().at("2.4");
  for (auto _ : state) {
    auto net = dt::mining::build_network(events, spec);
    benchmark::DoNotOptimize(dt::mining::build_approach_map(net, dt::mining::cluster_network(net)));
  }
}
BENCHMARK(BM_MineProblem)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
