#include <benchmark/benchmark.h>

#include "dt/problems.hpp"
#include "dt/search.hpp"

namespace {

const char* kIds[] = {"2.4", "5.4", "7.3", "7.6"};

void BM_SearchProof(benchmark::State& state) {
  const auto& p = dt::ProblemBank::standard().at(kIds[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(dt::search_proof(p));
  state.SetLabel(p.id);
}
BENCHMARK(BM_SearchProof)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_SearchWholeBank(benchmark::State& state) {
  for (auto _ : state)
    for (const auto& p : dt::ProblemBank::standard().problems()) benchmark::DoNotOptimize(dt::search_proof(p));
}
BENCHMARK(BM_SearchWholeBank)->Unit(benchmark::kMillisecond);

void BM_Hint(benchmark::State& state) {
  auto s = dt::new_state(dt::ProblemBank::standard().at("7.3"));
  for (auto _ : state) benchmark::DoNotOptimize(dt::next_step_hint(s));
}
BENCHMARK(BM_Hint)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
