#include <benchmark/benchmark.h>

#include "fraglab/equilibrium.hpp"
#include "fraglab/montecarlo.hpp"
#include "fraglab/reliability.hpp"

using namespace fraglab;

static void BM_Rho(benchmark::State& state) {
  const Technology t{5, 3};
  for (auto _ : state) benchmark::DoNotOptimize(rho(t, 0.8));
}
BENCHMARK(BM_Rho);

static void BM_CriticalPoint(benchmark::State& state) {
  const Technology t{static_cast<int>(state.range(0)), 4};
  for (auto _ : state) benchmark::DoNotOptimize(critical_point(t));
}
BENCHMARK(BM_CriticalPoint)->Arg(2)->Arg(5)->Arg(20);

static void BM_EntryEquilibrium(benchmark::State& state) {
  MarketPrimitives p;
  p.tech = {2, 5};
  p.cost = CostModel::power(2.0, 2.0);
  p.profit = GrossProfitModel::linear(1.5);
  p.entry = {2.0, 1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(entry_equilibrium(p));
}
BENCHMARK(BM_EntryEquilibrium)->Unit(benchmark::kMillisecond);

static void BM_TreeSampler(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_tree_reliability({5, 4}, 0.66, static_cast<int>(state.range(0)), 1000, 1));
}
BENCHMARK(BM_TreeSampler)->Arg(3)->Arg(7)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
