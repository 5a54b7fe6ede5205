// Serial reference vs OpenMP for each batch kernel.

#include <benchmark/benchmark.h>

#include "shardsim/analytics.hpp"
#include "shardsim/kernels.hpp"

using namespace shardsim;

static void BM_ForestSweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forest_sweep_serial(2000, 666, 2, 600));
}
static void BM_ForestSweepParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forest_sweep_parallel(2000, 666, 2, 600));
}
BENCHMARK(BM_ForestSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForestSweepParallel)->Unit(benchmark::kMillisecond);

static const std::vector<std::uint64_t>& worst_case_allocation() {
  static const auto alloc = analytics::optimal_adversary_allocation(249, 37, 50, 10);
  return alloc;
}

static void BM_TakeoverSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::takeover_trials_serial(10, 37, worst_case_allocation(), 100000, 1));
}
static void BM_TakeoverParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::takeover_trials_parallel(10, 37, worst_case_allocation(), 100000, 1));
}
BENCHMARK(BM_TakeoverSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TakeoverParallel)->Unit(benchmark::kMillisecond);

static std::vector<sim::ScenarioConfig> sweep_configs() {
  std::vector<sim::ScenarioConfig> out;
  for (std::uint64_t seed = 1; seed <= 16; ++seed) {
    sim::ScenarioConfig c;
    c.n = 500;
    c.adversary_fraction = 0.2;
    c.initial_shards = 10;
    c.max_shards = 10;
    c.iterations = 100;
    c.churn_prob = 0.02;
    c.tx_arrival_rate = 20000;
    c.seed = seed;
    out.push_back(c);
  }
  return out;
}

static void BM_SweepSerial(benchmark::State& state) {
  const auto cfgs = sweep_configs();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sweep_serial(cfgs));
}
static void BM_SweepParallel(benchmark::State& state) {
  const auto cfgs = sweep_configs();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sweep_parallel(cfgs));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
