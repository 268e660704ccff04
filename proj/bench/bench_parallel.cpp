// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include "airslice/assoc.hpp"
#include "airslice/chain_oracle.hpp"
#include "airslice/experiments.hpp"
#include "airslice/rng.hpp"

namespace {

using namespace airslice;

Execution exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Execution::kSerial : Execution::kParallel; }

const ChainModel& big_chain() {
  static const ChainModel chain(EdcaParams{32, 6, 6, 6, 0.5, 100}, 119, 0.3);
  return chain;
}

void BM_Spmv(benchmark::State& state) {
  const ChainModel& chain = big_chain();
  std::vector<double> x(chain.size(), 1.0 / static_cast<double>(chain.size()));
  std::vector<double> y(chain.size());
  for (auto _ : state) {
    spmv(chain.matrix(), x, y, exec_of(state));
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["states"] = static_cast<double>(chain.size());
}
BENCHMARK(BM_Spmv)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_PowerIteration(benchmark::State& state) {
  const ChainModel chain(EdcaParams{8, 2, 2, 2, 0.5, 4}, 10, 0.3);
  PowerIterationOptions opts;
  opts.execution = exec_of(state);
  opts.tolerance = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(power_iterate(chain.matrix(), opts).pi.data());
}
BENCHMARK(BM_PowerIteration)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_GridSearch(benchmark::State& state) {
  const TimingConstants t = derive_timing(default_raw_timing());
  for (auto _ : state) benchmark::DoNotOptimize(grid_search_two_sta(6, 54, 0.45, 0.45, t, 400, 1e-4, exec_of(state)));
}
BENCHMARK(BM_GridSearch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Replications(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.experiment = "throughput-vs-load";
  cfg.replications = 4;
  cfg.scenario.lambda_mean = std::vector<double>{1};
  cfg.scenario.rho = std::vector<double>{0.5};
  const auto pts = sweep_points(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(run_replications(cfg, pts, exec_of(state)).size());
}
BENCHMARK(BM_Replications)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
