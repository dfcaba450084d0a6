#include <benchmark/benchmark.h>

#include "kfar/experiments.hpp"
#include "kfar/ogd.hpp"
#include "kfar/rng.hpp"

using namespace kfar;

namespace {

RunOptions options_for(const benchmark::State& state) {
  return {state.range(0) ? Execution::parallel : Execution::serial, 0};
}

void BM_Compare(benchmark::State& state) {
  ExperimentConfig cfg = default_config(Experiment::compare);
  cfg.runs = 32;
  cfg.T = 300;
  const RunOptions opts = options_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(run_comparison(cfg, opts));
}
BENCHMARK(BM_Compare)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_NoiseSweep(benchmark::State& state) {
  const ExperimentConfig cfg = default_config(Experiment::noise_sweep);
  const RunOptions opts = options_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(noise_sweep(cfg, opts));
}
BENCHMARK(BM_NoiseSweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_DepthSweep(benchmark::State& state) {
  ExperimentConfig cfg = default_config(Experiment::depth_sweep);
  cfg.runs = 20;
  const RunOptions opts = options_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(depth_sweep(cfg, opts));
}
BENCHMARK(BM_DepthSweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_OgdStep(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<double> y;
  for (int t = 0; t < 4096; ++t) y.push_back(rng.normal());
  OgdState st = ogd_init(s, 1.0, 1.0);
  std::size_t t = s;
  for (auto _ : state) {
    st = ogd_step(st, y[t], std::span<const double>(y).first(t)).state;
    if (++t == y.size()) t = s;
  }
  state.SetComplexityN(s);
}
BENCHMARK(BM_OgdStep)->RangeMultiplier(2)->Range(1, 256)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
