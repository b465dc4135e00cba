#include <benchmark/benchmark.h>

#include "bench_models.hpp"
#include "cherryvine/learn.hpp"

namespace {

void BM_FitTruncatedVine(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const auto po = cherryvine::pseudo_observations(bench::mixed_d_vine(d).sample(1000, 4));
  for (auto _ : state) benchmark::DoNotOptimize(cherryvine::fit_truncated_vine(po, k));
}
BENCHMARK(BM_FitTruncatedVine)->Args({5, 1})->Args({5, 2})->Args({8, 2})->Args({8, 3})->Unit(benchmark::kMillisecond);

void BM_EmpiricalTau(benchmark::State& state) {
  const auto po = cherryvine::pseudo_observations(
      bench::mixed_d_vine(2).sample(static_cast<std::size_t>(state.range(0)), 5));
  const auto x = po.column(0);
  const auto y = po.column(1);
  for (auto _ : state) benchmark::DoNotOptimize(cherryvine::kendall_tau(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EmpiricalTau)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

}  // namespace
