#include <benchmark/benchmark.h>

#include "bench_models.hpp"

namespace {

void BM_Sample(benchmark::State& state) {
  const auto model = bench::mixed_d_vine(static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(model.sample(1000, ++seed));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Sample)->Arg(4)->Arg(8)->Arg(16);

}  // namespace
