#include <benchmark/benchmark.h>

#include <vector>

#include "bench_models.hpp"
#include "cherryvine/evaluate.hpp"
#include "cherryvine/learn.hpp"

namespace {

void BM_VineLogDensity(benchmark::State& state) {
  const auto model = bench::mixed_d_vine(static_cast<int>(state.range(0)));
  const auto points = model.sample(1024, 1);
  Eigen::Index row = 0;
  for (auto _ : state) {
    const std::vector<double> u(points.row(row).begin(), points.row(row).end());
    benchmark::DoNotOptimize(model.log_density(u));
    row = (row + 1) % points.rows();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_VineLogDensity)->Arg(4)->Arg(8)->Arg(16);

void BM_CherryTreeLogDensity(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto model = cherryvine::truncate(bench::mixed_d_vine(d), 2);
  const auto cherry = cherryvine::to_cherry_tree_copula(model, 2);
  const auto points = model.sample(1024, 2);
  Eigen::Index row = 0;
  for (auto _ : state) {
    const std::vector<double> u(points.row(row).begin(), points.row(row).end());
    benchmark::DoNotOptimize(cherry.log_density(u));
    row = (row + 1) % points.rows();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CherryTreeLogDensity)->Arg(4)->Arg(8)->Arg(16);

void BM_LogLikelihood(benchmark::State& state) {
  const auto model = bench::mixed_d_vine(6);
  const auto po = cherryvine::as_pseudo_observations(model.sample(static_cast<std::size_t>(state.range(0)), 3));
  for (auto _ : state) benchmark::DoNotOptimize(cherryvine::log_likelihood(model, po));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihood)->Arg(1000)->Arg(10000);

void BM_HFunction(benchmark::State& state) {
  const auto family = static_cast<cherryvine::Family>(state.range(0));
  const auto c = cherryvine::tau_to_param(family, 0.5);
  double u = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(c.h(u, 0.7));
    u = u > 0.9 ? 0.1 : u + 0.013;
  }
  state.SetLabel(c.to_string());
}
BENCHMARK(BM_HFunction)
    ->Arg(static_cast<int>(cherryvine::Family::Gaussian))
    ->Arg(static_cast<int>(cherryvine::Family::Clayton))
    ->Arg(static_cast<int>(cherryvine::Family::Gumbel))
    ->Arg(static_cast<int>(cherryvine::Family::Frank));

}  // namespace

BENCHMARK_MAIN();
