#include <benchmark/benchmark.h>

#include <vector>

#include "speiser/dimension.hpp"
#include "speiser/dynamics.hpp"
#include "speiser/elliptic.hpp"
#include "speiser/family.hpp"

using namespace speiser;

namespace {

void BM_Wp(benchmark::State& state) {
  complex z(0.3, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wp(z));
    z += complex(1e-3, -7e-4);
  }
}
BENCHMARK(BM_Wp);

void BM_WpWithDerivative(benchmark::State& state) {
  complex z(0.3, 0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wp_with_derivative(z));
    z += complex(1e-3, -7e-4);
  }
}
BENCHMARK(BM_WpWithDerivative);

void BM_FLambda(benchmark::State& state) {
  const MapFamily f = MapFamily::flambda(0.5, 47, 1, 0.25);
  complex z(0.4, 1.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(f, z));
    z += complex(-1e-3, 1e-3);
  }
}
BENCHMARK(BM_FLambda);

void BM_RenderFMax(benchmark::State& state) {
  GridSpec grid;
  grid.resolution = static_cast<int>(state.range(0));
  const MapFamily f = MapFamily::fmax();
  for (auto _ : state) benchmark::DoNotOptimize(render(grid, f, Attractor{}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_RenderFMax)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_SolveBowen(benchmark::State& state) {
  std::vector<double> b;
  for (int k = 1; k <= state.range(0); ++k) b.push_back(0.5 * std::pow(k, -1.25));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bowen(b));
}
BENCHMARK(BM_SolveBowen)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
