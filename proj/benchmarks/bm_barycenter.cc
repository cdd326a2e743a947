#include <benchmark/benchmark.h>

#include "bench_inputs.h"
#include "covgeom/barycenter.h"
#include "covgeom/tpca.h"

namespace covgeom {
namespace {

// Arguments: family size, dimension.
void BM_MeanFixedPoint(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const auto fam = bench::RandomFamily(rng, state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mean_fixed_point(fam));
}
BENCHMARK(BM_MeanFixedPoint)->Args({5, 4})->Args({10, 8})->Args({10, 16})->Args({20, 32});

void BM_MeanProcrustesAveraging(benchmark::State& state) {
  std::mt19937_64 rng(11);
  const auto fam = bench::RandomFamily(rng, state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mean_procrustes_averaging(fam));
}
BENCHMARK(BM_MeanProcrustesAveraging)->Args({5, 4})->Args({10, 8})->Args({10, 16})->Args({20, 32});

void BM_FixedPointResidual(benchmark::State& state) {
  std::mt19937_64 rng(12);
  const auto fam = bench::RandomFamily(rng, state.range(0), state.range(1));
  const Covariance mean = mean_fixed_point(fam).mean;
  for (auto _ : state) benchmark::DoNotOptimize(fixed_point_residual(mean, fam));
}
BENCHMARK(BM_FixedPointResidual)->Args({10, 8})->Args({10, 16});

void BM_TangentPca(benchmark::State& state) {
  std::mt19937_64 rng(13);
  const auto fam = bench::RandomFamily(rng, state.range(0), state.range(1));
  const Covariance mean = mean_fixed_point(fam).mean;
  const auto lifts = lift(fam, mean);
  for (auto _ : state) benchmark::DoNotOptimize(tangent_pca(lifts, mean, 3));
}
BENCHMARK(BM_TangentPca)->Args({10, 8})->Args({20, 16});

}  // namespace
}  // namespace covgeom

BENCHMARK_MAIN();
