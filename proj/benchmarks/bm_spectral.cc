#include <benchmark/benchmark.h>

#include "bench_inputs.h"
#include "covgeom/bures.h"
#include "covgeom/geometry.h"

namespace covgeom {
namespace {

void BM_SymEigen(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Covariance s = bench::RandomSpd(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(s.sym()));
}
BENCHMARK(BM_SymEigen)->RangeMultiplier(2)->Range(4, 64);

void BM_SqrtPsd(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Covariance s = bench::RandomSpd(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sqrt_psd(s));
}
BENCHMARK(BM_SqrtPsd)->RangeMultiplier(2)->Range(4, 64);

void BM_ProcrustesDistance(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const Covariance a = bench::RandomSpd(rng, state.range(0));
  const Covariance b = bench::RandomSpd(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(procrustes_distance(a, b));
}
BENCHMARK(BM_ProcrustesDistance)->RangeMultiplier(2)->Range(4, 64);

void BM_AlignmentDistance(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const Covariance a = bench::RandomSpd(rng, state.range(0));
  const Covariance b = bench::RandomSpd(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(procrustes_distance_via_alignment(a, b));
}
BENCHMARK(BM_AlignmentDistance)->RangeMultiplier(2)->Range(4, 64);

void BM_OptimalMap(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const Covariance a = bench::RandomSpd(rng, state.range(0));
  const Covariance b = bench::RandomSpd(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(optimal_map(a, b));
}
BENCHMARK(BM_OptimalMap)->RangeMultiplier(2)->Range(4, 64);

void BM_Geodesic(benchmark::State& state) {
  std::mt19937_64 rng(6);
  const Covariance a = bench::RandomSpd(rng, state.range(0));
  const Covariance b = bench::RandomSpd(rng, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geodesic(a, b, 0.3));
}
BENCHMARK(BM_Geodesic)->RangeMultiplier(2)->Range(4, 64);

}  // namespace
}  // namespace covgeom

BENCHMARK_MAIN();
