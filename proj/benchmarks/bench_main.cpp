#include "fqg/algebra.hpp"
#include "fqg/harmonic.hpp"
#include "fqg/intertwiners.hpp"
#include "fqg/trace_rigidity.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace fqg;

static void BM_FusionBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    tl::Category cat(QGParams::identity(3), {.max_level = 2 * n});
    benchmark::DoNotOptimize(cat.fusion(2 * n - 2, n, n).data());
  }
}
BENCHMARK(BM_FusionBuild)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

static void BM_Convolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  tl::Category cat(QGParams::identity(3), {.max_level = 2 * n});
  std::mt19937_64 rng(1);
  const auto x = algebra::random_element(cat, {n}, rng);
  const auto y = algebra::random_element(cat, {n}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(algebra::convolve(cat, x, y).blocks.size());
}
BENCHMARK(BM_Convolve)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

static void BM_KrausApply(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  tl::Category cat(QGParams::identity(3), {.max_level = K});
  const trace::KrausPhi op(cat, 1, K, K);
  rvec v = rvec::Random(op.coordinate_dim());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply_coordinates(v).data());
}
BENCHMARK(BM_KrausApply)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_SchattenTrial(benchmark::State& state) {
  const Index d = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic::schatten_contraction_trial(d, d, d, 1.5, 1, 3));
}
BENCHMARK(BM_SchattenTrial)->DenseRange(2, 4);
BENCHMARK_MAIN();
