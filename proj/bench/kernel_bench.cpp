#include "mdlmd/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace mdlmd;

namespace {

RowMatrix random_rows(int n, int d, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  RowMatrix m(n, d);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  return m;
}

template <void (*Kernel)(const RowMatrix&, const RowMatrix&, Matrix&)>
void BM_PairwiseSqDist(benchmark::State& state) {
  const RowMatrix a = random_rows(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1);
  const RowMatrix b = random_rows(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 2);
  Matrix out;
  for (auto _ : state) {
    Kernel(a, b, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <void (*Kernel)(const Matrix&, double, double, Vector&)>
void BM_GaussianWeightedMean(benchmark::State& state) {
  const RowMatrix r = random_rows(static_cast<int>(state.range(0)), static_cast<int>(state.range(0)), 3);
  const Matrix q = r.array().square().matrix();
  Vector out;
  for (auto _ : state) {
    Kernel(q, 1.5, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_PairwiseSqDist, kernels::pairwise_sq_dist_serial)->Args({200, 10})->Args({2000, 50})->Args({200, 2000});
BENCHMARK_TEMPLATE(BM_PairwiseSqDist, kernels::pairwise_sq_dist)->Args({200, 10})->Args({2000, 50})->Args({200, 2000});
BENCHMARK_TEMPLATE(BM_GaussianWeightedMean, kernels::gaussian_weighted_mean_serial)->Arg(200)->Arg(2000);
BENCHMARK_TEMPLATE(BM_GaussianWeightedMean, kernels::gaussian_weighted_mean)->Arg(200)->Arg(2000);

int main(int argc, char** argv) {
  kernels::apply_thread_limit_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
