#include <benchmark/benchmark.h>

#include <random>

#include "blat/optimizer.hpp"

namespace {

using namespace blat;

void BM_MaxSharpe(benchmark::State& state) {
  const Index m = state.range(0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = z(rng);
  const Matrix cov = 1e-4 * (a * a.transpose() / static_cast<double>(m) + Matrix::Identity(m, m));
  Vector mean(m);
  for (Index i = 0; i < m; ++i) mean(i) = 1e-3 * z(rng);
  mean(0) = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(max_sharpe_longonly(mean, cov));
}
BENCHMARK(BM_MaxSharpe)->Arg(3)->Arg(11)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
