#include <benchmark/benchmark.h>

#include "blat/fiv.hpp"

namespace {

using namespace blat;

void BM_FivMixtureMc(benchmark::State& state) {
  const Index m = 3;
  MarketModel model{Matrix::Identity(m, m), Vector::Zero(m), 0.5 * Matrix::Identity(m, m), 0.5, 1.0};
  const FeatureSpec features({Vector::Ones(2), Vector::Ones(2), Vector::Ones(2)}, 0.1 * Matrix::Identity(m, m));
  const RegressionParams reg = RegressionParams::classical(m, 2 * m);
  const InverseWishartOmega prior{Matrix::Identity(m, m), 6.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fiv_mixture_mc(model, Matrix::Identity(m, m), reg, features, prior, state.range(0), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FivMixtureMc)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SolveOmega0(benchmark::State& state) {
  const Index m = state.range(0);
  MarketModel model{Matrix::Identity(m, m), Vector::Zero(m), 0.5 * Matrix::Identity(m, m), 0.5, 1.0};
  std::vector<Vector> f(static_cast<std::size_t>(m), Vector::Ones(9));
  const FeatureSpec features(f, 0.1 * Matrix::Identity(m, m));
  const Matrix target = 0.3 * Matrix::Identity(m, m);
  for (auto _ : state) benchmark::DoNotOptimize(solve_omega0(model, Matrix::Identity(m, m), features, target));
}
BENCHMARK(BM_SolveOmega0)->Arg(3)->Arg(11)->Arg(30);

}  // namespace
