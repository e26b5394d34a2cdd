#include <benchmark/benchmark.h>

#include <random>

#include "blat/posterior.hpp"

namespace {

using namespace blat;

Matrix spd(Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix a(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) a(i, j) = z(rng);
  return a * a.transpose() / static_cast<double>(m) + Matrix::Identity(m, m);
}

void BM_SlpPredictive(benchmark::State& state) {
  const Index m = state.range(0), d = 9;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  MarketModel model{spd(m, rng), Vector::Zero(m), 0.05 * spd(m, rng), 0.05, 1.0};
  std::vector<Vector> f(static_cast<std::size_t>(m), Vector::Zero(d));
  for (auto& v : f)
    for (Index j = 0; j < d; ++j) v(j) = z(rng);
  const FeatureSpec features(f, spd(m, rng));
  RegressionParams reg = RegressionParams::classical(m, m * d);
  for (Index j = 0; j < m * d; ++j) reg.beta_f(j) = 0.01 * z(rng);
  for (auto _ : state) benchmark::DoNotOptimize(slp_predictive(model, features, reg));
}
BENCHMARK(BM_SlpPredictive)->Arg(10)->Arg(30)->Arg(100);

void BM_BlbPosterior(benchmark::State& state) {
  const Index m = state.range(0), k = m / 2;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 1.0);
  MarketModel model{spd(m, rng), Vector::Zero(m), 0.05 * spd(m, rng), 0.05, 1.0};
  Matrix pick(k, m);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < m; ++j) pick(i, j) = z(rng);
  const ViewSpec views(pick, Vector::Constant(k, 0.01), Vector::Constant(k, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(blb_posterior(model, views));
}
BENCHMARK(BM_BlbPosterior)->Arg(10)->Arg(30)->Arg(100);

}  // namespace
