#include "blat/random.hpp"

#include <cmath>
#include <random>
#include <string>

#include "blat/errors.hpp"

namespace blat {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream), key_(mix64(seed ^ mix64(stream + kGolden))) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  return mix64(key_ + (++counter_) * kGolden);
}

CounterRng CounterRng::substream(std::uint64_t index) const noexcept {
  return CounterRng(seed_, mix64(stream_ * kGolden + index + 1));
}

Vector standard_normal(Index n, CounterRng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

Vector sample_gaussian(const Vector& mean, const Matrix& chol_lower, CounterRng& rng) {
  return mean + chol_lower.triangularView<Eigen::Lower>() * standard_normal(mean.size(), rng);
}

Matrix sample_inverse_wishart(const Matrix& psi, double nu, CounterRng& rng) {
  const Index p = psi.rows();
  if (!(nu > static_cast<double>(p) - 1.0)) {
    throw Error(ErrorCode::InvalidDof, "nu", "inverse-Wishart requires nu > dim - 1");
  }
  // W = (L A)(L A)ᵀ ~ Wishart(psi⁻¹, nu) with L = chol(psi⁻¹); the draw is W⁻¹.
  const Matrix chol_precision = linalg::cholesky(linalg::spd_inverse(psi, "psi"), "psi").matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    std::chi_squared_distribution<double> chi2(nu - static_cast<double>(i));
    a(i, i) = std::sqrt(chi2(rng));
    for (Index j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  const Matrix t = chol_precision * a;  // lower triangular
  const Matrix t_inv = t.triangularView<Eigen::Lower>().solve(Matrix::Identity(p, p));
  return linalg::symmetrize(t_inv.transpose() * t_inv);
}

}  // namespace blat
