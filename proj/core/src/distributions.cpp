#include "blat/distributions.hpp"

#include <cmath>
#include <numbers>

#include "blat/errors.hpp"

namespace blat {

namespace {

double log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double MultivariateNormal::log_density(const Vector& x) const {
  linalg::require_size(x, mean.size(), "x");
  const auto llt = linalg::cholesky(cov, "cov");
  const Vector diff = x - mean;
  const Vector z = llt.matrixL().solve(diff);
  const double p = static_cast<double>(mean.size());
  return -0.5 * (p * std::log(2.0 * std::numbers::pi) + log_det_from_llt(llt) + z.squaredNorm());
}

double MultivariateNormal::density(const Vector& x) const { return std::exp(log_density(x)); }

double log_density(const StudentTPredictive& t, const Vector& x) {
  linalg::require_size(x, t.size(), "x");
  const double nu = t.shape_dof();
  if (!(nu > 0.0)) throw Error(ErrorCode::InvalidDof, "dof", "requires nu' > m - 1");
  const auto llt = linalg::cholesky(t.scale, "scale");
  const Vector z = llt.matrixL().solve(x - t.location);
  const double p = static_cast<double>(t.size());
  return std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) -
         0.5 * p * std::log(nu * std::numbers::pi) - 0.5 * log_det_from_llt(llt) -
         0.5 * (nu + p) * std::log1p(z.squaredNorm() / nu);
}

double density(const StudentTPredictive& t, const Vector& x) { return std::exp(log_density(t, x)); }

}  // namespace blat
