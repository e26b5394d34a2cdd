#include "blat/types.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "blat/errors.hpp"

namespace blat {

void validate_market_model(const MarketModel& model) {
  const Index m = model.size();
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "prior_mean", "empty model");
  linalg::require_shape(model.sigma, m, m, "sigma");
  linalg::require_shape(model.prior_cov, m, m, "prior_cov");
  if (!linalg::is_positive_definite(model.sigma)) {
    throw Error(ErrorCode::NotPositiveDefinite, "sigma");
  }
  if (!linalg::is_positive_definite(model.prior_cov)) {
    throw Error(ErrorCode::NotPositiveDefinite, "prior_cov");
  }
  if (!(model.tau > 0.0 && model.tau <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "tau", "must lie in (0, 1]");
  }
  if (!(model.delta >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "delta", "must be non-negative");
  }
}

ViewSpec::ViewSpec(Matrix pick, Vector views, Vector uncertainty)
    : pick_(std::move(pick)), views_(std::move(views)), uncertainty_(std::move(uncertainty)) {
  const Index k = pick_.rows();
  if (k == 0 || pick_.cols() == 0) throw Error(ErrorCode::ShapeMismatch, "pick", "empty pick matrix");
  linalg::require_size(views_, k, "views");
  linalg::require_size(uncertainty_, k, "uncertainty");
  for (Index i = 0; i < k; ++i) {
    if (!(uncertainty_(i) > 0.0) || !std::isfinite(uncertainty_(i))) {
      throw Error(ErrorCode::OutOfRange, "uncertainty",
                  "diagonal entry " + std::to_string(i) + " must be strictly positive");
    }
    if (pick_.row(i).cwiseAbs().maxCoeff() == 0.0) {
      throw Error(ErrorCode::InvariantViolation, "pick", "row " + std::to_string(i) + " is all zero");
    }
  }
}

Matrix build_block_feature(std::span<const Vector> per_asset) {
  const Index m = static_cast<Index>(per_asset.size());
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "features", "no assets");
  const Index d = per_asset.front().size();
  if (d < 1) throw Error(ErrorCode::ShapeMismatch, "features", "feature dimension must be >= 1");
  Matrix block = Matrix::Zero(m, d * m);
  for (Index i = 0; i < m; ++i) {
    const auto& f = per_asset[static_cast<std::size_t>(i)];
    if (f.size() != d) {
      throw Error(ErrorCode::ShapeMismatch, "features",
                  "asset " + std::to_string(i) + " has " + std::to_string(f.size()) +
                      " features, expected " + std::to_string(d));
    }
    block.block(i, d * i, 1, d) = f.transpose();
  }
  return block;
}

FeatureSpec::FeatureSpec(std::vector<Vector> per_asset, Matrix error)
    : per_asset_(std::move(per_asset)), error_(std::move(error)) {
  block_ = build_block_feature(per_asset_);
  d_ = per_asset_.front().size();
  const Index m = block_.rows();
  linalg::require_shape(error_, m, m, "omega_f");
  if (!linalg::is_symmetric(error_)) {
    throw Error(ErrorCode::NotPositiveDefinite, "omega_f", "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(linalg::symmetrize(error_), Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw Error(ErrorCode::NotPositiveDefinite, "omega_f", "matrix is not positive semi-definite");
  }
}

RegressionParams RegressionParams::classical(Index m, Index dm) {
  return RegressionParams{Vector::Zero(m), Vector::Zero(dm), Vector::Zero(m), Vector::Zero(dm), 1.0};
}

void validate_regression(const RegressionParams& reg, Index m, Index dm) {
  linalg::require_size(reg.alpha_f, m, "alpha_f");
  linalg::require_size(reg.beta_f, dm, "beta_f");
  linalg::require_size(reg.alpha, m, "alpha");
  linalg::require_size(reg.beta, dm, "beta");
}

Matrix StudentTPredictive::covariance() const {
  const double nu = shape_dof();
  if (!(nu > 2.0)) {
    throw Error(ErrorCode::InvalidDof, "dof", "t covariance requires nu' - m + 1 > 2");
  }
  return (nu / (nu - 2.0)) * scale;
}

}  // namespace blat
