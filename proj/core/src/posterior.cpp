#include "blat/posterior.hpp"

#include <string>

#include "blat/errors.hpp"

namespace blat {

namespace {

Matrix prior_precision(const MarketModel& model) {
  const Index m = model.size();
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "prior_mean", "empty model");
  linalg::require_shape(model.prior_cov, m, m, "prior_cov");
  linalg::require_shape(model.sigma, m, m, "sigma");
  if (!linalg::is_symmetric(model.sigma)) {
    throw Error(ErrorCode::NotPositiveDefinite, "sigma", "matrix is not symmetric");
  }
  return linalg::spd_inverse(model.prior_cov, "prior_cov");
}

Matrix feature_precision(const FeatureSpec& features) {
  try {
    return linalg::spd_inverse(features.error(), "omega_f");
  } catch (const Error&) {
    throw Error(ErrorCode::NonInvertible, "omega_f", "feature error matrix is not invertible");
  }
}

void check_views(const ViewSpec& views, Index m) {
  if (views.assets() != m) {
    throw Error(ErrorCode::ShapeMismatch, "pick",
                "pick has " + std::to_string(views.assets()) + " columns, model has " +
                    std::to_string(m) + " assets");
  }
}

void check_features(const FeatureSpec& features, const RegressionParams& reg, Index m) {
  if (features.assets() != m) {
    throw Error(ErrorCode::ShapeMismatch, "features",
                "features cover " + std::to_string(features.assets()) + " assets, model has " +
                    std::to_string(m));
  }
  validate_regression(reg, m, features.stacked_dim());
}

PosteriorGaussian solve_posterior(Matrix precision, const Vector& rhs, std::string_view name) {
  precision = linalg::symmetrize(precision);
  const auto llt = linalg::factor_precision(precision, name);
  const Index m = precision.rows();
  PosteriorGaussian post;
  post.mean = llt.solve(rhs);
  post.cov = linalg::symmetrize(llt.solve(Matrix::Identity(m, m)));
  post.precision = std::move(precision);
  return post;
}

}  // namespace

PosteriorGaussian blb_posterior(const MarketModel& model, const ViewSpec& views) {
  const Matrix prior_prec = prior_precision(model);
  check_views(views, model.size());
  const Matrix& p = views.pick();
  const Vector omega_inv = views.uncertainty_inverse();
  const Matrix pt_oinv = p.transpose() * omega_inv.asDiagonal();
  const Matrix g = prior_prec + pt_oinv * p;
  const Vector rhs = prior_prec * model.prior_mean + pt_oinv * views.views();
  return solve_posterior(g, rhs, "G");
}

PredictiveGaussian blb_predictive(const MarketModel& model, const ViewSpec& views) {
  return predictive_from(blb_posterior(model, views), model.sigma);
}

PosteriorGaussian mbl_posterior(const MarketModel& model, const ViewSpec& views,
                                const FeatureSpec& features, const RegressionParams& reg) {
  const Matrix prior_prec = prior_precision(model);
  const Index m = model.size();
  check_views(views, m);
  check_features(features, reg, m);
  const Matrix feat_prec = feature_precision(features);

  const Matrix& p = views.pick();
  const Matrix& f = features.block();
  const double gamma = reg.gamma;
  const Matrix pt_oinv = p.transpose() * views.uncertainty_inverse().asDiagonal();

  const Matrix g = prior_prec + feat_prec + gamma * gamma * pt_oinv * p;
  const Vector implied = reg.alpha_f + f * reg.beta_f;
  const Vector residual = views.views() - p * reg.alpha - p * (f * reg.beta);
  const Vector rhs = prior_prec * model.prior_mean + feat_prec * implied + gamma * pt_oinv * residual;
  return solve_posterior(g, rhs, "G^M");
}

PredictiveGaussian mbl_predictive(const MarketModel& model, const ViewSpec& views,
                                  const FeatureSpec& features, const RegressionParams& reg) {
  return predictive_from(mbl_posterior(model, views, features, reg), model.sigma);
}

PosteriorGaussian slp_posterior(const MarketModel& model, const FeatureSpec& features,
                                const RegressionParams& reg) {
  const Matrix prior_prec = prior_precision(model);
  check_features(features, reg, model.size());
  const Matrix feat_prec = feature_precision(features);
  const Vector implied = reg.alpha_f + features.block() * reg.beta_f;
  const Matrix g = prior_prec + feat_prec;
  const Vector rhs = prior_prec * model.prior_mean + feat_prec * implied;
  return solve_posterior(g, rhs, "G^F");
}

PredictiveGaussian slp_predictive(const MarketModel& model, const FeatureSpec& features,
                                  const RegressionParams& reg) {
  return predictive_from(slp_posterior(model, features, reg), model.sigma);
}

PredictiveGaussian predictive_from(const PosteriorGaussian& posterior, const Matrix& sigma) {
  const Index m = posterior.mean.size();
  linalg::require_shape(sigma, m, m, "sigma");
  return PredictiveGaussian{posterior.mean, sigma + posterior.cov};
}

GaussianProductIntegral gaussian_product_marginal(const Vector& mean1, const Matrix& cov1,
                                                  const Vector& mean2, const Matrix& cov2) {
  const Index n = mean1.size();
  if (n == 0) throw Error(ErrorCode::ShapeMismatch, "mean1", "empty vector");
  linalg::require_size(mean2, n, "mean2");
  linalg::require_shape(cov1, n, n, "cov1");
  linalg::require_shape(cov2, n, n, "cov2");
  if (!linalg::is_symmetric(cov1)) throw Error(ErrorCode::NotPositiveDefinite, "cov1", "not symmetric");
  if (!linalg::is_symmetric(cov2)) throw Error(ErrorCode::NotPositiveDefinite, "cov2", "not symmetric");
  GaussianProductIntegral out;
  out.marginal = MultivariateNormal{mean2, linalg::symmetrize(cov1 + cov2)};
  linalg::cholesky(out.marginal.cov, "cov1+cov2");
  out.value = out.marginal.density(mean1);
  return out;
}

}  // namespace blat
