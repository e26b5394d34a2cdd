#pragma once

#include "blat/distributions.hpp"
#include "blat/types.hpp"

namespace blat {

// Closed-form Gaussian posteriors over the latent mean θ and the matching
// predictive laws r̃ ~ N(posterior mean, Σ + posterior cov).
//
// All engines share one shape: a precision matrix G assembled from Σ₀⁻¹ plus
// likelihood precisions, and a right-hand side b, giving θ | · ~ N(G⁻¹b, G⁻¹).
// G is rejected as SingularMatrix when its condition number exceeds 1e12.
//
// Σ enters only the predictive step and may be any symmetric matrix of the
// right shape (including zero); Σ₀ must be SPD.

/// BLB: G = Σ₀⁻¹ + PᵀΩ⁻¹P, b = Σ₀⁻¹θ₀ + PᵀΩ⁻¹q.
PosteriorGaussian blb_posterior(const MarketModel& model, const ViewSpec& views);
PredictiveGaussian blb_predictive(const MarketModel& model, const ViewSpec& views);

/// M-BL: G^M = Σ₀⁻¹ + (Ω^F)⁻¹ + γ²PᵀΩ⁻¹P,
/// b = Σ₀⁻¹θ₀ + (Ω^F)⁻¹(α^F + Fβ^F) + γPᵀΩ⁻¹(q − Pα − PFβ).
PosteriorGaussian mbl_posterior(const MarketModel& model, const ViewSpec& views,
                                const FeatureSpec& features, const RegressionParams& reg);
PredictiveGaussian mbl_predictive(const MarketModel& model, const ViewSpec& views,
                                  const FeatureSpec& features, const RegressionParams& reg);

/// SLP-BL: G^F = Σ₀⁻¹ + (Ω^F)⁻¹, b = Σ₀⁻¹θ₀ + (Ω^F)⁻¹(α^F + Fβ^F).
PosteriorGaussian slp_posterior(const MarketModel& model, const FeatureSpec& features,
                                const RegressionParams& reg);
PredictiveGaussian slp_predictive(const MarketModel& model, const FeatureSpec& features,
                                  const RegressionParams& reg);

/// r̃ ~ N(posterior.mean, Σ + posterior.cov).
PredictiveGaussian predictive_from(const PosteriorGaussian& posterior, const Matrix& sigma);

/// ∫ N(x; mean1, cov1) N(x; mean2, cov2) dx = N(mean1; mean2, cov1 + cov2).
/// `marginal` is the Gaussian N(mean2, cov1 + cov2) seen as a law over mean1;
/// `value` is that density evaluated at mean1. Covariances must be symmetric
/// PSD with a positive-definite sum.
struct GaussianProductIntegral {
  MultivariateNormal marginal;
  double value = 0.0;
};

GaussianProductIntegral gaussian_product_marginal(const Vector& mean1, const Matrix& cov1,
                                                  const Vector& mean2, const Matrix& cov2);

}  // namespace blat
