#pragma once

#include <span>
#include <vector>

#include "blat/linalg.hpp"

namespace blat {

/// Market-side inputs shared by every Black-Litterman engine: the intrinsic
/// covariance Σ of returns around the latent mean θ, and the Gaussian prior
/// θ ~ N(prior_mean, prior_cov).
struct MarketModel {
  Matrix sigma;       // Σ, squared-return units
  Vector prior_mean;  // θ₀
  Matrix prior_cov;   // Σ₀
  double tau = 1.0;   // Σ₀ = τΣ when the prior is derived from Σ
  double delta = 1.0; // risk aversion

  Index size() const noexcept { return prior_mean.size(); }
};

/// Succeeds iff shapes agree, Σ and Σ₀ are SPD (plain Cholesky, no jitter),
/// τ ∈ (0, 1] and δ ≥ 0.
void validate_market_model(const MarketModel& model);

/// k portfolio views P·θ = q + ε, ε ~ N(0, Ω), with Ω stored as its strictly
/// positive diagonal.
class ViewSpec {
 public:
  ViewSpec(Matrix pick, Vector views, Vector uncertainty);

  const Matrix& pick() const noexcept { return pick_; }
  const Vector& views() const noexcept { return views_; }
  /// Diagonal of Ω.
  const Vector& uncertainty() const noexcept { return uncertainty_; }
  Vector uncertainty_inverse() const { return uncertainty_.cwiseInverse(); }
  Matrix omega() const { return uncertainty_.asDiagonal(); }

  Index count() const noexcept { return pick_.rows(); }
  Index assets() const noexcept { return pick_.cols(); }

 private:
  Matrix pick_;
  Vector views_;
  Vector uncertainty_;
};

/// F = diag(f₁ᵀ, …, f_mᵀ): row i carries fᵢ in columns [d·i, d·(i+1)).
Matrix build_block_feature(std::span<const Vector> per_asset);

/// Per-asset feature vectors, their block-diagonal embedding F, and the
/// feature-error covariance Ω^F.
class FeatureSpec {
 public:
  FeatureSpec(std::vector<Vector> per_asset, Matrix error);

  Index assets() const noexcept { return block_.rows(); }
  Index per_asset_dim() const noexcept { return d_; }
  Index stacked_dim() const noexcept { return block_.cols(); }

  const std::vector<Vector>& per_asset() const noexcept { return per_asset_; }
  const Matrix& block() const noexcept { return block_; }
  const Matrix& error() const noexcept { return error_; }

 private:
  Index d_ = 0;
  std::vector<Vector> per_asset_;
  Matrix block_;
  Matrix error_;
};

/// Coefficients of the two feature regressions: θ = α^F + Fβ^F + ε^F and
/// q + ε = P(α + Fβ + γθ).
struct RegressionParams {
  Vector alpha_f;
  Vector beta_f;
  Vector alpha;
  Vector beta;
  double gamma = 1.0;

  /// (α^F, β^F, α, β, γ) = (0, 0, 0, 0, 1): the classical noisy-views setting.
  static RegressionParams classical(Index m, Index dm);
};

/// Throws ShapeMismatch unless α's are length m and β's are length m·d.
void validate_regression(const RegressionParams& reg, Index m, Index dm);

/// Gaussian posterior over θ together with the precision matrix that
/// produced it (G, G^M, G^F, or the FIV component G).
struct PosteriorGaussian {
  Vector mean;
  Matrix cov;
  Matrix precision;
};

/// Gaussian predictive law of unobserved returns r̃.
struct PredictiveGaussian {
  Vector mean;
  Matrix cov;
};

/// Multivariate-t law t(location, scale) arising from marginalizing an
/// Inverse-Wishart covariance IW(Ψ′, ν′). `dof` holds ν′; the t itself has
/// shape parameter ν′ − m + 1 (see shape_dof()).
struct StudentTPredictive {
  Vector location;
  Matrix scale;
  double dof = 0.0;

  Index size() const noexcept { return location.size(); }
  double shape_dof() const noexcept { return dof - static_cast<double>(size()) + 1.0; }
  /// (ν/(ν−2))·scale with ν = shape_dof(); requires ν > 2.
  Matrix covariance() const;
};

}  // namespace blat
