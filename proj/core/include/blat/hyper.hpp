#pragma once

#include <vector>

#include "blat/date.hpp"
#include "blat/fiv.hpp"
#include "blat/types.hpp"

namespace blat {

/// Observations {(r_l, F_l)}, l = 1..n. Features are held per asset as n×d
/// matrices; feature_block(l) rebuilds the m×dm block-diagonal F_l.
struct ObservationPanel {
  Matrix returns;                      // n × m
  std::vector<Matrix> asset_features;  // m entries, each n × d
  std::vector<Date> dates;             // n entries, or empty

  Index observations() const noexcept { return returns.rows(); }
  Index assets() const noexcept { return returns.cols(); }
  Index per_asset_dim() const noexcept {
    return asset_features.empty() ? 0 : asset_features.front().cols();
  }
  Matrix feature_block(Index l) const;
};

/// Shapes align across returns/features/dates and n ≥ d + 2.
void validate_panel(const ObservationPanel& panel);

struct Moments {
  Vector mean;
  Matrix cov;
};

/// Sample mean and unbiased (n − 1) covariance of the rows.
Moments sample_moments(const Matrix& returns);
Moments sample_moments(const ObservationPanel& panel);

/// θ₀ = δ(Σ + Σ₀)w_cap.
Vector reverse_optimize(double delta, const Matrix& sigma, const Matrix& sigma0, const Vector& w_cap);

/// How regressions treat a rank-deficient design: reject it as SingularDesign,
/// or take the minimum-norm least-squares solution.
enum class RankPolicy { Reject, MinimumNorm };

struct GlsFit {
  Vector alpha;               // m
  Vector beta;                // m·d, zero at dropped entries
  std::vector<bool> dropped;  // m·d, true for zero-variance feature columns
};

/// Generalized least squares for r = α + Fβ + ε, ε ~ N(0, W):
///   β̂ = (Σ F̃ᵀW⁻¹F̃)⁻¹ Σ F̃ᵀW⁻¹r̃,   α̂ = r̄ − F̄β̂.
/// Feature columns that are constant over the panel are dropped (β = 0).
GlsFit gls_fit(const ObservationPanel& panel, const Matrix& weight,
               RankPolicy policy = RankPolicy::Reject);

/// Rule-of-thumb bandwidth h = (4/(dm+2))^(2/(dm+4)) · n^(−2/(dm+4)).
double kde_bandwidth(Index dm, Index n);

struct ErrorMatrixEstimate {
  double bandwidth = 0.0;
  Vector scaled_var;          // diagonal of H̃ = diag(h·Var(f_ij)), length m·d
  Matrix ols_block;           // B, m × m·d block diagonal
  Vector ols_intercept;       // a_i
  Matrix omega_f;             // B H̃ Bᵀ
  std::vector<bool> dropped;  // zero-variance feature columns
};

/// Per-asset OLS of rᵢ on fᵢ assembled into Ω̂^F = B H̃ Bᵀ.
ErrorMatrixEstimate error_matrix(const ObservationPanel& panel,
                                 RankPolicy policy = RankPolicy::Reject);

/// Ψ′ = I_m, ν′ = m + 2 (Ω₀ left empty).
ConjugateConfig niw_defaults(Index m);

struct RidgedMatrix {
  Matrix matrix;
  double ridge = 0.0;
  bool applied = false;
};

/// Adds 1e-8·trace/m to the diagonal when the matrix is singular or its
/// condition number exceeds 1e12. A zero matrix receives 1e-12.
RidgedMatrix ridge_if_singular(const Matrix& omega_f);

/// Column z-scoring of each asset's features. Zero-variance columns map to 0.
struct FeatureScaling {
  std::vector<Vector> mean;  // per asset, length d
  std::vector<Vector> sd;    // per asset, length d; 0 marks a constant column

  Vector apply(Index asset, const Vector& raw) const;
};

FeatureScaling fit_feature_scaling(const std::vector<Matrix>& asset_features);
std::vector<Matrix> apply_feature_scaling(const FeatureScaling& scaling,
                                          const std::vector<Matrix>& asset_features);

}  // namespace blat
