#pragma once

#include <cstdint>

#include "blat/linalg.hpp"

namespace blat {

/// w = cov⁻¹·mean / δ, the stationary point of wᵀmean − (δ/2)wᵀ cov w.
Vector unconstrained_mv(const Vector& mean, const Matrix& cov, double delta);

/// (wᵀmean − r_f) / √(wᵀ cov w). Throws ZeroVariance when the variance is not positive.
double sharpe(const Vector& w, const Vector& mean, const Matrix& cov, double risk_free = 0.0);

/// Euclidean projection onto {w : Σw = 1, w ≥ 0}.
Vector project_to_simplex(const Vector& v);

struct SharpeOptions {
  double risk_free = 0.0;
  int restarts = 50;
  int max_iterations = 10000;
  double lambda_tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
};

struct SharpeResult {
  Vector weights;
  double sharpe = 0.0;
  /// Sharpe ratio implied by the final inner problem, 2λ*·σ(w).
  double certificate = 0.0;
  double lambda = 0.0;
  /// Set when no asset has a positive excess mean and the long-only minimum
  /// variance portfolio was returned instead.
  bool fallback = false;
};

/// Long-only maximum Sharpe ratio on the simplex. Bisects on λ for the fixed
/// point λ = wᵀμ / (2 wᵀΣw) of w_λ = argmax wᵀμ − λ wᵀΣw, solving each inner
/// problem by accelerated projected gradient.
SharpeResult max_sharpe_longonly(const Vector& mean, const Matrix& cov,
                                 const SharpeOptions& options = {});

/// argmin wᵀ cov w over the simplex.
Vector min_variance_longonly(const Matrix& cov, int max_iterations = 10000);

}  // namespace blat
