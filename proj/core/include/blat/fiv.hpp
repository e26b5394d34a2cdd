#pragma once

#include <cstdint>
#include <variant>

#include "blat/types.hpp"

namespace blat {

/// π(Ω) fixed at a known diagonal Ω₀.
struct PointMassOmega {
  Vector diagonal;
};

/// π(Ω) = IW(scale, dof) over the full k×k view uncertainty.
struct InverseWishartOmega {
  Matrix scale;
  double dof = 0.0;
};

using OmegaPrior = std::variant<PointMassOmega, InverseWishartOmega>;

void validate_omega_prior(const OmegaPrior& prior, Index k);

/// Parameters of the conjugate approximation Σ′ ~ IW(Ψ′, ν′) together with
/// the constant Ω₀ (stored as its diagonal) at which μ′ is frozen.
struct ConjugateConfig {
  Matrix psi_prime;
  double nu_prime = 0.0;
  Vector omega0;
};

struct SampleMoments {
  Vector mean;
  Matrix cov;  // unbiased, divisor n − 1
  Index samples = 0;

  /// Standard error of each mean component.
  Vector standard_errors() const;
};

/// Gaussian component θ | Ω, F, Ω^F of the FIV-BL mixture for a diagonal Ω:
///   G    = Σ₀⁻¹ + PᵀΩ⁻¹P
///   mean = G⁻¹(Σ₀⁻¹θ₀ + PᵀΩ⁻¹P(α + Fβ))
///   cov  = G⁻¹ + G⁻¹PᵀΩ⁻¹(PΩ^FPᵀ)Ω⁻¹PG⁻¹
/// `precision` holds G (so precision·cov ≠ I unless Ω^F = 0).
PosteriorGaussian fiv_component(const MarketModel& model, const Matrix& pick,
                                const RegressionParams& reg, const FeatureSpec& features,
                                const Vector& omega_diagonal);

/// Same component for a full SPD Ω, as drawn from an inverse-Wishart prior.
PosteriorGaussian fiv_component_full(const MarketModel& model, const Matrix& pick,
                                     const RegressionParams& reg, const FeatureSpec& features,
                                     const Matrix& omega);

/// Monte-Carlo moments of p(θ | F, Ω^F) = ∫ N(θ; μ(Ω), Σ(Ω)) π(Ω) dΩ.
/// Samples are drawn in fixed-size blocks, each on its own substream of
/// `seed`, so the result is a pure function of the inputs and the seed.
/// Requires n_samples ≥ 1000.
SampleMoments fiv_mixture_mc(const MarketModel& model, const Matrix& pick,
                             const RegressionParams& reg, const FeatureSpec& features,
                             const OmegaPrior& prior, Index n_samples, std::uint64_t seed);

/// t_{ν′}(μ′, Ψ′/(ν′ − m + 1)) with μ′ the FIV component mean at Ω₀. The
/// intrinsic Σ is dropped from the predictive (Σ → 0), so this law is used
/// for r̃ directly.
StudentTPredictive fiv_conjugate_t(const MarketModel& model, const Matrix& pick,
                                   const RegressionParams& reg, const FeatureSpec& features,
                                   const ConjugateConfig& cfg);

/// Marginal of θ under θ | Σ′ ~ N(mu, Σ′), Σ′ ~ IW(psi, nu).
StudentTPredictive niw_marginal_t(const Vector& mu, const Matrix& psi, double nu);

/// Sampling route for the same marginal: Σ′ ~ IW(psi, nu), θ ~ N(mu, Σ′).
SampleMoments niw_sample_moments(const Vector& mu, const Matrix& psi, double nu, Index n_samples,
                                 std::uint64_t seed);

/// Isotropic Ω₀ = ω·I_k whose component covariance matches the trace of
/// `target_sigma_prime`, found by bisection on log ω over [1e-10, 1e6].
/// Returns the diagonal of Ω₀. Throws NoRoot when the interval does not
/// bracket the target.
Vector solve_omega0(const MarketModel& model, const Matrix& pick, const FeatureSpec& features,
                    const Matrix& target_sigma_prime);

/// Conjugate configuration for (Ψ′, ν′) with Ω₀ back-solved from the IW mean
/// Ψ′/(ν′ − m + 1).
ConjugateConfig make_conjugate_config(const MarketModel& model, const Matrix& pick,
                                      const FeatureSpec& features, Matrix psi_prime,
                                      double nu_prime);

}  // namespace blat
