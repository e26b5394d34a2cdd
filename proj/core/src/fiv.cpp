#include "blat/fiv.hpp"

#include <cmath>
#include <string>

#include "blat/errors.hpp"
#include "blat/random.hpp"

namespace blat {

namespace {

constexpr Index kBlockSize = 4096;
constexpr int kMaxResamples = 100;

void check_component_inputs(const MarketModel& model, const Matrix& pick,
                            const RegressionParams& reg, const FeatureSpec& features) {
  const Index m = model.size();
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "prior_mean", "empty model");
  linalg::require_shape(model.prior_cov, m, m, "prior_cov");
  if (pick.cols() != m || pick.rows() == 0) {
    throw Error(ErrorCode::ShapeMismatch, "pick", "pick must be k x " + std::to_string(m));
  }
  if (features.assets() != m) {
    throw Error(ErrorCode::ShapeMismatch, "features", "feature block must have m rows");
  }
  linalg::require_size(reg.alpha, m, "alpha");
  linalg::require_size(reg.beta, features.stacked_dim(), "beta");
}

PosteriorGaussian component(const MarketModel& model, const Matrix& pick,
                            const RegressionParams& reg, const FeatureSpec& features,
                            const Matrix& omega_inverse, bool check_condition) {
  const Matrix prior_prec = linalg::spd_inverse(model.prior_cov, "prior_cov");
  const Matrix view_prec = linalg::symmetrize(pick.transpose() * omega_inverse * pick);
  const Matrix g = linalg::symmetrize(prior_prec + view_prec);

  Eigen::LLT<Matrix> llt;
  if (check_condition) {
    llt = linalg::factor_precision(g, "G");
  } else {
    llt.compute(g);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "G");
  }

  const Index m = model.size();
  const Vector implied = reg.alpha + features.block() * reg.beta;
  const Matrix gain = llt.solve(view_prec);  // G⁻¹PᵀΩ⁻¹P

  PosteriorGaussian out;
  out.mean = llt.solve(prior_prec * model.prior_mean + view_prec * implied);
  out.cov = linalg::symmetrize(llt.solve(Matrix::Identity(m, m)) +
                               gain * features.error() * gain.transpose());
  out.precision = g;
  return out;
}

Matrix diagonal_inverse(const Vector& omega_diagonal) {
  for (Index i = 0; i < omega_diagonal.size(); ++i) {
    if (!(omega_diagonal(i) > 0.0)) {
      throw Error(ErrorCode::OutOfRange, "omega", "diagonal entries must be strictly positive");
    }
  }
  return omega_diagonal.cwiseInverse().asDiagonal();
}

SampleMoments moments_of(const Matrix& draws) {
  const Index n = draws.cols();
  SampleMoments out;
  out.samples = n;
  out.mean = draws.rowwise().mean();
  const Matrix centered = draws.colwise() - out.mean;
  out.cov = linalg::symmetrize(centered * centered.transpose() / static_cast<double>(n - 1));
  return out;
}

}  // namespace

void validate_omega_prior(const OmegaPrior& prior, Index k) {
  if (const auto* pm = std::get_if<PointMassOmega>(&prior)) {
    linalg::require_size(pm->diagonal, k, "omega_prior");
    diagonal_inverse(pm->diagonal);
    return;
  }
  const auto& iw = std::get<InverseWishartOmega>(prior);
  linalg::require_shape(iw.scale, k, k, "omega_prior.scale");
  linalg::cholesky(iw.scale, "omega_prior.scale");
  if (!(iw.dof > static_cast<double>(k) - 1.0)) {
    throw Error(ErrorCode::InvalidDof, "omega_prior.dof", "requires dof > k - 1");
  }
}

Vector SampleMoments::standard_errors() const {
  return (cov.diagonal() / static_cast<double>(samples)).cwiseSqrt();
}

PosteriorGaussian fiv_component(const MarketModel& model, const Matrix& pick,
                                const RegressionParams& reg, const FeatureSpec& features,
                                const Vector& omega_diagonal) {
  check_component_inputs(model, pick, reg, features);
  linalg::require_size(omega_diagonal, pick.rows(), "omega");
  return component(model, pick, reg, features, diagonal_inverse(omega_diagonal), true);
}

PosteriorGaussian fiv_component_full(const MarketModel& model, const Matrix& pick,
                                     const RegressionParams& reg, const FeatureSpec& features,
                                     const Matrix& omega) {
  check_component_inputs(model, pick, reg, features);
  linalg::require_shape(omega, pick.rows(), pick.rows(), "omega");
  return component(model, pick, reg, features, linalg::spd_inverse(omega, "omega"), true);
}

SampleMoments fiv_mixture_mc(const MarketModel& model, const Matrix& pick,
                             const RegressionParams& reg, const FeatureSpec& features,
                             const OmegaPrior& prior, Index n_samples, std::uint64_t seed) {
  check_component_inputs(model, pick, reg, features);
  if (n_samples < 1000) {
    throw Error(ErrorCode::OutOfRange, "n_samples", "Monte-Carlo estimate requires >= 1000 samples");
  }
  const Index k = pick.rows();
  validate_omega_prior(prior, k);

  const Index m = model.size();
  Matrix draws(m, n_samples);
  const CounterRng root(seed);

  // A point mass has a single component; factor it once.
  PosteriorGaussian fixed;
  Matrix fixed_chol;
  const auto* point_mass = std::get_if<PointMassOmega>(&prior);
  if (point_mass != nullptr) {
    fixed = component(model, pick, reg, features, diagonal_inverse(point_mass->diagonal), true);
    fixed_chol = linalg::cholesky(fixed.cov, "component cov").matrixL();
  }

  for (Index start = 0, block = 0; start < n_samples; start += kBlockSize, ++block) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(block));
    const Index stop = std::min(n_samples, start + kBlockSize);
    for (Index s = start; s < stop; ++s) {
      if (point_mass != nullptr) {
        draws.col(s) = sample_gaussian(fixed.mean, fixed_chol, rng);
        continue;
      }
      const auto& iw = std::get<InverseWishartOmega>(prior);
      bool drawn = false;
      for (int attempt = 0; attempt < kMaxResamples && !drawn; ++attempt) {
        const Matrix omega = sample_inverse_wishart(iw.scale, iw.dof, rng);
        Eigen::LLT<Matrix> omega_llt(omega);
        if (omega_llt.info() != Eigen::Success) continue;
        try {
          const Matrix omega_inv = linalg::symmetrize(omega_llt.solve(Matrix::Identity(k, k)));
          const auto comp = component(model, pick, reg, features, omega_inv, true);
          Eigen::LLT<Matrix> cov_llt(comp.cov);
          if (cov_llt.info() != Eigen::Success) continue;
          draws.col(s) = sample_gaussian(comp.mean, cov_llt.matrixL(), rng);
          drawn = true;
        } catch (const Error&) {
          // numerically singular draw; resample
        }
      }
      if (!drawn) {
        throw Error(ErrorCode::SamplerFailure, "omega",
                    "no usable draw after " + std::to_string(kMaxResamples) + " attempts");
      }
    }
  }
  return moments_of(draws);
}

StudentTPredictive niw_marginal_t(const Vector& mu, const Matrix& psi, double nu) {
  const Index m = mu.size();
  linalg::require_shape(psi, m, m, "psi");
  if (!(nu > static_cast<double>(m) - 1.0)) {
    throw Error(ErrorCode::InvalidDof, "nu", "requires nu > m - 1");
  }
  linalg::cholesky(psi, "psi");
  return StudentTPredictive{mu, psi / (nu - static_cast<double>(m) + 1.0), nu};
}

SampleMoments niw_sample_moments(const Vector& mu, const Matrix& psi, double nu, Index n_samples,
                                 std::uint64_t seed) {
  niw_marginal_t(mu, psi, nu);  // argument validation
  if (n_samples < 2) throw Error(ErrorCode::OutOfRange, "n_samples", "need at least 2 samples");
  const Index m = mu.size();
  Matrix draws(m, n_samples);
  const CounterRng root(seed);
  for (Index start = 0, block = 0; start < n_samples; start += kBlockSize, ++block) {
    CounterRng rng = root.substream(static_cast<std::uint64_t>(block));
    const Index stop = std::min(n_samples, start + kBlockSize);
    for (Index s = start; s < stop; ++s) {
      const Matrix sigma_prime = sample_inverse_wishart(psi, nu, rng);
      const Matrix chol = linalg::cholesky(sigma_prime, "sigma_prime").matrixL();
      draws.col(s) = sample_gaussian(mu, chol, rng);
    }
  }
  return moments_of(draws);
}

StudentTPredictive fiv_conjugate_t(const MarketModel& model, const Matrix& pick,
                                   const RegressionParams& reg, const FeatureSpec& features,
                                   const ConjugateConfig& cfg) {
  const Index m = model.size();
  linalg::require_shape(cfg.psi_prime, m, m, "psi_prime");
  if (!(cfg.nu_prime > static_cast<double>(m) - 1.0)) {
    throw Error(ErrorCode::InvalidDof, "nu_prime", "requires nu' > m - 1");
  }
  linalg::cholesky(cfg.psi_prime, "psi_prime");
  const auto comp = fiv_component(model, pick, reg, features, cfg.omega0);
  return StudentTPredictive{comp.mean, cfg.psi_prime / (cfg.nu_prime - static_cast<double>(m) + 1.0),
                            cfg.nu_prime};
}

Vector solve_omega0(const MarketModel& model, const Matrix& pick, const FeatureSpec& features,
                    const Matrix& target_sigma_prime) {
  const Index m = model.size();
  const Index k = pick.rows();
  const RegressionParams reg = RegressionParams::classical(m, features.stacked_dim());
  check_component_inputs(model, pick, reg, features);
  linalg::require_shape(target_sigma_prime, m, m, "target_sigma_prime");
  linalg::cholesky(target_sigma_prime, "target_sigma_prime");
  const double target = target_sigma_prime.trace();

  auto residual = [&](double log_omega) {
    const double omega = std::exp(log_omega);
    const Matrix omega_inv = Matrix::Identity(k, k) / omega;
    return component(model, pick, reg, features, omega_inv, false).cov.trace() - target;
  };

  double lo = std::log(1e-10);
  double hi = std::log(1e6);
  double f_lo = residual(lo);
  const double f_hi = residual(hi);
  if (f_lo == 0.0) return Vector::Constant(k, std::exp(lo));
  if (f_hi == 0.0) return Vector::Constant(k, std::exp(hi));
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw Error(ErrorCode::NoRoot, "omega0",
                "trace of the component covariance does not bracket the target on [1e-10, 1e6]");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = residual(mid);
    if (f_mid == 0.0) return Vector::Constant(k, std::exp(mid));
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return Vector::Constant(k, std::exp(0.5 * (lo + hi)));
}

ConjugateConfig make_conjugate_config(const MarketModel& model, const Matrix& pick,
                                      const FeatureSpec& features, Matrix psi_prime,
                                      double nu_prime) {
  const Index m = model.size();
  linalg::require_shape(psi_prime, m, m, "psi_prime");
  if (!(nu_prime > static_cast<double>(m) - 1.0)) {
    throw Error(ErrorCode::InvalidDof, "nu_prime", "requires nu' > m - 1");
  }
  const Matrix target = psi_prime / (nu_prime - static_cast<double>(m) + 1.0);
  Vector omega0 = solve_omega0(model, pick, features, target);
  return ConjugateConfig{std::move(psi_prime), nu_prime, std::move(omega0)};
}

}  // namespace blat
