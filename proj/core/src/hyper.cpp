#include "blat/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "blat/errors.hpp"

namespace blat {

namespace {

bool is_constant(const Vector& column) {
  const Index n = column.size();
  if (n < 2) return true;
  const double mean = column.mean();
  const double ss = (column.array() - mean).square().sum();
  return ss <= 1e-20 * static_cast<double>(n) * std::max(1.0, mean * mean);
}

Vector solve_normal_equations(const Matrix& gram, const Vector& rhs, RankPolicy policy,
                              const std::string& subject) {
  if (gram.rows() == 0) return Vector();
  if (policy == RankPolicy::MinimumNorm) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(gram);
    cod.setThreshold(1e-12);
    return cod.solve(rhs);
  }
  Eigen::LLT<Matrix> llt(linalg::symmetrize(gram));
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw Error(ErrorCode::SingularDesign, subject, "normal-equation matrix is singular");
  }
  return llt.solve(rhs);
}

}  // namespace

Matrix ObservationPanel::feature_block(Index l) const {
  std::vector<Vector> rows;
  rows.reserve(asset_features.size());
  for (const auto& f : asset_features) rows.emplace_back(f.row(l).transpose());
  return build_block_feature(rows);
}

void validate_panel(const ObservationPanel& panel) {
  const Index n = panel.observations();
  const Index m = panel.assets();
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "returns", "panel has no assets");
  if (static_cast<Index>(panel.asset_features.size()) != m) {
    throw Error(ErrorCode::ShapeMismatch, "asset_features", "need one feature matrix per asset");
  }
  const Index d = panel.per_asset_dim();
  if (d < 1) throw Error(ErrorCode::ShapeMismatch, "asset_features", "need at least one feature");
  for (const auto& f : panel.asset_features) linalg::require_shape(f, n, d, "asset_features");
  if (!panel.dates.empty() && static_cast<Index>(panel.dates.size()) != n) {
    throw Error(ErrorCode::ShapeMismatch, "dates", "one date per observation");
  }
  if (n < d + 2) {
    throw Error(ErrorCode::InsufficientData, "panel",
                "need n >= d + 2 observations, got " + std::to_string(n));
  }
}

Moments sample_moments(const Matrix& returns) {
  const Index n = returns.rows();
  if (n < 2) {
    throw Error(ErrorCode::InsufficientData, "returns", "sample covariance needs at least 2 rows");
  }
  Moments out;
  out.mean = returns.colwise().mean().transpose();
  const Matrix centered = returns.rowwise() - out.mean.transpose();
  out.cov = linalg::symmetrize(centered.transpose() * centered / static_cast<double>(n - 1));
  return out;
}

Moments sample_moments(const ObservationPanel& panel) { return sample_moments(panel.returns); }

Vector reverse_optimize(double delta, const Matrix& sigma, const Matrix& sigma0, const Vector& w_cap) {
  const Index m = w_cap.size();
  linalg::require_shape(sigma, m, m, "sigma");
  linalg::require_shape(sigma0, m, m, "sigma0");
  return delta * ((sigma + sigma0) * w_cap);
}

GlsFit gls_fit(const ObservationPanel& panel, const Matrix& weight, RankPolicy policy) {
  validate_panel(panel);
  const Index n = panel.observations();
  const Index m = panel.assets();
  const Index d = panel.per_asset_dim();
  linalg::require_shape(weight, m, m, "weight");
  const Matrix weight_inv = linalg::spd_inverse(weight, "weight");

  const Vector r_bar = panel.returns.colwise().mean().transpose();
  const Matrix r_tilde = panel.returns.rowwise() - r_bar.transpose();

  // Centered per-asset designs and the active (non-constant) columns.
  std::vector<Matrix> z(static_cast<std::size_t>(m));
  std::vector<Vector> f_bar(static_cast<std::size_t>(m));
  std::vector<Index> active;
  GlsFit fit;
  fit.dropped.assign(static_cast<std::size_t>(m * d), false);
  for (Index i = 0; i < m; ++i) {
    const Matrix& f = panel.asset_features[static_cast<std::size_t>(i)];
    f_bar[i] = f.colwise().mean().transpose();
    z[i] = f.rowwise() - f_bar[i].transpose();
    for (Index a = 0; a < d; ++a) {
      if (is_constant(f.col(a))) {
        fit.dropped[static_cast<std::size_t>(i * d + a)] = true;
      } else {
        active.push_back(i * d + a);
      }
    }
  }

  // With W constant across observations, block (i, k) of Σ_l F̃ᵀW⁻¹F̃ is
  // W⁻¹_ik · Z_iᵀZ_k and block i of Σ_l F̃ᵀW⁻¹r̃ is Z_iᵀ(R̃W⁻¹)_{:,i}.
  const Index p = static_cast<Index>(active.size());
  Matrix gram(p, p);
  Vector rhs(p);
  const Matrix rw = r_tilde * weight_inv;
  for (Index u = 0; u < p; ++u) {
    const Index i = active[u] / d;
    const Index a = active[u] % d;
    rhs(u) = z[i].col(a).dot(rw.col(i));
    for (Index v = u; v < p; ++v) {
      const Index k = active[v] / d;
      const Index b = active[v] % d;
      gram(u, v) = weight_inv(i, k) * z[i].col(a).dot(z[k].col(b));
      gram(v, u) = gram(u, v);
    }
  }
  (void)n;
  const Vector beta_active = solve_normal_equations(gram, rhs, policy, "gls");

  fit.beta = Vector::Zero(m * d);
  for (Index u = 0; u < p; ++u) fit.beta(active[u]) = beta_active(u);
  fit.alpha = r_bar;
  for (Index i = 0; i < m; ++i) fit.alpha(i) -= f_bar[i].dot(fit.beta.segment(i * d, d));
  return fit;
}

double kde_bandwidth(Index dm, Index n) {
  if (dm < 1) throw Error(ErrorCode::OutOfRange, "dm", "must be >= 1");
  if (n < 1) throw Error(ErrorCode::OutOfRange, "n", "must be >= 1");
  const double q = static_cast<double>(dm);
  const double exponent = 2.0 / (q + 4.0);
  return std::pow(4.0 / (q + 2.0), exponent) * std::pow(static_cast<double>(n), -exponent);
}

ErrorMatrixEstimate error_matrix(const ObservationPanel& panel, RankPolicy policy) {
  validate_panel(panel);
  const Index n = panel.observations();
  const Index m = panel.assets();
  const Index d = panel.per_asset_dim();

  ErrorMatrixEstimate est;
  est.bandwidth = kde_bandwidth(m * d, n);
  est.scaled_var = Vector::Zero(m * d);
  est.ols_block = Matrix::Zero(m, m * d);
  est.ols_intercept = Vector::Zero(m);
  est.dropped.assign(static_cast<std::size_t>(m * d), false);

  for (Index i = 0; i < m; ++i) {
    const Matrix& f = panel.asset_features[static_cast<std::size_t>(i)];
    const Vector y = panel.returns.col(i);
    const Vector f_bar = f.colwise().mean().transpose();
    const Matrix centered = f.rowwise() - f_bar.transpose();

    std::vector<Index> active;
    for (Index a = 0; a < d; ++a) {
      if (is_constant(f.col(a))) {
        est.dropped[static_cast<std::size_t>(i * d + a)] = true;
      } else {
        active.push_back(a);
        est.scaled_var(i * d + a) =
            est.bandwidth * centered.col(a).squaredNorm() / static_cast<double>(n - 1);
      }
    }
    const Index p = static_cast<Index>(active.size());
    Matrix x(n, p);
    for (Index u = 0; u < p; ++u) x.col(u) = centered.col(active[u]);
    const Vector y_tilde = y.array() - y.mean();
    const Vector slope =
        solve_normal_equations(x.transpose() * x, x.transpose() * y_tilde, policy,
                               "asset " + std::to_string(i));
    Vector b = Vector::Zero(d);
    for (Index u = 0; u < p; ++u) b(active[u]) = slope(u);
    est.ols_block.block(i, i * d, 1, d) = b.transpose();
    est.ols_intercept(i) = y.mean() - f_bar.dot(b);
  }
  est.omega_f = linalg::symmetrize(est.ols_block * est.scaled_var.asDiagonal() *
                                   est.ols_block.transpose());
  return est;
}

ConjugateConfig niw_defaults(Index m) {
  if (m < 1) throw Error(ErrorCode::OutOfRange, "m", "must be >= 1");
  return ConjugateConfig{Matrix::Identity(m, m), static_cast<double>(m) + 2.0, Vector()};
}

RidgedMatrix ridge_if_singular(const Matrix& omega_f) {
  RidgedMatrix out{omega_f, 0.0, false};
  const Index m = omega_f.rows();
  if (linalg::condition_number(linalg::symmetrize(omega_f)) <= kMaxConditionNumber) return out;
  const double trace = omega_f.trace();
  out.ridge = trace > 0.0 ? 1e-8 * trace / static_cast<double>(m) : 1e-12;
  out.matrix.diagonal().array() += out.ridge;
  out.applied = true;
  return out;
}

Vector FeatureScaling::apply(Index asset, const Vector& raw) const {
  const auto& mu = mean[static_cast<std::size_t>(asset)];
  const auto& s = sd[static_cast<std::size_t>(asset)];
  Vector out(raw.size());
  for (Index j = 0; j < raw.size(); ++j) out(j) = s(j) > 0.0 ? (raw(j) - mu(j)) / s(j) : 0.0;
  return out;
}

FeatureScaling fit_feature_scaling(const std::vector<Matrix>& asset_features) {
  FeatureScaling scaling;
  for (const auto& f : asset_features) {
    const Index n = f.rows();
    if (n < 2) throw Error(ErrorCode::InsufficientData, "features", "need at least 2 rows to scale");
    Vector mu = f.colwise().mean().transpose();
    Vector s(f.cols());
    for (Index j = 0; j < f.cols(); ++j) {
      s(j) = is_constant(f.col(j))
                 ? 0.0
                 : std::sqrt((f.col(j).array() - mu(j)).square().sum() / static_cast<double>(n - 1));
    }
    scaling.mean.push_back(std::move(mu));
    scaling.sd.push_back(std::move(s));
  }
  return scaling;
}

std::vector<Matrix> apply_feature_scaling(const FeatureScaling& scaling,
                                          const std::vector<Matrix>& asset_features) {
  std::vector<Matrix> out;
  out.reserve(asset_features.size());
  for (std::size_t i = 0; i < asset_features.size(); ++i) {
    Matrix z = asset_features[i];
    for (Index l = 0; l < z.rows(); ++l) {
      z.row(l) = scaling.apply(static_cast<Index>(i), z.row(l).transpose()).transpose();
    }
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace blat
