#include "blat/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "blat/errors.hpp"
#include "blat/random.hpp"

namespace blat {

namespace {

// Objective of the inner problem, to be maximized.
double inner_value(const Vector& w, const Vector& mu, const Matrix& cov, double lambda) {
  return w.dot(mu) - lambda * w.dot(cov * w);
}

std::vector<Index> support_of(const Vector& w) {
  std::vector<Index> s;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) > 1e-12) s.push_back(i);
  }
  return s;
}

Vector clean(Vector w) {
  w = w.cwiseMax(0.0);
  const double total = w.sum();
  if (total > 0.0) w /= total;
  return w;
}

// Solves max wᵀμ − λwᵀΣw on the face spanned by the support of w exactly and
// keeps the result when it is feasible and no worse.
Vector polish_inner(const Vector& w, const Vector& mu, const Matrix& cov, double lambda) {
  const auto s = support_of(w);
  const Index k = static_cast<Index>(s.size());
  if (k == 0) return w;
  Matrix c(k, k);
  Vector m(k);
  for (Index a = 0; a < k; ++a) {
    m(a) = mu(s[a]);
    for (Index b = 0; b < k; ++b) c(a, b) = cov(s[a], s[b]);
  }
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) return w;
  const Vector v = llt.solve(m);
  const Vector u = llt.solve(Vector::Ones(k));
  const double nu = (v.sum() - 2.0 * lambda) / u.sum();
  const Vector ws = (v - nu * u) / (2.0 * lambda);
  if ((ws.array() < 0.0).any()) return w;
  Vector out = Vector::Zero(w.size());
  for (Index a = 0; a < k; ++a) out(s[a]) = ws(a);
  out = clean(out);
  return inner_value(out, mu, cov, lambda) >= inner_value(w, mu, cov, lambda) ? out : w;
}

// Accelerated projected gradient for max wᵀμ − λwᵀΣw over the simplex.
Vector solve_inner(const Vector& mu, const Matrix& cov, double lambda, double eig_max,
                   Vector start, int max_iterations) {
  const double step = 1.0 / std::max(2.0 * lambda * eig_max, 1e-300);
  Vector x = project_to_simplex(start);
  Vector y = x;
  double t = 1.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector grad = mu - 2.0 * lambda * (cov * y);
    const Vector next = project_to_simplex(y + step * grad);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double change = (next - x).cwiseAbs().maxCoeff();
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    t = t_next;
    if (change < 1e-15) break;
  }
  return polish_inner(clean(x), mu, cov, lambda);
}

// Tangency weights restricted to the support, w_S ∝ Σ_SS⁻¹μ_S, when they are
// feasible and improve the Sharpe ratio.
Vector polish_sharpe(const Vector& w, const Vector& mu, const Matrix& cov) {
  const auto s = support_of(w);
  const Index k = static_cast<Index>(s.size());
  if (k == 0) return w;
  Matrix c(k, k);
  Vector m(k);
  for (Index a = 0; a < k; ++a) {
    m(a) = mu(s[a]);
    for (Index b = 0; b < k; ++b) c(a, b) = cov(s[a], s[b]);
  }
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() != Eigen::Success) return w;
  const Vector ws = llt.solve(m);
  if (!(ws.sum() > 0.0) || (ws.array() < 0.0).any()) return w;
  Vector out = Vector::Zero(w.size());
  for (Index a = 0; a < k; ++a) out(s[a]) = ws(a);
  out = clean(out);
  return sharpe(out, mu, cov) >= sharpe(w, mu, cov) ? out : w;
}

Vector random_simplex_point(Index m, CounterRng rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector w(m);
  for (Index i = 0; i < m; ++i) w(i) = expo(rng);
  return w / w.sum();
}

double largest_eigenvalue(const Matrix& cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

void require_cov(const Vector& mean, const Matrix& cov) {
  linalg::require_shape(cov, mean.size(), mean.size(), "cov");
  if (!linalg::is_positive_definite(linalg::symmetrize(cov))) {
    throw Error(ErrorCode::NotPositiveDefinite, "cov", "covariance must be positive definite");
  }
}

}  // namespace

Vector unconstrained_mv(const Vector& mean, const Matrix& cov, double delta) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidDelta, "delta", "must be positive");
  linalg::require_shape(cov, mean.size(), mean.size(), "cov");
  const Matrix sym = linalg::symmetrize(cov);
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success || linalg::condition_number(sym) > kMaxConditionNumber) {
    throw Error(ErrorCode::SingularMatrix, "cov", "covariance is singular or ill-conditioned");
  }
  return llt.solve(mean) / delta;
}

double sharpe(const Vector& w, const Vector& mean, const Matrix& cov, double risk_free) {
  linalg::require_size(mean, w.size(), "mean");
  linalg::require_shape(cov, w.size(), w.size(), "cov");
  const double var = w.dot(cov * w);
  if (!(var > 0.0)) throw Error(ErrorCode::ZeroVariance, "w", "portfolio variance is not positive");
  return (w.dot(mean) - risk_free * w.sum()) / std::sqrt(var);
}

Vector project_to_simplex(const Vector& v) {
  const Index m = v.size();
  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < m; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

Vector min_variance_longonly(const Matrix& cov, int max_iterations) {
  const Index m = cov.rows();
  const Vector zero = Vector::Zero(m);
  const Vector start = Vector::Constant(m, 1.0 / static_cast<double>(m));
  return clean(solve_inner(zero, cov, 1.0, largest_eigenvalue(cov), start, max_iterations));
}

SharpeResult max_sharpe_longonly(const Vector& mean, const Matrix& cov, const SharpeOptions& options) {
  const Index m = mean.size();
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "mean", "empty mean vector");
  require_cov(mean, cov);
  const Matrix sigma = linalg::symmetrize(cov);
  const Vector mu = mean.array() - options.risk_free;

  SharpeResult result;
  if (m == 1) {
    result.weights = Vector::Ones(1);
    result.sharpe = mu(0) / std::sqrt(sigma(0, 0));
    result.certificate = result.sharpe;
    result.fallback = !(mu(0) > 0.0);
    return result;
  }
  if (!(mu.maxCoeff() > 0.0)) {
    result.weights = min_variance_longonly(sigma, options.max_iterations);
    result.sharpe = sharpe(result.weights, mu, sigma);
    result.certificate = result.sharpe;
    result.fallback = true;
    return result;
  }

  const double eig_max = largest_eigenvalue(sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma, Eigen::EigenvaluesOnly);
  const double eig_min = std::max(eig.eigenvalues().minCoeff(), 1e-300);

  // φ(λ) = wᵀμ / (2wᵀΣw) − λ is positive below the fixed point and negative above.
  Vector warm = Vector::Zero(m);
  Index best;
  mu.maxCoeff(&best);
  warm(best) = 1.0;
  auto phi = [&](double lambda, Vector& w) {
    w = solve_inner(mu, sigma, lambda, eig_max, w, options.max_iterations);
    return w.dot(mu) / (2.0 * w.dot(sigma * w)) - lambda;
  };
  double lo = mu.maxCoeff() / (2.0 * sigma.diagonal().maxCoeff()) * 1e-6;
  double hi = mu.maxCoeff() * static_cast<double>(m) / (2.0 * eig_min) * 2.0;
  Vector w_lo = warm;
  while (phi(lo, w_lo) <= 0.0 && lo > 1e-300) lo *= 1e-3;
  Vector w = w_lo;
  while (hi - lo > options.lambda_tolerance * hi) {
    const double mid = std::sqrt(lo * hi) > lo && std::sqrt(lo * hi) < hi ? std::sqrt(lo * hi)
                                                                           : 0.5 * (lo + hi);
    if (phi(mid, w) > 0.0) lo = mid;
    else hi = mid;
  }
  const double lambda = 0.5 * (lo + hi);
  w = solve_inner(mu, sigma, lambda, eig_max, w, options.max_iterations);

  // Multi-start at the final λ guards against a poor warm-start basin.
  const CounterRng base(options.seed, 0);
  double best_value = inner_value(w, mu, sigma, lambda);
  for (int r = 0; r < options.restarts; ++r) {
    const Vector start = random_simplex_point(m, base.substream(static_cast<std::uint64_t>(r)));
    const Vector candidate = solve_inner(mu, sigma, lambda, eig_max, start, options.max_iterations);
    const double value = inner_value(candidate, mu, sigma, lambda);
    if (value > best_value + 1e-15 * std::abs(best_value)) {
      best_value = value;
      w = candidate;
    }
  }
  w = clean(polish_sharpe(w, mu, sigma));

  result.weights = w;
  result.lambda = lambda;
  result.sharpe = sharpe(w, mu, sigma);
  result.certificate = 2.0 * lambda * std::sqrt(w.dot(sigma * w));
  return result;
}

}  // namespace blat
