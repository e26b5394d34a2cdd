#include "blat/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "blat/errors.hpp"

namespace blat {

IndicatorCache compute_indicator_cache(const SeriesMap& series, const IndicatorConfig& config) {
  IndicatorCache cache;
  for (const auto& [ticker, s] : series) cache.emplace(ticker, compute_indicator_series(s, config));
  return cache;
}

EstimationWindow build_estimation_window(const SeriesMap& series,
                                         const std::vector<std::string>& universe,
                                         Date window_end, Index window_len,
                                         const HyperparameterOptions& options,
                                         const IndicatorCache* cache) {
  const ReturnPanel rp = build_return_panel(series, universe, window_end, window_len);
  IndicatorConfig config = options.indicators;
  config.obv_window = static_cast<int>(window_len);

  EstimationWindow w;
  w.window_end = window_end;
  w.excluded = rp.excluded;
  w.dates = rp.dates;
  const Index n = window_len;
  const Date first_day = rp.dates.front();

  std::vector<Index> kept;
  std::vector<Matrix> raw;
  for (std::size_t j = 0; j < rp.tickers.size(); ++j) {
    const auto& ticker = rp.tickers[j];
    const OhlcvSeries& s = series.at(ticker);
    Matrix computed;
    const Matrix* ind = nullptr;
    if (cache != nullptr) {
      const auto it = cache->find(ticker);
      if (it == cache->end()) {
        throw Error(ErrorCode::InvariantViolation, ticker, "missing from the indicator cache");
      }
      ind = &it->second;
    } else {
      computed = compute_indicator_series(s, config);
      ind = &computed;
    }
    // Bars on the n + 1 price days are contiguous; the first is the day before dates[0].
    const auto pos = std::lower_bound(s.bars.begin(), s.bars.end(), first_day,
                                      [](const OhlcvBar& b, Date d) { return b.date < d; });
    const Index start = static_cast<Index>(pos - s.bars.begin()) - 1;
    if (start < 0 || start + n + 1 > ind->rows() || !ind->middleRows(start, n + 1).allFinite()) {
      w.excluded.push_back(ticker);
      continue;
    }
    kept.push_back(static_cast<Index>(j));
    raw.push_back(ind->middleRows(start, n + 1));
  }
  if (kept.empty()) {
    throw Error(ErrorCode::EmptyUniverse, format_date(window_end),
                "no ticker has enough indicator history");
  }
  std::sort(w.excluded.begin(), w.excluded.end());

  const Index m = static_cast<Index>(kept.size());
  w.prices.resize(n + 1, m);
  w.panel.returns.resize(n, m);
  std::vector<Matrix> lagged;
  for (Index i = 0; i < m; ++i) {
    const Index j = kept[static_cast<std::size_t>(i)];
    w.tickers.push_back(rp.tickers[static_cast<std::size_t>(j)]);
    w.prices.col(i) = rp.prices.col(j);
    w.panel.returns.col(i) = rp.returns.col(j);
    lagged.push_back(raw[static_cast<std::size_t>(i)].topRows(n));
  }
  const FeatureScaling scaling = fit_feature_scaling(lagged);
  w.panel.asset_features = apply_feature_scaling(scaling, lagged);
  w.panel.dates = rp.dates;
  for (Index i = 0; i < m; ++i) {
    const Matrix& r = raw[static_cast<std::size_t>(i)];
    w.current_features.push_back(scaling.apply(i, r.row(n).transpose()));
  }
  w.last_prices = w.prices.row(n).transpose();
  return w;
}

MarketModel HyperparameterEstimate::market_model() const {
  MarketModel model;
  model.sigma = sigma_used.matrix;
  model.prior_mean = theta0;
  model.prior_cov = sigma0;
  model.tau = tau;
  model.delta = delta;
  return model;
}

FeatureSpec HyperparameterEstimate::feature_spec() const {
  return FeatureSpec(current_features, omega_f.matrix);
}

RegressionParams HyperparameterEstimate::regression() const {
  RegressionParams reg;
  reg.alpha_f = alpha_f;
  reg.beta_f = beta_f;
  reg.alpha = alpha;
  reg.beta = beta;
  reg.gamma = 1.0;
  return reg;
}

HyperparameterEstimate estimate_hyperparameters(const EstimationWindow& window,
                                                const HyperparameterOptions& options) {
  const ObservationPanel& panel = window.panel;
  const Index m = panel.assets();
  const Index d = panel.per_asset_dim();

  HyperparameterEstimate est;
  est.window_start = window.dates.front();
  est.window_end = window.window_end;
  est.observations = panel.observations();
  est.per_asset_dim = d;
  est.tickers = window.tickers;
  est.excluded = window.excluded;
  est.tau = options.tau;
  est.delta = options.delta;
  est.current_features = window.current_features;

  const Moments mom = sample_moments(panel.returns);
  est.sample_mean = mom.mean;
  est.sigma = mom.cov;
  est.sigma_used = ridge_if_singular(mom.cov);
  est.sigma0 = options.tau * est.sigma_used.matrix;
  if (options.prior == PriorMode::ReverseOptimization) {
    const Vector w_cap = options.w_cap.size() == 0
                             ? Vector::Constant(m, 1.0 / static_cast<double>(m))
                             : options.w_cap;
    est.theta0 = reverse_optimize(options.delta, est.sigma_used.matrix, est.sigma0, w_cap);
  } else {
    est.theta0 = mom.mean;
  }

  if (options.regress_on == RegressOn::Returns) {
    const ErrorMatrixEstimate em = error_matrix(panel, options.rank_policy);
    est.bandwidth = em.bandwidth;
    est.scaled_var = em.scaled_var;
    est.dropped = em.dropped;
    est.omega_f_raw = em.omega_f;
    est.omega_f = ridge_if_singular(em.omega_f);
    const GlsFit theta_fit =
        gls_fit(panel, est.omega_f.matrix + est.sigma_used.matrix, options.rank_policy);
    const GlsFit view_fit = gls_fit(panel, est.omega_f.matrix, options.rank_policy);
    est.alpha_f = theta_fit.alpha;
    est.beta_f = theta_fit.beta;
    est.alpha = view_fit.alpha;
    est.beta = view_fit.beta;
    return est;
  }

  // Price-level target: fit in price units, then rescale by the last prices
  // so that P̂/p − 1 is the implied return.
  ObservationPanel levels = panel;
  levels.returns = window.prices.bottomRows(panel.observations());
  const Vector& p = window.last_prices;
  const Vector p_inv = p.cwiseInverse();
  const ErrorMatrixEstimate em = error_matrix(levels, options.rank_policy);
  est.bandwidth = em.bandwidth;
  est.scaled_var = em.scaled_var;
  est.dropped = em.dropped;
  est.omega_f_raw = linalg::symmetrize(p_inv.asDiagonal() * em.omega_f * p_inv.asDiagonal());
  est.omega_f = ridge_if_singular(est.omega_f_raw);
  const Matrix omega_price = p.asDiagonal() * est.omega_f.matrix * p.asDiagonal();
  const Matrix sigma_price = p.asDiagonal() * est.sigma_used.matrix * p.asDiagonal();
  const GlsFit theta_fit = gls_fit(levels, omega_price + sigma_price, options.rank_policy);
  const GlsFit view_fit = gls_fit(levels, omega_price, options.rank_policy);
  auto to_returns = [&](const GlsFit& fit, Vector& alpha, Vector& beta) {
    alpha = fit.alpha.cwiseProduct(p_inv).array() - 1.0;
    beta = fit.beta;
    for (Index i = 0; i < m; ++i) beta.segment(i * d, d) *= p_inv(i);
  };
  to_returns(theta_fit, est.alpha_f, est.beta_f);
  to_returns(view_fit, est.alpha, est.beta);
  return est;
}

}  // namespace blat
