#include "blat/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "blat/errors.hpp"
#include "blat/fiv.hpp"
#include "blat/optimizer.hpp"
#include "blat/posterior.hpp"

namespace blat {

namespace {

constexpr double kTradingDays = 252.0;

unsigned month_key(Date d) {
  const std::chrono::year_month_day ymd{d};
  return static_cast<unsigned>(static_cast<int>(ymd.year()) * 12) +
         static_cast<unsigned>(ymd.month());
}

HyperparameterOptions pipeline_options(const BacktestConfig& config) {
  HyperparameterOptions options;
  options.tau = config.tau;
  options.delta = config.delta;
  options.regress_on = config.regress_on;
  options.rank_policy = RankPolicy::MinimumNorm;
  options.indicators.obv_window = static_cast<int>(config.window_len);
  return options;
}

Error annotate(const Error& e, Date date) {
  return Error(e.code(), e.subject(), "rebalance " + format_date(date) + ": " + e.detail());
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::EqualWeight: return "equal_weight";
    case ModelKind::Markowitz: return "markowitz";
    case ModelKind::SlpBl: return "slp_bl";
    case ModelKind::FivBl: return "fiv_bl";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& text) {
  for (auto kind : {ModelKind::EqualWeight, ModelKind::Markowitz, ModelKind::SlpBl, ModelKind::FivBl}) {
    if (text == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::ConfigError, "model",
              "unknown model '" + text + "' (equal_weight, markowitz, slp_bl, fiv_bl)");
}

Vector drift_weights(const Vector& w, const Vector& period_returns) {
  linalg::require_size(period_returns, w.size(), "period_returns");
  const Vector grown = w.cwiseProduct((period_returns.array() + 1.0).matrix());
  const double total = grown.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::Bankrupt, "portfolio", "wealth is no longer positive");
  return grown / total;
}

double turnover(const Vector& w_new, const Vector& w_drifted) {
  linalg::require_size(w_drifted, w_new.size(), "w_drifted");
  return 0.5 * (w_new - w_drifted).cwiseAbs().sum();
}

BacktestMetrics compute_metrics(const std::vector<Date>& dates, const std::vector<double>& wealth,
                                const std::vector<double>& turnovers) {
  const std::size_t n = wealth.size();
  if (n < 2 || dates.size() != n) {
    throw Error(ErrorCode::InsufficientData, "wealth", "need at least 2 dated wealth points");
  }
  BacktestMetrics m;
  const double growth = wealth.back() / wealth.front();
  m.cumulative_return = growth - 1.0;
  const double days = static_cast<double>((dates.back() - dates.front()).count());
  m.cagr = days > 0.0 ? std::pow(growth, 365.25 / days) - 1.0 : 0.0;

  std::vector<double> r(n - 1);
  for (std::size_t t = 1; t < n; ++t) r[t - 1] = wealth[t] / wealth[t - 1] - 1.0;
  double mean = 0.0;
  for (double x : r) mean += x;
  mean /= static_cast<double>(r.size());
  double ss = 0.0;
  for (double x : r) ss += (x - mean) * (x - mean);
  const double sd = r.size() > 1 ? std::sqrt(ss / static_cast<double>(r.size() - 1)) : 0.0;
  m.volatility = sd * std::sqrt(kTradingDays);
  m.sharpe = m.volatility > 0.0 ? mean * kTradingDays / m.volatility : 0.0;

  double peak = wealth.front();
  for (double w : wealth) {
    peak = std::max(peak, w);
    m.max_drawdown = std::max(m.max_drawdown, 1.0 - w / peak);
  }
  if (!turnovers.empty()) {
    double total = 0.0;
    for (double t : turnovers) total += t;
    m.avg_turnover = 100.0 * total / static_cast<double>(turnovers.size());
  }
  return m;
}

ModelInputs model_inputs(const BacktestConfig& config, const EstimationWindow& window) {
  const HyperparameterOptions options = pipeline_options(config);
  ModelInputs in;
  const Index m = static_cast<Index>(window.tickers.size());
  switch (config.model) {
    case ModelKind::EqualWeight:
      in.mean = Vector::Zero(m);
      in.cov = Matrix::Identity(m, m);
      return in;
    case ModelKind::Markowitz: {
      const Moments mom = sample_moments(window.panel.returns);
      const RidgedMatrix cov = ridge_if_singular(mom.cov);
      in.mean = mom.mean;
      in.cov = cov.matrix;
      in.ridge = cov.applied;
      return in;
    }
    case ModelKind::SlpBl: {
      const HyperparameterEstimate est = estimate_hyperparameters(window, options);
      const MarketModel model = est.market_model();
      const PosteriorGaussian post = slp_posterior(model, est.feature_spec(), est.regression());
      const PredictiveGaussian pred = predictive_from(post, model.sigma);
      in.mean = pred.mean;
      in.cov = config.covariance_mode == CovarianceMode::Predictive ? pred.cov : post.cov;
      in.ridge = est.sigma_used.applied || est.omega_f.applied;
      return in;
    }
    case ModelKind::FivBl: {
      const HyperparameterEstimate est = estimate_hyperparameters(window, options);
      const MarketModel model = est.market_model();
      const FeatureSpec features = est.feature_spec();
      const Matrix pick = Matrix::Identity(m, m);
      // ν′ = m + 2 with the IW mean placed halfway between Σ₀ and Ω̂^F.
      const double nu = static_cast<double>(m) + 2.0;
      const Matrix psi = (nu - static_cast<double>(m) + 1.0) * 0.5 *
                         (model.prior_cov + features.error());
      const ConjugateConfig cfg = make_conjugate_config(model, pick, features, psi, nu);
      const StudentTPredictive t = fiv_conjugate_t(model, pick, est.regression(), features, cfg);
      in.mean = t.location;
      in.cov = t.covariance();
      in.ridge = est.sigma_used.applied || est.omega_f.applied;
      return in;
    }
  }
  return in;
}

BacktestReport run_backtest(const BacktestConfig& config, const SeriesMap& data,
                            const MembershipCalendar& calendar) {
  if (config.window_len < 2) throw Error(ErrorCode::OutOfRange, "window_len", "must be >= 2");

  // Master calendar: union of bar dates over every member present in the data.
  std::vector<std::string> members;
  for (const auto& e : calendar.entries) {
    if (data.count(e.ticker) != 0) members.push_back(e.ticker);
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty()) throw Error(ErrorCode::EmptyUniverse, "data", "no member has price data");
  const Date last_allowed = config.end_date.value_or(Date::max());
  const std::vector<Date> days = trading_calendar(data, members, last_allowed);
  const auto t_count = static_cast<Index>(days.size());

  // Adjusted closes aligned to the calendar; NaN where a ticker has no bar.
  const Index k_count = static_cast<Index>(members.size());
  Matrix adj = Matrix::Constant(t_count, k_count, std::numeric_limits<double>::quiet_NaN());
  std::map<std::string, Index> column;
  for (Index k = 0; k < k_count; ++k) {
    column[members[static_cast<std::size_t>(k)]] = k;
    std::size_t t = 0;
    for (const auto& b : data.at(members[static_cast<std::size_t>(k)]).bars) {
      while (t < days.size() && days[t] < b.date) ++t;
      if (t == days.size()) break;
      if (days[t] == b.date) adj(static_cast<Index>(t), k) = b.adj_close;
    }
  }

  // Rebalance schedule.
  const IndicatorConfig indicator_config = pipeline_options(config).indicators;
  Index first = 0;
  if (config.start_date) {
    first = static_cast<Index>(std::lower_bound(days.begin(), days.end(), *config.start_date) -
                               days.begin());
  } else {
    first = config.window_len + indicator_config.warmup() - 1;
    while (first < t_count && first > 0 && month_key(days[first]) == month_key(days[first - 1])) {
      ++first;
    }
  }
  if (first >= t_count - 1) {
    throw Error(ErrorCode::InsufficientData, "data",
                "no trading day left for a first rebalance with window " +
                    std::to_string(config.window_len));
  }
  std::vector<Index> schedule{first};
  for (Index t = first + 1; t < t_count - 1; ++t) {
    if (month_key(days[t]) != month_key(days[t - 1])) schedule.push_back(t);
  }

  // Estimation is independent across rebalances; run it on a worker pool.
  const IndicatorCache cache = compute_indicator_cache(data, indicator_config);
  const HyperparameterOptions options = pipeline_options(config);
  std::vector<RebalanceRecord> records(schedule.size());
  std::vector<std::exception_ptr> failures(schedule.size());
  auto estimate = [&](std::size_t r) {
    const Date date = days[static_cast<std::size_t>(schedule[r])];
    try {
      RebalanceRecord& rec = records[r];
      rec.date = date;
      const auto universe = active_universe(calendar, date);
      const EstimationWindow window =
          build_estimation_window(data, universe, date, config.window_len, options, &cache);
      rec.tickers = window.tickers;
      rec.excluded = window.excluded;
      const Index m = static_cast<Index>(window.tickers.size());
      if (config.model == ModelKind::EqualWeight) {
        rec.weights = Vector::Constant(m, 1.0 / static_cast<double>(m));
        return;
      }
      const ModelInputs in = model_inputs(config, window);
      SharpeOptions opt;
      opt.risk_free = config.risk_free_rate / kTradingDays;
      opt.seed = config.seed * 1000003ULL + static_cast<std::uint64_t>(r);
      const SharpeResult res = max_sharpe_longonly(in.mean, in.cov, opt);
      rec.weights = res.weights;
      rec.fallback = res.fallback;
      rec.ridge = in.ridge;
    } catch (const Error& e) {
      failures[r] = std::make_exception_ptr(annotate(e, date));
    } catch (...) {
      failures[r] = std::current_exception();
    }
  };
  unsigned workers = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(schedule.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < schedule.size(); r += workers) estimate(r);
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  // Sequential wealth fold.
  BacktestReport report;
  Vector held = Vector::Zero(k_count);
  std::vector<double> turnovers;
  std::size_t next = 0;
  double wealth = 1.0;
  auto allocate = [&](std::size_t r, bool count_turnover) {
    RebalanceRecord& rec = records[r];
    Vector target = Vector::Zero(k_count);
    for (std::size_t i = 0; i < rec.tickers.size(); ++i) {
      target(column.at(rec.tickers[i])) = rec.weights(static_cast<Index>(i));
    }
    if (count_turnover) {
      rec.turnover = turnover(target, held);
      turnovers.push_back(rec.turnover);
    }
    held = target;
  };
  report.dates.push_back(days[static_cast<std::size_t>(first)]);
  report.wealth.push_back(wealth);
  allocate(next++, false);
  std::vector<Index> last_seen(static_cast<std::size_t>(k_count), -1);
  for (Index k = 0; k < k_count; ++k) {
    for (Index t = first; t >= 0; --t) {
      if (!std::isnan(adj(t, k))) {
        last_seen[static_cast<std::size_t>(k)] = t;
        break;
      }
    }
  }
  for (Index t = first + 1; t < t_count; ++t) {
    Vector r = Vector::Zero(k_count);
    for (Index k = 0; k < k_count; ++k) {
      if (std::isnan(adj(t, k))) continue;
      const Index prev = last_seen[static_cast<std::size_t>(k)];
      if (prev >= 0) r(k) = adj(t, k) / adj(prev, k) - 1.0;
      last_seen[static_cast<std::size_t>(k)] = t;
    }
    const double day_return = held.dot(r);
    wealth *= 1.0 + day_return;
    if (!(wealth > 0.0)) {
      throw Error(ErrorCode::Bankrupt, "portfolio", "wealth reached zero on " + format_date(days[static_cast<std::size_t>(t)]));
    }
    held = drift_weights(held, r);
    report.dates.push_back(days[static_cast<std::size_t>(t)]);
    report.wealth.push_back(wealth);
    if (next < schedule.size() && schedule[next] == t) allocate(next++, true);
  }
  report.rebalances = std::move(records);
  report.metrics = compute_metrics(report.dates, report.wealth, turnovers);
  if (config.risk_free_rate != 0.0 && report.metrics.volatility > 0.0) {
    report.metrics.sharpe -= config.risk_free_rate / report.metrics.volatility;
  }
  return report;
}

}  // namespace blat
