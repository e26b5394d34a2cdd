#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blat/market_data.hpp"
#include "blat/pipeline.hpp"

namespace blat {

enum class ModelKind { EqualWeight, Markowitz, SlpBl, FivBl };

/// Covariance handed to the optimizer: the predictive Σ + G⁻¹ or the
/// posterior G⁻¹ of the latent mean.
enum class CovarianceMode { Predictive, Posterior };

struct BacktestConfig {
  ModelKind model = ModelKind::SlpBl;
  Index window_len = 100;
  double tau = 0.05;
  double delta = 1.0;
  std::uint64_t seed = 0;
  RegressOn regress_on = RegressOn::Returns;
  CovarianceMode covariance_mode = CovarianceMode::Predictive;
  double risk_free_rate = 0.0;
  std::optional<Date> start_date;  // first allocation on or after this day
  std::optional<Date> end_date;    // last day of the wealth path
  /// Worker threads for per-rebalance estimation; 0 picks the hardware count.
  unsigned threads = 0;
};

struct RebalanceRecord {
  Date date;
  std::vector<std::string> tickers;
  Vector weights;
  std::vector<std::string> excluded;
  bool fallback = false;  // optimizer returned minimum variance
  bool ridge = false;     // Σ or Ω̂^F needed the singularity ridge
  double turnover = 0.0;  // ½·L1 against drifted weights; 0 for the first
};

struct BacktestMetrics {
  double cumulative_return = 0.0;
  double cagr = 0.0;
  double sharpe = 0.0;
  double max_drawdown = 0.0;
  double volatility = 0.0;
  double avg_turnover = 0.0;  // percent
};

struct BacktestReport {
  std::vector<RebalanceRecord> rebalances;
  std::vector<Date> dates;
  std::vector<double> wealth;
  BacktestMetrics metrics;
};

/// Monthly rebalancing on the first trading day of each month. Weights are
/// estimated from the window ending at the rebalance close and held from the
/// next trading day, drifting with daily returns. Module errors are rethrown
/// with the rebalance date in their detail.
BacktestReport run_backtest(const BacktestConfig& config, const SeriesMap& data,
                            const MembershipCalendar& calendar);

/// wᵢ(1 + rᵢ) / Σⱼ wⱼ(1 + rⱼ). Throws Bankrupt when the denominator is not positive.
Vector drift_weights(const Vector& w, const Vector& period_returns);

/// ½·Σ|w_new − w_drifted|.
double turnover(const Vector& w_new, const Vector& w_drifted);

/// Metric suite of a wealth path; `turnovers` lists the per-rebalance values
/// that enter the average (the initial allocation excluded).
BacktestMetrics compute_metrics(const std::vector<Date>& dates, const std::vector<double>& wealth,
                                const std::vector<double>& turnovers);

/// Optimizer inputs for one estimation window.
struct ModelInputs {
  Vector mean;
  Matrix cov;
  bool ridge = false;
};

ModelInputs model_inputs(const BacktestConfig& config, const EstimationWindow& window);

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

}  // namespace blat
