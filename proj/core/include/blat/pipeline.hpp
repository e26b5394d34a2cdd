#pragma once

#include <map>
#include <string>
#include <vector>

#include "blat/hyper.hpp"
#include "blat/indicators.hpp"
#include "blat/market_data.hpp"
#include "blat/types.hpp"

namespace blat {

/// Regression target for the feature fits: simple returns, or adjusted price
/// levels converted back to return units after fitting.
enum class RegressOn { Returns, Prices };

/// Prior mean: the window's sample mean, or reverse optimization from w_cap.
enum class PriorMode { SampleMean, ReverseOptimization };

struct HyperparameterOptions {
  double tau = 0.05;
  double delta = 1.0;
  RegressOn regress_on = RegressOn::Returns;
  RankPolicy rank_policy = RankPolicy::MinimumNorm;
  PriorMode prior = PriorMode::SampleMean;
  Vector w_cap;  // reverse-optimization weights; empty means equal weights
  IndicatorConfig indicators;
};

/// Indicator series per ticker, row-aligned with the ticker's bars.
using IndicatorCache = std::map<std::string, Matrix>;

IndicatorCache compute_indicator_cache(const SeriesMap& series, const IndicatorConfig& config);

/// One estimation window. Row l pairs the return (or price) on dates[l] with
/// the standardized indicators as of the previous trading day.
struct EstimationWindow {
  Date window_end;
  std::vector<std::string> tickers;
  std::vector<std::string> excluded;  // incomplete prices or indicator history
  std::vector<Date> dates;
  ObservationPanel panel;
  Matrix prices;                      // adjusted closes, (n + 1) × m
  Vector last_prices;                 // adjusted closes at window_end
  std::vector<Vector> current_features;  // standardized indicators at window_end
};

/// Builds the window ending at `window_end` with `window_len` return rows.
/// The indicator OBV window is set to window_len. `cache`, when given, must
/// have been computed with the same indicator configuration.
EstimationWindow build_estimation_window(const SeriesMap& series,
                                         const std::vector<std::string>& universe,
                                         Date window_end, Index window_len,
                                         const HyperparameterOptions& options,
                                         const IndicatorCache* cache = nullptr);

/// Every quantity of the hyperparameter pipeline, in return units.
struct HyperparameterEstimate {
  Date window_start;
  Date window_end;
  Index observations = 0;
  Index per_asset_dim = 0;
  std::vector<std::string> tickers;
  std::vector<std::string> excluded;

  Vector sample_mean;
  Matrix sigma;       // sample covariance as estimated
  RidgedMatrix sigma_used;  // Σ after the singularity ridge
  Vector theta0;
  Matrix sigma0;      // τ·Σ (ridged)
  double tau = 0.0;
  double delta = 0.0;

  double bandwidth = 0.0;
  Vector scaled_var;            // H̃ diagonal
  Matrix omega_f_raw;           // Ω̂^F before the ridge
  RidgedMatrix omega_f;
  Vector alpha_f;               // θ ↔ F fit with weight Ω̂^F + Σ
  Vector beta_f;
  Vector alpha;                 // q ↔ F fit with weight Ω̂^F
  Vector beta;
  std::vector<bool> dropped;    // zero-variance feature columns

  std::vector<Vector> current_features;

  MarketModel market_model() const;
  FeatureSpec feature_spec() const;
  RegressionParams regression() const;
};

HyperparameterEstimate estimate_hyperparameters(const EstimationWindow& window,
                                                const HyperparameterOptions& options);

}  // namespace blat
