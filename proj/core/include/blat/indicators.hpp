#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "blat/date.hpp"
#include "blat/linalg.hpp"

namespace blat {

struct OhlcvBar {
  Date date;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double adj_close = 0.0;
  double volume = 0.0;
};

/// Daily bars of one ticker with strictly increasing dates.
struct OhlcvSeries {
  std::string ticker;
  std::vector<OhlcvBar> bars;
};

/// Throws InvariantViolation(ticker date) for a bar with high < max(open, close),
/// low > min(open, close), negative volume, non-positive prices or a date
/// out of order.
void validate_series(const OhlcvSeries& series);

inline constexpr Index kIndicatorCount = 9;

/// Feature order used everywhere a per-asset feature vector appears.
inline constexpr std::array<std::string_view, kIndicatorCount> kIndicatorNames = {
    "atr", "adx", "ema", "macd", "sma", "rsi", "bb_upper", "bb_lower", "obv_norm"};

struct IndicatorConfig {
  int atr_window = 14;
  int adx_window = 14;
  int ema_window = 14;
  int macd_fast = 12;
  int macd_slow = 26;
  int macd_signal = 9;
  int sma_window = 20;
  int rsi_window = 14;
  int bb_window = 20;
  double bb_width = 2.0;
  /// Trailing rows over which OBV is min-max normalized; 0 uses all rows so far.
  int obv_window = 0;
  /// Scale open/high/low/close by adj_close/close before computing.
  bool adjust_prices = true;

  /// Rows needed before every indicator is defined (MACD slow + signal).
  int warmup() const noexcept;
};

/// One pass over the series. Row t holds the indicators as of bars[t]; rows
/// before the warm-up are NaN.
Matrix compute_indicator_series(const OhlcvSeries& series, const IndicatorConfig& config = {});

struct IndicatorVector {
  Date date;
  Vector values;  // kIndicatorCount entries in kIndicatorNames order
  bool valid = false;
};

/// Indicators as of the last bar dated on or before `asof`.
/// Throws InsufficientHistory(ticker) with fewer than warmup() such bars.
IndicatorVector compute_indicators(const OhlcvSeries& series, Date asof,
                                   const IndicatorConfig& config = {});

}  // namespace blat
