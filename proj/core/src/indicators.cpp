#include "blat/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blat/errors.hpp"

namespace blat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string bar_subject(const OhlcvSeries& series, const OhlcvBar& bar) {
  return series.ticker + " " + format_date(bar.date);
}

// Exponential moving average seeded by the simple mean of the first `window`
// inputs that are defined (NaN inputs are skipped while seeding).
std::vector<double> ema(const std::vector<double>& x, int window) {
  std::vector<double> out(x.size(), kNaN);
  const double k = 2.0 / (window + 1.0);
  double sum = 0.0;
  int seen = 0;
  double value = kNaN;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (std::isnan(x[t])) continue;
    if (seen < window) {
      sum += x[t];
      if (++seen == window) value = sum / window;
      else continue;
    } else {
      value += k * (x[t] - value);
    }
    out[t] = value;
  }
  return out;
}

}  // namespace

void validate_series(const OhlcvSeries& series) {
  for (std::size_t t = 0; t < series.bars.size(); ++t) {
    const OhlcvBar& b = series.bars[t];
    const bool finite = std::isfinite(b.open) && std::isfinite(b.high) && std::isfinite(b.low) &&
                        std::isfinite(b.close) && std::isfinite(b.adj_close) &&
                        std::isfinite(b.volume);
    if (!finite || b.low <= 0.0 || b.adj_close <= 0.0) {
      throw Error(ErrorCode::InvariantViolation, bar_subject(series, b), "prices must be positive");
    }
    if (b.high < std::max(b.open, b.close) || b.low > std::min(b.open, b.close)) {
      throw Error(ErrorCode::InvariantViolation, bar_subject(series, b),
                  "high/low do not bound open and close");
    }
    if (b.volume < 0.0) {
      throw Error(ErrorCode::InvariantViolation, bar_subject(series, b), "negative volume");
    }
    if (t > 0 && !(series.bars[t - 1].date < b.date)) {
      throw Error(ErrorCode::InvariantViolation, bar_subject(series, b),
                  "dates must be strictly increasing");
    }
  }
}

int IndicatorConfig::warmup() const noexcept {
  return std::max({macd_slow + macd_signal, sma_window, bb_window, 2 * adx_window,
                   atr_window + 1, rsi_window + 1, ema_window});
}

Matrix compute_indicator_series(const OhlcvSeries& series, const IndicatorConfig& config) {
  const auto n = series.bars.size();
  std::vector<double> open(n), high(n), low(n), close(n), volume(n);
  for (std::size_t t = 0; t < n; ++t) {
    const OhlcvBar& b = series.bars[t];
    const double f = config.adjust_prices && b.close > 0.0 ? b.adj_close / b.close : 1.0;
    open[t] = b.open * f;
    high[t] = b.high * f;
    low[t] = b.low * f;
    close[t] = b.close * f;
    volume[t] = b.volume;
  }

  Matrix out = Matrix::Constant(static_cast<Index>(n), kIndicatorCount, kNaN);
  if (n == 0) return out;

  // ATR: Wilder average of the true range, seeded by the mean of the first window.
  {
    const int w = config.atr_window;
    double sum = 0.0;
    double atr = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      const double tr = std::max({high[t] - low[t], std::abs(high[t] - close[t - 1]),
                                  std::abs(low[t] - close[t - 1])});
      if (t <= static_cast<std::size_t>(w)) {
        sum += tr;
        if (t < static_cast<std::size_t>(w)) continue;
        atr = sum / w;
      } else {
        atr = (atr * (w - 1) + tr) / w;
      }
      out(static_cast<Index>(t), 0) = atr;
    }
  }

  // ADX: Wilder-smoothed TR and ±DM give ±DI, DX; ADX is the Wilder average of DX.
  {
    const int w = config.adx_window;
    double tr_s = 0.0, plus_s = 0.0, minus_s = 0.0;
    double dx_sum = 0.0;
    double adx = 0.0;
    int dx_seen = 0;
    for (std::size_t t = 1; t < n; ++t) {
      const double tr = std::max({high[t] - low[t], std::abs(high[t] - close[t - 1]),
                                  std::abs(low[t] - close[t - 1])});
      const double up = high[t] - high[t - 1];
      const double down = low[t - 1] - low[t];
      const double plus_dm = up > down && up > 0.0 ? up : 0.0;
      const double minus_dm = down > up && down > 0.0 ? down : 0.0;
      if (t <= static_cast<std::size_t>(w)) {
        tr_s += tr / w;
        plus_s += plus_dm / w;
        minus_s += minus_dm / w;
        if (t < static_cast<std::size_t>(w)) continue;
      } else {
        tr_s = (tr_s * (w - 1) + tr) / w;
        plus_s = (plus_s * (w - 1) + plus_dm) / w;
        minus_s = (minus_s * (w - 1) + minus_dm) / w;
      }
      const double plus_di = tr_s > 0.0 ? 100.0 * plus_s / tr_s : 0.0;
      const double minus_di = tr_s > 0.0 ? 100.0 * minus_s / tr_s : 0.0;
      const double di_sum = plus_di + minus_di;
      const double dx = di_sum > 0.0 ? 100.0 * std::abs(plus_di - minus_di) / di_sum : 0.0;
      if (dx_seen < w) {
        dx_sum += dx;
        if (++dx_seen < w) continue;
        adx = dx_sum / w;
      } else {
        adx = (adx * (w - 1) + dx) / w;
      }
      out(static_cast<Index>(t), 1) = adx;
    }
  }

  // EMA and the MACD line.
  {
    const auto e = ema(close, config.ema_window);
    const auto fast = ema(close, config.macd_fast);
    const auto slow = ema(close, config.macd_slow);
    std::vector<double> line(n, kNaN);
    for (std::size_t t = 0; t < n; ++t) {
      out(static_cast<Index>(t), 2) = e[t];
      if (!std::isnan(slow[t])) line[t] = fast[t] - slow[t];
    }
    // The signal line only gates validity; the feature is the MACD line.
    const auto signal = ema(line, config.macd_signal);
    for (std::size_t t = 0; t < n; ++t) {
      if (!std::isnan(signal[t])) out(static_cast<Index>(t), 3) = line[t];
    }
  }

  // SMA and Bollinger bands (population standard deviation).
  {
    auto rolling = [&](int w, auto&& emit) {
      for (std::size_t t = static_cast<std::size_t>(w) - 1; t < n; ++t) {
        double mean = 0.0;
        for (int j = 0; j < w; ++j) mean += close[t - j];
        mean /= w;
        double ss = 0.0;
        for (int j = 0; j < w; ++j) ss += (close[t - j] - mean) * (close[t - j] - mean);
        emit(static_cast<Index>(t), mean, std::sqrt(ss / w));
      }
    };
    rolling(config.sma_window, [&](Index t, double mean, double) { out(t, 4) = mean; });
    rolling(config.bb_window, [&](Index t, double mean, double sd) {
      out(t, 6) = mean + config.bb_width * sd;
      out(t, 7) = mean - config.bb_width * sd;
    });
  }

  // RSI with Wilder-smoothed gains and losses.
  {
    const int w = config.rsi_window;
    double gain = 0.0, loss = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
      const double change = close[t] - close[t - 1];
      const double g = std::max(change, 0.0);
      const double l = std::max(-change, 0.0);
      if (t <= static_cast<std::size_t>(w)) {
        gain += g / w;
        loss += l / w;
        if (t < static_cast<std::size_t>(w)) continue;
      } else {
        gain = (gain * (w - 1) + g) / w;
        loss = (loss * (w - 1) + l) / w;
      }
      double rsi = 50.0;
      if (loss > 0.0) rsi = 100.0 - 100.0 / (1.0 + gain / loss);
      else if (gain > 0.0) rsi = 100.0;
      out(static_cast<Index>(t), 5) = rsi;
    }
  }

  // OBV, min-max normalized over the trailing window.
  {
    std::vector<double> obv(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) {
      const double sign = close[t] > close[t - 1] ? 1.0 : (close[t] < close[t - 1] ? -1.0 : 0.0);
      obv[t] = obv[t - 1] + sign * volume[t];
    }
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t first =
          config.obv_window > 0 && t + 1 > static_cast<std::size_t>(config.obv_window)
              ? t + 1 - static_cast<std::size_t>(config.obv_window)
              : 0;
      const auto [lo, hi] = std::minmax_element(obv.begin() + first, obv.begin() + t + 1);
      out(static_cast<Index>(t), 8) = *hi > *lo ? (obv[t] - *lo) / (*hi - *lo) : 0.5;
    }
  }

  const Index warm = std::min<Index>(config.warmup() - 1, static_cast<Index>(n));
  out.topRows(warm).setConstant(kNaN);
  return out;
}

IndicatorVector compute_indicators(const OhlcvSeries& series, Date asof,
                                   const IndicatorConfig& config) {
  const auto end = std::upper_bound(series.bars.begin(), series.bars.end(), asof,
                                    [](Date d, const OhlcvBar& b) { return d < b.date; });
  const auto rows = static_cast<int>(end - series.bars.begin());
  if (rows < config.warmup()) {
    throw Error(ErrorCode::InsufficientHistory, series.ticker,
                "need " + std::to_string(config.warmup()) + " rows on or before " +
                    format_date(asof) + ", have " + std::to_string(rows));
  }
  OhlcvSeries head{series.ticker, std::vector<OhlcvBar>(series.bars.begin(), end)};
  const Matrix all = compute_indicator_series(head, config);
  IndicatorVector v;
  v.date = head.bars.back().date;
  v.values = all.row(all.rows() - 1).transpose();
  v.valid = v.values.allFinite();
  return v;
}

}  // namespace blat
