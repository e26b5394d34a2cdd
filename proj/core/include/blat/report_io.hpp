#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "blat/backtest.hpp"
#include "blat/linalg.hpp"
#include "blat/pipeline.hpp"

namespace blat {

/// 12 significant digits, the precision of every numeric CSV field.
std::string format_number(double value);

/// Long-format table writer: `quantity,row,col,value`.
class LongTable {
 public:
  explicit LongTable(std::ostream& out);

  void scalar(const std::string& quantity, double value);
  void text(const std::string& quantity, const std::string& value);
  void vector(const std::string& quantity, const Vector& v);
  void matrix(const std::string& quantity, const Matrix& a);
  void labels(const std::string& quantity, const std::vector<std::string>& names);

 private:
  std::ostream& out_;
};

/// `model,window_len,cumulative_return,cagr,sharpe,max_drawdown,volatility,avg_turnover`.
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const std::string& model, Index window_len,
                       const BacktestMetrics& metrics);

/// `date,wealth`.
void write_wealth_csv(std::ostream& out, const BacktestReport& report);

/// `date,ticker,weight`, one row per held ticker per rebalance.
void write_weights_csv(std::ostream& out, const BacktestReport& report);

/// Every quantity of a hyperparameter estimate in long format, with the window
/// stamps and ridge flags.
void write_estimate_csv(std::ostream& out, const HyperparameterEstimate& est);

}  // namespace blat
