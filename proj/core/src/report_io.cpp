#include "blat/report_io.hpp"

#include <cstdio>
#include <ostream>

namespace blat {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

LongTable::LongTable(std::ostream& out) : out_(out) { out_ << "quantity,row,col,value\n"; }

void LongTable::scalar(const std::string& quantity, double value) {
  out_ << quantity << ",0,0," << format_number(value) << '\n';
}

void LongTable::text(const std::string& quantity, const std::string& value) {
  out_ << quantity << ",0,0," << value << '\n';
}

void LongTable::vector(const std::string& quantity, const Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    out_ << quantity << ',' << i << ",0," << format_number(v(i)) << '\n';
  }
}

void LongTable::matrix(const std::string& quantity, const Matrix& a) {
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out_ << quantity << ',' << i << ',' << j << ',' << format_number(a(i, j)) << '\n';
    }
  }
}

void LongTable::labels(const std::string& quantity, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    out_ << quantity << ',' << i << ",0," << names[i] << '\n';
  }
}

void write_metrics_header(std::ostream& out) {
  out << "model,window_len,cumulative_return,cagr,sharpe,max_drawdown,volatility,avg_turnover\n";
}

void write_metrics_row(std::ostream& out, const std::string& model, Index window_len,
                       const BacktestMetrics& m) {
  out << model << ',' << window_len << ',' << format_number(m.cumulative_return) << ','
      << format_number(m.cagr) << ',' << format_number(m.sharpe) << ','
      << format_number(m.max_drawdown) << ',' << format_number(m.volatility) << ','
      << format_number(m.avg_turnover) << '\n';
}

void write_wealth_csv(std::ostream& out, const BacktestReport& report) {
  out << "date,wealth\n";
  for (std::size_t t = 0; t < report.wealth.size(); ++t) {
    out << format_date(report.dates[t]) << ',' << format_number(report.wealth[t]) << '\n';
  }
}

void write_weights_csv(std::ostream& out, const BacktestReport& report) {
  out << "date,ticker,weight\n";
  for (const auto& rec : report.rebalances) {
    for (std::size_t i = 0; i < rec.tickers.size(); ++i) {
      out << format_date(rec.date) << ',' << rec.tickers[i] << ','
          << format_number(rec.weights(static_cast<Index>(i))) << '\n';
    }
  }
}

void write_estimate_csv(std::ostream& out, const HyperparameterEstimate& est) {
  LongTable table(out);
  table.text("window_start", format_date(est.window_start));
  table.text("window_end", format_date(est.window_end));
  table.scalar("n", static_cast<double>(est.observations));
  table.scalar("d", static_cast<double>(est.per_asset_dim));
  table.labels("ticker", est.tickers);
  table.labels("excluded", est.excluded);
  table.vector("theta0", est.theta0);
  table.matrix("sigma", est.sigma);
  table.matrix("sigma0", est.sigma0);
  table.scalar("sigma_ridge", est.sigma_used.ridge);
  table.scalar("sigma_ridge_applied", est.sigma_used.applied ? 1.0 : 0.0);
  table.vector("alpha_f", est.alpha_f);
  table.vector("beta_f", est.beta_f);
  table.vector("alpha", est.alpha);
  table.vector("beta", est.beta);
  table.matrix("omega_f", est.omega_f_raw);
  table.scalar("omega_f_ridge", est.omega_f.ridge);
  table.scalar("omega_f_ridge_applied", est.omega_f.applied ? 1.0 : 0.0);
  table.vector("h_tilde", est.scaled_var);
  table.scalar("h", est.bandwidth);
  Vector dropped(static_cast<Index>(est.dropped.size()));
  for (std::size_t i = 0; i < est.dropped.size(); ++i) dropped(static_cast<Index>(i)) = est.dropped[i];
  table.vector("dropped", dropped);
}

}  // namespace blat
