#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "blat/backtest.hpp"
#include "config.hpp"

namespace blat::cli {

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 on success, 2 on any error (message on `err`).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Backtest settings from a config; BLAT_SEED in the environment overrides `seed`.
BacktestConfig backtest_config(const Config& cfg);

/// Writes <out_dir>/posterior.csv in long format.
void cmd_posterior(const std::string& model, const Config& cfg, const std::filesystem::path& out_dir,
                   std::ostream& log);

/// Writes metrics.csv, wealth.csv and weights.csv under out_dir and prints the metrics row.
void cmd_backtest(const Config& cfg, const std::filesystem::path& prices,
                  const std::filesystem::path& members, const std::filesystem::path& out_dir,
                  std::ostream& log);

/// Writes <out_dir>/estimate.csv for the window of `window` returns ending at
/// end_date (or the last date in the file), over every ticker in the file.
void cmd_estimate(const Config& cfg, const std::filesystem::path& prices, long long window,
                  const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace blat::cli
