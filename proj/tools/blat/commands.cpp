#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "blat/errors.hpp"
#include "blat/fiv.hpp"
#include "blat/market_data.hpp"
#include "blat/pipeline.hpp"
#include "blat/posterior.hpp"
#include "blat/report_io.hpp"

namespace blat::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kBacktestKeys = {
    "model",          "window_len", "tau",        "delta",    "seed",     "regress_on",
    "covariance_mode", "rebalance", "start_date", "end_date", "risk_free_rate", "threads"};

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, (dir / name).string(), "cannot write file");
  return out;
}

MarketModel market_model(const Config& cfg) {
  MarketModel model;
  model.sigma = cfg.matrix("sigma");
  model.prior_mean = cfg.vector("prior_mean");
  model.tau = cfg.number_or("tau", 1.0);
  model.delta = cfg.number_or("delta", 1.0);
  model.prior_cov = cfg.has("prior_cov") ? cfg.matrix("prior_cov") : Matrix(model.tau * model.sigma);
  return model;
}

FeatureSpec feature_spec(const Config& cfg) {
  const Matrix f = cfg.matrix("features");
  std::vector<Vector> rows;
  for (Index i = 0; i < f.rows(); ++i) rows.emplace_back(f.row(i).transpose());
  return FeatureSpec(std::move(rows), cfg.matrix("omega_f"));
}

RegressionParams regression(const Config& cfg, Index m, Index dm) {
  RegressionParams reg = RegressionParams::classical(m, dm);
  if (cfg.has("alpha_f")) reg.alpha_f = cfg.vector("alpha_f");
  if (cfg.has("beta_f")) reg.beta_f = cfg.vector("beta_f");
  if (cfg.has("alpha")) reg.alpha = cfg.vector("alpha");
  if (cfg.has("beta")) reg.beta = cfg.vector("beta");
  reg.gamma = cfg.number_or("gamma", 1.0);
  return reg;
}

std::uint64_t seed_from(const Config& cfg) {
  if (const char* env = std::getenv("BLAT_SEED"); env != nullptr && *env != '\0') {
    Config tmp;
    tmp.set("BLAT_SEED", env);
    return static_cast<std::uint64_t>(tmp.integer("BLAT_SEED"));
  }
  return cfg.has("seed") ? static_cast<std::uint64_t>(cfg.integer("seed")) : 0;
}

void write_gaussian(LongTable& table, const PosteriorGaussian& post, const Matrix& sigma) {
  const PredictiveGaussian pred = predictive_from(post, sigma);
  table.vector("mean", post.mean);
  table.matrix("cov", post.cov);
  table.matrix("precision", post.precision);
  table.vector("predictive_mean", pred.mean);
  table.matrix("predictive_cov", pred.cov);
}

}  // namespace

BacktestConfig backtest_config(const Config& cfg) {
  cfg.require_known(kBacktestKeys);
  BacktestConfig bc;
  bc.model = parse_model_kind(cfg.text_or("model", "slp_bl"));
  if (cfg.has("window_len")) bc.window_len = static_cast<Index>(cfg.integer("window_len"));
  bc.tau = cfg.number_or("tau", bc.tau);
  bc.delta = cfg.number_or("delta", bc.delta);
  bc.seed = seed_from(cfg);
  const std::string regress = cfg.text_or("regress_on", "returns");
  if (regress == "returns") bc.regress_on = RegressOn::Returns;
  else if (regress == "prices") bc.regress_on = RegressOn::Prices;
  else throw Error(ErrorCode::ConfigError, "regress_on", "expected returns or prices");
  const std::string mode = cfg.text_or("covariance_mode", "predictive");
  if (mode == "predictive") bc.covariance_mode = CovarianceMode::Predictive;
  else if (mode == "posterior") bc.covariance_mode = CovarianceMode::Posterior;
  else throw Error(ErrorCode::ConfigError, "covariance_mode", "expected predictive or posterior");
  if (cfg.text_or("rebalance", "monthly") != "monthly") {
    throw Error(ErrorCode::ConfigError, "rebalance", "only monthly rebalancing is supported");
  }
  bc.risk_free_rate = cfg.number_or("risk_free_rate", 0.0);
  if (cfg.has("start_date")) bc.start_date = parse_date(cfg.text("start_date"));
  if (cfg.has("end_date")) bc.end_date = parse_date(cfg.text("end_date"));
  if (cfg.has("threads")) bc.threads = static_cast<unsigned>(cfg.integer("threads"));
  if (bc.window_len < 2) throw Error(ErrorCode::ConfigError, "window_len", "must be >= 2");
  return bc;
}

void cmd_posterior(const std::string& model, const Config& cfg, const fs::path& out_dir,
                   std::ostream& log) {
  std::set<std::string> keys = {"sigma", "prior_mean", "prior_cov", "tau", "delta"};
  if (model == "blb") {
    keys.insert({"pick", "views", "omega"});
  } else if (model == "mbl") {
    keys.insert({"pick", "views", "omega", "features", "omega_f", "alpha_f", "beta_f", "alpha",
                 "beta", "gamma"});
  } else if (model == "slp") {
    keys.insert({"features", "omega_f", "alpha_f", "beta_f"});
  } else if (model == "fiv") {
    keys.insert({"pick", "features", "omega_f", "alpha", "beta", "omega_prior", "omega0",
                 "iw_scale", "iw_dof", "samples", "seed", "psi_prime", "nu_prime"});
  } else {
    throw Error(ErrorCode::ConfigError, "model", "expected blb, mbl, slp or fiv");
  }
  cfg.require_known(keys);

  const MarketModel mm = market_model(cfg);
  const Index m = mm.size();
  auto out = open_output(out_dir, "posterior.csv");
  LongTable table(out);
  table.text("model", model);

  if (model == "blb") {
    const ViewSpec views(cfg.matrix("pick"), cfg.vector("views"), cfg.vector("omega"));
    write_gaussian(table, blb_posterior(mm, views), mm.sigma);
  } else if (model == "mbl") {
    const ViewSpec views(cfg.matrix("pick"), cfg.vector("views"), cfg.vector("omega"));
    const FeatureSpec features = feature_spec(cfg);
    write_gaussian(table,
                   mbl_posterior(mm, views, features, regression(cfg, m, features.stacked_dim())),
                   mm.sigma);
  } else if (model == "slp") {
    const FeatureSpec features = feature_spec(cfg);
    write_gaussian(table, slp_posterior(mm, features, regression(cfg, m, features.stacked_dim())),
                   mm.sigma);
  } else {
    const Matrix pick = cfg.matrix("pick");
    const FeatureSpec features = feature_spec(cfg);
    const RegressionParams reg = regression(cfg, m, features.stacked_dim());
    const std::string prior = cfg.text_or("omega_prior", "point_mass");
    if (prior == "point_mass") {
      const PosteriorGaussian c = fiv_component(mm, pick, reg, features, cfg.vector("omega0"));
      table.vector("mean", c.mean);
      table.matrix("cov", c.cov);
      table.matrix("precision", c.precision);
    } else if (prior == "inverse_wishart") {
      const InverseWishartOmega iw{cfg.matrix("iw_scale"), cfg.number("iw_dof")};
      const auto samples = static_cast<Index>(cfg.has("samples") ? cfg.integer("samples") : 100000);
      const SampleMoments mc =
          fiv_mixture_mc(mm, pick, reg, features, OmegaPrior{iw}, samples, seed_from(cfg));
      table.vector("mean", mc.mean);
      table.matrix("cov", mc.cov);
      table.vector("standard_error", mc.standard_errors());
      table.scalar("samples", static_cast<double>(mc.samples));
    } else if (prior == "conjugate") {
      const ConjugateConfig defaults = niw_defaults(m);
      Matrix psi = cfg.has("psi_prime") ? cfg.matrix("psi_prime") : defaults.psi_prime;
      const double nu = cfg.number_or("nu_prime", defaults.nu_prime);
      ConjugateConfig cc;
      if (cfg.has("omega0")) {
        cc = ConjugateConfig{std::move(psi), nu, cfg.vector("omega0")};
      } else {
        cc = make_conjugate_config(mm, pick, features, std::move(psi), nu);
      }
      const StudentTPredictive t = fiv_conjugate_t(mm, pick, reg, features, cc);
      table.vector("location", t.location);
      table.matrix("scale", t.scale);
      table.scalar("dof", t.dof);
      table.scalar("shape_dof", t.shape_dof());
      if (t.shape_dof() > 2.0) table.matrix("covariance", t.covariance());
      table.vector("omega0", cc.omega0);
    } else {
      throw Error(ErrorCode::ConfigError, "omega_prior",
                  "expected point_mass, inverse_wishart or conjugate");
    }
  }
  log << "wrote " << (out_dir / "posterior.csv").string() << '\n';
}

void cmd_backtest(const Config& cfg, const fs::path& prices, const fs::path& members,
                  const fs::path& out_dir, std::ostream& log) {
  const BacktestConfig bc = backtest_config(cfg);
  const SeriesMap data = load_ohlcv(prices);
  const MembershipCalendar calendar = load_membership(members);
  const BacktestReport report = run_backtest(bc, data, calendar);

  {
    auto out = open_output(out_dir, "metrics.csv");
    write_metrics_header(out);
    write_metrics_row(out, to_string(bc.model), bc.window_len, report.metrics);
  }
  {
    auto out = open_output(out_dir, "wealth.csv");
    write_wealth_csv(out, report);
  }
  {
    auto out = open_output(out_dir, "weights.csv");
    write_weights_csv(out, report);
  }
  write_metrics_header(log);
  write_metrics_row(log, to_string(bc.model), bc.window_len, report.metrics);
}

void cmd_estimate(const Config& cfg, const fs::path& prices, long long window,
                  const fs::path& out_dir, std::ostream& log) {
  BacktestConfig bc = backtest_config(cfg);
  if (window > 0) bc.window_len = static_cast<Index>(window);
  if (bc.window_len < 2) throw Error(ErrorCode::ConfigError, "window", "must be >= 2");
  const SeriesMap data = load_ohlcv(prices);
  std::vector<std::string> universe;
  Date last = Date::min();
  for (const auto& [ticker, s] : data) {
    universe.push_back(ticker);
    if (!s.bars.empty() && last < s.bars.back().date) last = s.bars.back().date;
  }
  if (universe.empty()) throw Error(ErrorCode::EmptyUniverse, prices.string(), "no rows");
  const Date end = bc.end_date.value_or(last);

  HyperparameterOptions options;
  options.tau = bc.tau;
  options.delta = bc.delta;
  options.regress_on = bc.regress_on;
  options.indicators.obv_window = static_cast<int>(bc.window_len);
  const EstimationWindow w = build_estimation_window(data, universe, end, bc.window_len, options);
  const HyperparameterEstimate est = estimate_hyperparameters(w, options);
  auto out = open_output(out_dir, "estimate.csv");
  write_estimate_csv(out, est);
  log << "wrote " << (out_dir / "estimate.csv").string() << " (" << est.tickers.size()
      << " tickers, window " << format_date(est.window_start) << " to "
      << format_date(est.window_end) << ")\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian Black-Litterman posteriors, estimation and backtests", "blat"};
  app.require_subcommand(1);

  std::string model, config_path, out_dir, prices_path, members_path;
  long long window = 0;

  auto* posterior = app.add_subcommand("posterior", "Evaluate a posterior from a config");
  posterior->add_option("--model", model, "blb, mbl, slp or fiv")->required();
  posterior->add_option("--config", config_path)->required();
  posterior->add_option("--out", out_dir)->required();

  auto* backtest = app.add_subcommand("backtest", "Run a monthly-rebalanced backtest");
  backtest->add_option("--config", config_path)->required();
  backtest->add_option("--prices", prices_path, "OHLCV CSV")->required();
  backtest->add_option("--members", members_path, "membership CSV")->required();
  backtest->add_option("--out", out_dir)->required();

  auto* estimate = app.add_subcommand("estimate", "Estimate hyperparameters for one window");
  estimate->add_option("--config", config_path)->required();
  estimate->add_option("--prices", prices_path, "OHLCV CSV")->required();
  estimate->add_option("--window", window, "number of return observations");
  estimate->add_option("--out", out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    const Config cfg = Config::load(config_path);
    if (posterior->parsed()) cmd_posterior(model, cfg, out_dir, out);
    else if (backtest->parsed()) cmd_backtest(cfg, prices_path, members_path, out_dir, out);
    else cmd_estimate(cfg, prices_path, window, out_dir, out);
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace blat::cli
