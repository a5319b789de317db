// rrm: command-line front end for estimation, backtesting, synthetic panels
// and diagnostics.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rrm/errors.hpp"
#include "rrm/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

// Flags that map one-to-one onto config keys. They are applied after the
// config file, so the command line wins.
struct Overrides {
  std::vector<std::string> keys;
  std::vector<std::string> storage;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    keys.push_back(key);
    storage.emplace_back();
    // storage is reserved up front, so these references stay valid
    app->add_option(flag, storage.back(), help);
  }

  void apply(rrm::RunConfig& config) const {
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (!storage[i].empty()) config.set(keys[i], storage[i]);
    }
  }
};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

void print_paths(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cout << p << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Intraday-to-daily VaR and ES estimation"};
  app.set_version_flag("--version", rrm::library_version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  app.add_option("--config", config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Base seed");
  app.add_option("--jobs", jobs, "Worker threads");

  Overrides overrides;
  overrides.storage.reserve(32);
  overrides.add(&app, "--output-dir", "output_dir", "Directory for results");

  auto* estimate = app.add_subcommand("estimate", "Estimate daily VaR and ES from minute bars");
  std::vector<std::string> estimate_inputs;
  estimate->add_option("inputs", estimate_inputs, "Minute-bar CSV or exported panel (may be .gz)");
  overrides.add(estimate, "--subordinator", "subordinator", "clock | tpv | vol");
  overrides.add(estimate, "--c", "c", "Subordinated intervals per day");
  overrides.add(estimate, "--drift", "drift", "zero | ema21");
  overrides.add(estimate, "--filter", "filter", "iid | ma1");
  overrides.add(estimate, "--method", "method", "cf | mc | ensemble | dh");
  overrides.add(estimate, "--theta", "theta", "Comma-separated tail levels");
  overrides.add(estimate, "--es-rule", "es_rule", "tail | grid");
  overrides.add(estimate, "--mc-batch", "mc_batch", "Monte Carlo sample size (even)");
  overrides.add(estimate, "--hurst", "hurst", "Scaling exponent for the dh method");

  auto* backtest = app.add_subcommand("backtest", "Evaluate estimate outputs");
  std::vector<std::string> backtest_inputs;
  backtest->add_option("runs", backtest_inputs, "Estimate CSVs written by `estimate`")->required();
  overrides.add(backtest, "--forecaster", "forecaster", "ar1 | ema | rw");
  overrides.add(backtest, "--alpha", "alpha", "EMA forecaster weight");
  overrides.add(backtest, "--n-boot", "n_boot", "Bootstrap replicates for AS1/AS2");
  overrides.add(backtest, "--train-years", "train_years", "Rolling training window");
  overrides.add(backtest, "--test-years", "test_years", "Rolling test window");
  overrides.add(backtest, "--days-per-year", "days_per_year", "Trading days per year");

  auto* synthetic = app.add_subcommand("synthetic", "Write a synthetic panel and its ground truth");
  std::string family = "gaussian";
  std::string dependence = "ma1";
  int syn_c = 39;
  double phi = -0.05;
  double nu = 3.0;
  double daily_mean = 0.0;
  double daily_sd = 0.01;
  int days = 2520;
  std::size_t oracle_n = 10'000'000;
  std::string name = "synthetic";
  std::string syn_theta;
  synthetic->add_option("--family", family, "gaussian | t")->capture_default_str();
  synthetic->add_option("--dependence", dependence, "iid | ma1")->capture_default_str();
  synthetic->add_option("--c", syn_c, "Intervals per day")->capture_default_str();
  synthetic->add_option("--phi", phi, "MA(1) coefficient")->capture_default_str();
  synthetic->add_option("--nu", nu, "Degrees of freedom (t family)")->capture_default_str();
  synthetic->add_option("--daily-mean", daily_mean, "Mean of the daily return")->capture_default_str();
  synthetic->add_option("--daily-sd", daily_sd, "Standard deviation of the daily return")->capture_default_str();
  synthetic->add_option("--days", days, "Number of days")->capture_default_str();
  synthetic->add_option("--oracle-n", oracle_n, "Oracle sample size for t truth")->capture_default_str();
  synthetic->add_option("--name", name, "Output file stem")->capture_default_str();
  synthetic->add_option("--theta", syn_theta, "Comma-separated tail levels");

  auto* diagnose = app.add_subcommand("diagnose", "Structure function and Ljung-Box checks");
  std::vector<std::string> diagnose_inputs;
  int lags = 5;
  std::string aggregation = "pooled";
  diagnose->add_option("inputs", diagnose_inputs, "Minute-bar CSV or exported panel");
  diagnose->add_option("--lags", lags, "Ljung-Box lags")->capture_default_str();
  diagnose->add_option("--aggregation", aggregation, "pooled | per-day")
      ->check(CLI::IsMember({"pooled", "per-day"}))
      ->capture_default_str();
  overrides.add(diagnose, "--subordinator", "subordinator", "clock | tpv | vol");
  overrides.add(diagnose, "--c", "c", "Subordinated intervals per day");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    rrm::RunConfig config;
    if (!config_path.empty()) config = rrm::load_config_file(config_path);
    overrides.apply(config);
    if (seed) config.seed = *seed;
    if (jobs) config.jobs = *jobs;

    if (*estimate) {
      if (!estimate_inputs.empty()) config.set("input", join(estimate_inputs));
      if (config.inputs.empty()) throw std::invalid_argument("estimate needs at least one input");
      config.validate();
      const auto out = rrm::run_estimate(config);
      print_paths(out.csv_paths);
    } else if (*backtest) {
      config.validate();
      print_paths(rrm::run_backtest(config, backtest_inputs));
    } else if (*synthetic) {
      if (!syn_theta.empty()) config.set("theta", syn_theta);
      config.validate();
      rrm::SyntheticRequest request;
      request.spec = rrm::GeneratorSpec::calibrated(rrm::parse_family(family), rrm::parse_dependence(dependence),
                                                    syn_c, phi, nu, daily_mean, daily_sd, days, config.seed);
      request.spec.validate();
      request.thetas = config.thetas;
      request.oracle_n = oracle_n;
      request.name = name;
      print_paths(rrm::run_synthetic(config, request));
    } else if (*diagnose) {
      if (!diagnose_inputs.empty()) config.set("input", join(diagnose_inputs));
      if (config.inputs.empty()) throw std::invalid_argument("diagnose needs at least one input");
      config.validate();
      print_paths(rrm::run_diagnose(config, lags,
                                    aggregation == "pooled" ? rrm::StructureAggregation::Pooled
                                                            : rrm::StructureAggregation::PerDay));
    }
  } catch (const rrm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const rrm::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
