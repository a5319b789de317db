#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rrm/diagnostics.hpp"
#include "rrm/evaluation.hpp"
#include "rrm/intraday_model.hpp"
#include "rrm/market_data.hpp"
#include "rrm/risk.hpp"
#include "rrm/scaling.hpp"
#include "rrm/subordinator.hpp"
#include "rrm/synthetic.hpp"

namespace rrm {

std::string library_version();

struct RunConfig {
  std::vector<std::string> inputs;
  SubordinatorKind subordinator = SubordinatorKind::Clock;
  int c = 39;
  DriftSpec drift;
  FilterMode filter = FilterMode::Iid;
  std::vector<double> thetas{0.05, 0.025, 0.01};
  RiskMethod method = RiskMethod::Ensemble;
  EsRule es_rule = EsRule::TailIntegral;
  int es_grid_size = 10;
  McConfig mc;
  double hurst = 0.5;
  int ema_init_window = 252;
  ForecasterSpec forecaster;
  std::size_t n_boot = 10000;
  std::string output_dir = "rrm-out";
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  void validate() const;  // throws std::invalid_argument
  // Applies one key = value setting; throws std::invalid_argument for an
  // unknown key or a malformed value.
  void set(const std::string& key, const std::string& value);
  // Sorted key=value lines covering every field.
  std::string canonical() const;
  std::uint64_t hash() const;
  // Short label used in file names and report rows, e.g. ensemble-iid-zero.
  std::string method_label() const;
};

// Flat "key = value" text, '#' starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// Reads a minute-bar table or an exported panel (detected from the header),
// plain or gzip-compressed.
DayPanel load_panel(const std::string& path);

struct DayEstimate {
  Date date{};
  double y = 0.0;
  std::optional<TailModel> model;  // absent for the DH benchmark
  std::vector<RiskPair> cf;        // one entry per theta when computed
  std::vector<RiskPair> mc;
  std::vector<RiskPair> ensemble;
  std::vector<RiskPair> dh;

  // The pair reported for `method` at theta index k.
  const RiskPair& reported(RiskMethod method, std::size_t k) const;
};

struct EstimateResult {
  std::vector<DayEstimate> days;
  std::size_t days_total = 0;
  std::size_t days_failed = 0;
  std::size_t days_burn_in = 0;  // skipped while the EMA drift warms up
};

// Runs subordination, fitting and scaling on every day of the panel.
// Throws NumericalError when more than 5% of the attempted days fail.
EstimateResult estimate_panel(const DayPanel& panel, const RunConfig& config);

// Wide CSV keyed by (date, theta).
std::string estimate_csv(const EstimateResult& result, const RunConfig& config);

RealizedPanel realized_panel(const EstimateResult& result, RiskMethod method, std::size_t theta_index,
                             double theta);

struct RunOutputs {
  std::vector<std::string> csv_paths;
  std::vector<std::string> manifest_paths;
};

RunOutputs run_estimate(const RunConfig& config);

// Table-shaped reports from estimate outputs (paths to their CSV files; the
// manifest next to each CSV names method, subordinator and c). Returns the
// paths of the written reports.
std::vector<std::string> run_backtest(const RunConfig& config, const std::vector<std::string>& run_csvs);

struct SyntheticRequest {
  GeneratorSpec spec;
  std::vector<double> thetas{0.05, 0.025, 0.01};
  std::size_t oracle_n = 10'000'000;
  std::string name = "synthetic";
};

// Writes <output_dir>/<name>.csv (panel export) and <name>.truth.json.
std::vector<std::string> run_synthetic(const RunConfig& config, const SyntheticRequest& request);

// Writes structure-function and per-day Ljung-Box CSVs.
std::vector<std::string> run_diagnose(const RunConfig& config, int lags, StructureAggregation aggregation);

// Path of the ground-truth sidecar belonging to a panel file.
std::string truth_sidecar_path(const std::string& panel_path);

}  // namespace rrm
