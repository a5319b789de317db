#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rrm/market_data.hpp"

namespace rrm {

// Daily returns aligned with realized (VaR, ES) estimates at one level.
struct RealizedPanel {
  std::vector<Date> dates;
  std::vector<double> y;
  std::vector<double> q_hat;
  std::vector<double> e_hat;
  double theta = 0.05;

  std::size_t size() const { return y.size(); }
  // Equal lengths, finite values, e_hat <= q_hat. Throws DataError.
  void validate() const;
  RealizedPanel slice(std::size_t begin, std::size_t end) const;
};

double pinball_loss(double q_hat, double y, double theta);
// FZ joint loss; throws std::domain_error unless e_hat < 0.
double joint_loss(double q_hat, double e_hat, double y, double theta);

double hits_frequency(const RealizedPanel& panel);

struct AsTestResult {
  std::optional<double> z1;     // mean of y / e_hat over hits; missing without hits
  double z2 = 0.0;              // mean of y 1{hit} / (theta e_hat)
  std::optional<double> as1_p;  // missing without hits
  double as2_p = 0.5;
  std::size_t hits = 0;
};

// Bootstrap tests on Z1 and Z2. Days are resampled with replacement; the
// bootstrap law is shifted to the null value 1 and the one-sided p-value
// for "ES underestimated" (statistic above 1) counts ties as one half.
AsTestResult as_tests(const RealizedPanel& panel, std::size_t n_boot = 10000, std::uint64_t seed = 0);

struct YearlyAsSummary {
  std::vector<int> years;
  std::vector<AsTestResult> results;
  double as1_rejection_rate = 0.0;  // over years where AS1 is defined
  double as2_rejection_rate = 0.0;
  std::size_t as1_tested = 0;
};

// One test per calendar year of the panel, rejection at `level`.
YearlyAsSummary as_tests_by_year(const RealizedPanel& panel, std::size_t n_boot, std::uint64_t seed,
                                 double level = 0.05);

enum class ForecasterKind { Ar1, Ema, Rw };

ForecasterKind parse_forecaster_kind(std::string_view name);  // ar1 | ema | rw
std::string_view to_string(ForecasterKind kind);

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::Ar1;
  double alpha = 0.9;
  int train_years = 5;
  int test_years = 1;
  int days_per_year = 252;

  void validate() const;
};

// One-step-ahead forecasts of series[t] for t in [test_begin, test_end),
// fitted on [train_begin, test_begin). Each forecast uses values before t.
std::vector<double> forecast_series(std::span<const double> series, std::size_t train_begin,
                                    std::size_t test_begin, std::size_t test_end,
                                    const ForecasterSpec& spec);

// f[0] = initial, f[t] = alpha x[t-1] + (1 - alpha) f[t-1]; f[t] forecasts x[t].
std::vector<double> ema_forecasts(std::span<const double> series, double alpha, double initial);

struct AutoregressionFit {
  double intercept = 0.0;
  double slope = 0.0;
};

AutoregressionFit fit_ar1(std::span<const double> series);

struct ForecastBlock {
  std::size_t train_begin = 0;
  std::size_t test_begin = 0;
  std::size_t test_end = 0;
  double pinball_mean = 0.0;
  double joint_mean = 0.0;
  std::size_t joint_skipped = 0;  // forecasts with e >= 0, excluded from joint_mean
};

struct BacktestReport {
  ForecasterKind forecaster = ForecasterKind::Ar1;
  double theta = 0.0;
  double hits_freq = 0.0;
  std::optional<double> as1_p;
  double as2_p = 0.5;
  std::vector<ForecastBlock> folds;
  double pinball_mean = 0.0;  // mean over folds
  double joint_mean = 0.0;
};

std::vector<ForecastBlock> rolling_forecast_eval(const RealizedPanel& panel, const ForecasterSpec& spec);

double rmse_vs_truth(std::span<const double> estimates, std::span<const double> truth);

}  // namespace rrm
