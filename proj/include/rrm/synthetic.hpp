#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rrm/market_data.hpp"

namespace rrm {

enum class Family { Gaussian, StudentT };
enum class Dependence { Iid, Ma1 };

Family parse_family(std::string_view name);          // gaussian | t
Dependence parse_dependence(std::string_view name);  // iid | ma1
std::string_view to_string(Family family);
std::string_view to_string(Dependence dependence);

// Intraday generator: Y_j = xi_j (iid) or Y_j = phi xi_{j-1} + xi_j (MA1) with
// xi_j = mu + sigma Z, Z standard normal or standard Student's t(nu).
struct GeneratorSpec {
  Family family = Family::Gaussian;
  Dependence dependence = Dependence::Ma1;
  int c = 39;
  double phi = -0.05;
  double mu = 0.0;
  double sigma = 1e-3;
  double nu = 3.0;
  int n_days = 2520;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument
  double phi_or_zero() const { return dependence == Dependence::Ma1 ? phi : 0.0; }

  // Picks mu and sigma so that the daily return has the given mean and
  // standard deviation.
  static GeneratorSpec calibrated(Family family, Dependence dependence, int c, double phi, double nu,
                                  double daily_mean, double daily_sd, int n_days, std::uint64_t seed);
};

// Daily mean c (1 + phi) mu and the variance weight (c-1)(1+phi)^2 + 1 + phi^2
// (times the innovation variance) of the daily sum.
double daily_mean(const GeneratorSpec& spec);
double daily_variance(const GeneratorSpec& spec);

struct SyntheticPanel {
  GeneratorSpec spec;
  std::vector<Date> dates;
  std::vector<std::vector<double>> returns;  // n_days rows of c returns
};

// Weekdays starting at `first`.
std::vector<Date> business_days(Date first, int count);

// Each day draws xi_1..xi_c and then xi_0 from its own stream, so an MA(1)
// day with phi = 0 equals the iid day of the same seed.
SyntheticPanel generate(const GeneratorSpec& spec);

// Places each day's returns on the clock grid of c intervals (price moves at
// the grid minutes only), starting from log(100). Clock subordination with the
// same c recovers the returns up to rounding.
DayPanel to_day_panel(const SyntheticPanel& panel, std::string asset_id = "synthetic");

enum class TruthMethod { Analytic, McOracle };

struct GroundTruth {
  std::vector<double> theta;
  std::vector<double> var_true;
  std::vector<double> es_true;
  std::vector<double> var_se;  // zero for analytic truth
  std::vector<double> es_se;
  TruthMethod method = TruthMethod::Analytic;
  std::size_t oracle_n = 0;
};

GroundTruth gaussian_ground_truth(const GeneratorSpec& spec, std::span<const double> thetas);

// Brute-force daily sums drawn with std::student_t_distribution on a stream
// derived from spec.seed that no estimator uses. Standard errors come from a
// bootstrap of the lower tail (n_boot replicates).
GroundTruth t_ground_truth_oracle(const GeneratorSpec& spec, std::span<const double> thetas,
                                  std::size_t oracle_n = 10'000'000, std::size_t n_boot = 200);

// Either of the above, by family.
GroundTruth ground_truth(const GeneratorSpec& spec, std::span<const double> thetas,
                         std::size_t oracle_n = 10'000'000);

}  // namespace rrm
