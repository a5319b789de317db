#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "rrm/intraday_model.hpp"
#include "rrm/numerics.hpp"
#include "rrm/risk.hpp"

namespace rrm {

using CharFn = std::function<std::complex<double>(double)>;

// phi_HF(w) = exp(i mu w) psi_nu(sigma w): characteristic function of one
// innovation of the model.
CharFn hf_char_fn(const TailModel& model);

// Characteristic function of the daily return: [phi_HF(w)]^c for iid models,
// phi_HF(w) phi_HF(phi w) [phi_HF((1 + phi) w)]^{c-1} for MA(1) models.
CharFn daily_char_fn(const TailModel& model);

// F(x) = 1/2 - (1/pi) int_0^inf Im(exp(-i w x) phi(w)) / w dw for an arbitrary
// integrable characteristic function. Throws NumericalError when the
// quadrature does not converge. The result is clamped to [0, 1].
double gil_pelaez_cdf(const CharFn& phi, double x);

// Distribution of the daily return implied by a TailModel, evaluated through
// its characteristic function. The law is symmetric about its mean m, so
// phi_Y(w) = exp(i m w) g(w) with g real, and
//   F(x)              = 1/2 + (1/pi) int_0^Omega g(w) sin((x - m) w) / w dw
//   E[Y; Y <= x]      = m F(x) + (1/pi) int_0^Omega g'(w) cos((x - m) w) / w dw
// where g(Omega) < 1e-12. log g and its derivative are cached per node, so
// repeated evaluations inside a root search reuse most work.
// Not thread-safe (the cache is mutable); use one instance per thread.
class DailyDistribution {
 public:
  explicit DailyDistribution(const TailModel& model);

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  double cutoff() const { return omega_max_; }

  double cdf(double x);
  double partial_expectation(double x);  // E[Y 1{Y <= x}]

  // log g(w) and d/dw log g(w) for w >= 0.
  std::pair<double, double> log_modulus(double omega);

  double last_error() const { return last_error_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  double integrate(const std::function<double(double)>& f, double distance);

  TailModel model_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double omega_max_ = 0.0;
  double last_error_ = 0.0;
  std::unordered_map<std::uint64_t, std::pair<double, double>> cache_;
};

// Quantiles of a DailyDistribution for several levels at once, following a
// fixed bracket protocol: F is tabulated on log-spaced candidates in
// [-0.2, -1e-3] and [-1e-3, -1e-12], the tightest sign-changing pair is
// refined by Brent (tol 1e-8, up to 10 restarts), and a bounded minimisation
// of |F - level| is the last resort (accepted when below 1e-4).
std::vector<double> cf_quantiles(DailyDistribution& dist, std::span<const double> levels,
                                 RiskDiagnostics* diagnostics = nullptr);

RiskPair cf_risk_pair(const TailModel& model, const RiskSpec& spec);
std::vector<RiskPair> cf_risk_pairs(const TailModel& model, std::span<const RiskSpec> specs);

struct McConfig {
  std::size_t batch_size = 100000;
  std::uint64_t seed = 0;

  void validate() const;  // batch_size must be positive and even
};

// Simulates batch_size daily returns (antithetic pairs) and sorts them.
std::vector<double> simulate_daily_returns(const TailModel& model, const McConfig& config);

RiskPair mc_risk_pair(const TailModel& model, const RiskSpec& spec, const McConfig& config);
// One simulation shared by all levels.
std::vector<RiskPair> mc_risk_pairs(const TailModel& model, std::span<const RiskSpec> specs,
                                    const McConfig& config);

// Empirical VaR (type-7 quantile) and ES (mean of values strictly below it)
// from sorted samples.
RiskPair empirical_risk_pair(std::span<const double> sorted, double theta);

RiskPair ensemble_risk_pair(const RiskPair& cf, const RiskPair& mc);

}  // namespace rrm
