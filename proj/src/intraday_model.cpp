#include "rrm/intraday_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rrm/numerics.hpp"
#include "rrm/student_t.hpp"
#include "rrm/text.hpp"

namespace rrm {
namespace {

constexpr int kMinReturns = 10;
constexpr std::size_t kMaxPolishRounds = 4;

const double kLogSigmaMin = std::log(kMinSigma);
const double kLogNuExcessMin = std::log(kMinNu - 2.0);
const double kLogNuExcessMax = std::log(kMaxNu - 2.0);

double sigma_of(double x) { return std::max(kMinSigma, std::exp(x)); }
double nu_of(double x) { return std::clamp(2.0 + std::exp(x), kMinNu, kMaxNu); }

void check_sample(std::span<const double> returns) {
  if (returns.size() < static_cast<std::size_t>(kMinReturns)) {
    throw std::invalid_argument("fitting needs at least 10 returns, got " +
                                std::to_string(returns.size()));
  }
  for (double y : returns) {
    if (!std::isfinite(y)) throw std::invalid_argument("returns must be finite");
  }
}

bool all_residuals_zero(std::span<const double> returns, double mu) {
  return std::all_of(returns.begin(), returns.end(), [mu](double y) { return y - mu == 0.0; });
}

// Root-mean-square residual; a robust enough scale seed that is never zero
// unless every residual is.
double residual_scale(std::span<const double> returns, double mu) {
  double acc = 0.0;
  for (double y : returns) acc += (y - mu) * (y - mu);
  return std::sqrt(acc / static_cast<double>(returns.size()));
}

struct Fitted {
  std::vector<double> x;
  double negloglik = std::numeric_limits<double>::infinity();
  bool converged = false;
};

Fitted minimise(const std::function<double(std::span<const double>)>& objective,
                const std::vector<std::vector<double>>& starts, std::span<const double> lower,
                std::span<const double> upper) {
  numerics::SimplexOptions options;
  options.initial_step = 0.1;
  Fitted best;
  for (const auto& start : starts) {
    auto result = numerics::nelder_mead(objective, start, lower, upper, options);
    if (result.f < best.negloglik) {
      best.x = result.x;
      best.negloglik = result.f;
      best.converged = result.converged;
    }
  }
  // Restart from the incumbent until the objective stops moving.
  options.initial_step = 0.02;
  for (std::size_t round = 0; round < kMaxPolishRounds; ++round) {
    auto result = numerics::nelder_mead(objective, best.x, lower, upper, options);
    const double gain = best.negloglik - result.f;
    if (result.f <= best.negloglik) {
      best.x = result.x;
      best.negloglik = result.f;
    }
    best.converged = result.converged;
    if (result.converged && gain <= 1e-9 * (1.0 + std::abs(best.negloglik))) break;
  }
  return best;
}

}  // namespace

DriftSpec DriftSpec::parse(std::string_view name) {
  const std::string lowered = text::lower(text::trim(name));
  if (lowered == "zero") return {DriftKind::Zero, 21};
  if (lowered.rfind("ema", 0) == 0) {
    const auto beta = text::to_integer<int>(std::string_view(lowered).substr(3));
    if (beta && *beta >= 1) return {DriftKind::Ema, *beta};
  }
  throw std::invalid_argument("unknown drift '" + std::string(name) + "', expected zero or ema<beta>");
}

std::string DriftSpec::name() const {
  return kind == DriftKind::Zero ? std::string("zero") : "ema" + std::to_string(beta);
}

FilterMode parse_filter_mode(std::string_view name) {
  if (name == "iid") return FilterMode::Iid;
  if (name == "ma1") return FilterMode::Ma1;
  throw std::invalid_argument("unknown filter '" + std::string(name) + "', expected iid or ma1");
}

std::string_view to_string(FilterMode mode) { return mode == FilterMode::Iid ? "iid" : "ma1"; }

void TailModel::validate() const {
  if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
  if (!(sigma >= kMinSigma) || !std::isfinite(sigma)) throw std::invalid_argument("sigma below 1e-6");
  if (!(nu >= kMinNu) || !std::isfinite(nu)) throw std::invalid_argument("nu below 2 + 1e-6");
  if (phi && !(std::abs(*phi) < 1.0)) throw std::invalid_argument("|phi| must be < 1");
  if (c < 1) throw std::invalid_argument("c must be positive");
}

std::vector<double> ema_recursion(std::span<const double> y, int beta, int init_window) {
  if (beta < 1) throw std::invalid_argument("beta must be >= 1");
  if (init_window < 1) throw std::invalid_argument("init_window must be >= 1");
  if (y.size() <= static_cast<std::size_t>(init_window)) {
    throw DataError("EMA drift needs at least " + std::to_string(init_window + 1) +
                    " daily returns, got " + std::to_string(y.size()));
  }
  const double a = 2.0 / (beta + 1.0);
  std::vector<double> ema(y.size());
  ema[0] = numerics::mean(y.first(static_cast<std::size_t>(init_window)));
  for (std::size_t t = 1; t < y.size(); ++t) ema[t] = a * y[t - 1] + (1.0 - a) * ema[t - 1];
  return ema;
}

std::vector<double> ema_drift(std::span<const double> y, int beta, int init_window) {
  auto ema = ema_recursion(y, beta, init_window);
  std::fill_n(ema.begin(), init_window, std::numeric_limits<double>::quiet_NaN());
  return ema;
}

double iid_t_loglik(std::span<const double> returns, double mu, double sigma, double nu) {
  const TLogDensity density(sigma, nu);
  double acc = 0.0;
  for (double y : returns) acc += density(y - mu);
  return acc;
}

double ma1_t_loglik(std::span<const double> returns, double mu, double sigma, double nu,
                    double phi) {
  const TLogDensity density(sigma, nu);
  double acc = 0.0;
  double xi = 0.0;
  for (double y : returns) {
    xi = y - phi * xi;
    acc += density(xi - mu);
  }
  return acc;
}

TailModel fit_iid_t(std::span<const double> returns, double mu_fixed) {
  check_sample(returns);
  TailModel model;
  model.mu = mu_fixed;
  if (all_residuals_zero(returns, mu_fixed)) {
    model.sigma = kMinSigma;
    model.nu = kMaxNu;
    model.loglik = iid_t_loglik(returns, mu_fixed, model.sigma, model.nu);
    return model;
  }
  const double scale = std::max(residual_scale(returns, mu_fixed), kMinSigma);
  auto objective = [&](std::span<const double> x) {
    return -iid_t_loglik(returns, mu_fixed, sigma_of(x[0]), nu_of(x[1]));
  };
  const std::array<double, 2> lower{kLogSigmaMin, kLogNuExcessMin};
  const std::array<double, 2> upper{std::numeric_limits<double>::infinity(), kLogNuExcessMax};
  std::vector<std::vector<double>> starts;
  for (double k : {0.5, 1.0, 2.0}) starts.push_back({std::log(std::max(scale * k, kMinSigma)), std::log(2.0)});
  const Fitted fit = minimise(objective, starts, lower, upper);
  model.sigma = sigma_of(fit.x[0]);
  model.nu = nu_of(fit.x[1]);
  model.loglik = -fit.negloglik;
  if (!fit.converged || !std::isfinite(model.loglik)) {
    throw FitError("iid Student-t fit did not converge", model, fit.negloglik);
  }
  return model;
}

TailModel fit_ma1_t(std::span<const double> returns, double mu_fixed) {
  check_sample(returns);
  TailModel model;
  model.mu = mu_fixed;
  model.phi = 0.0;
  if (all_residuals_zero(returns, mu_fixed)) {
    model.sigma = kMinSigma;
    model.nu = kMaxNu;
    model.loglik = ma1_t_loglik(returns, mu_fixed, model.sigma, model.nu, 0.0);
    return model;
  }
  const TailModel nested = fit_iid_t(returns, mu_fixed);
  const double scale = std::max(residual_scale(returns, mu_fixed), kMinSigma);
  double rho = numerics::lag1_autocorrelation(returns);
  if (!std::isfinite(rho)) rho = 0.0;
  rho = std::clamp(rho, -0.9, 0.9);

  auto objective = [&](std::span<const double> x) {
    return -ma1_t_loglik(returns, mu_fixed, sigma_of(x[0]), nu_of(x[1]), x[2]);
  };
  const std::array<double, 3> lower{kLogSigmaMin, kLogNuExcessMin, -kMaxAbsPhi};
  const std::array<double, 3> upper{std::numeric_limits<double>::infinity(), kLogNuExcessMax,
                                    kMaxAbsPhi};
  std::vector<std::vector<double>> starts;
  for (double k : {0.5, 1.0, 2.0}) starts.push_back({std::log(std::max(scale * k, kMinSigma)), std::log(2.0), rho});
  // The iid optimum is the phi = 0 point of this model, so starting there
  // guarantees the MA fit never ends below it.
  starts.push_back({std::log(nested.sigma), std::log(nested.nu - 2.0), 0.0});
  const Fitted fit = minimise(objective, starts, lower, upper);
  model.sigma = sigma_of(fit.x[0]);
  model.nu = nu_of(fit.x[1]);
  model.phi = fit.x[2];
  model.loglik = -fit.negloglik;
  if (!fit.converged || !std::isfinite(model.loglik)) {
    throw FitError("MA(1) Student-t fit did not converge", model, fit.negloglik);
  }
  return model;
}

}  // namespace rrm
