#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rrm/errors.hpp"

namespace rrm {

enum class DriftKind { Zero, Ema };

struct DriftSpec {
  DriftKind kind = DriftKind::Zero;
  int beta = 21;

  static DriftSpec parse(std::string_view name);  // zero | ema<beta>, e.g. ema21
  std::string name() const;
};

enum class FilterMode { Iid, Ma1 };

FilterMode parse_filter_mode(std::string_view name);  // iid | ma1
std::string_view to_string(FilterMode mode);

inline constexpr double kMinNu = 2.0 + 1e-6;
inline constexpr double kMaxNu = 200.0;
inline constexpr double kMinSigma = 1e-6;
inline constexpr double kMaxAbsPhi = 0.99;

// Fitted intraday law: Y_j = xi_j (iid) or Y_j = phi xi_{j-1} + xi_j (MA1), with
// xi_j ~ mu + sigma T_nu.
struct TailModel {
  double mu = 0.0;
  double sigma = 1.0;
  double nu = 4.0;
  std::optional<double> phi;  // present in MA(1) mode
  int c = 1;
  double loglik = 0.0;

  bool is_ma() const { return phi.has_value(); }
  double phi_or_zero() const { return phi.value_or(0.0); }
  void validate() const;  // throws std::invalid_argument
};

class FitError : public NumericalError {
 public:
  FitError(const std::string& what, TailModel best, double residual)
      : NumericalError(what, residual), best_(best) {}
  const TailModel& best() const noexcept { return best_; }

 private:
  TailModel best_;
};

// EMA_t = a y_{t-1} + (1 - a) EMA_{t-1}, a = 2 / (beta + 1), started from the
// mean of the first init_window returns. Entry t is the drift for day t. The
// first init_window entries are NaN: their EMA depends on the initialisation
// window, which contains day t itself or later days.
std::vector<double> ema_drift(std::span<const double> daily_returns, int beta, int init_window = 252);

// Same recursion without the burn-in mask; entry 0 is the initial value.
std::vector<double> ema_recursion(std::span<const double> daily_returns, int beta, int init_window);

TailModel fit_iid_t(std::span<const double> returns, double mu_fixed);
TailModel fit_ma1_t(std::span<const double> returns, double mu_fixed);

// Conditional log-likelihoods used by the fits (xi_0 = 0 for MA1).
double iid_t_loglik(std::span<const double> returns, double mu, double sigma, double nu);
double ma1_t_loglik(std::span<const double> returns, double mu, double sigma, double nu, double phi);

}  // namespace rrm
