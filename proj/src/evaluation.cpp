#include "rrm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

#include "rrm/errors.hpp"
#include "rrm/numerics.hpp"
#include "rrm/seeding.hpp"

namespace rrm {
namespace {

// Mid-p upper tail: P(X > x) + P(X = x) / 2 over the bootstrap replicates.
double upper_mid_p(const std::vector<double>& replicates, double x) {
  if (replicates.empty()) return 0.5;
  double count = 0.0;
  for (double r : replicates) {
    if (r > x) {
      count += 1.0;
    } else if (r == x) {
      count += 0.5;
    }
  }
  return count / static_cast<double>(replicates.size());
}

}  // namespace

namespace {

// Lengths, finiteness and theta; no ordering between q_hat and e_hat.
void check_columns(const RealizedPanel& p) {
  const std::size_t n = p.y.size();
  if (p.q_hat.size() != n || p.e_hat.size() != n || (!p.dates.empty() && p.dates.size() != n)) {
    throw DataError("realized panel columns have different lengths");
  }
  if (!(p.theta > 0.0 && p.theta < 1.0)) throw DataError("theta must lie in (0, 1)");
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(p.y[t]) || !std::isfinite(p.q_hat[t]) || !std::isfinite(p.e_hat[t])) {
      throw DataError("realized panel has a non-finite value at row " + std::to_string(t));
    }
  }
}

}  // namespace

void RealizedPanel::validate() const {
  const std::size_t n = y.size();
  if (q_hat.size() != n || e_hat.size() != n || (!dates.empty() && dates.size() != n)) {
    throw DataError("realized panel columns have different lengths");
  }
  if (!(theta > 0.0 && theta < 1.0)) throw DataError("theta must lie in (0, 1)");
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(y[t]) || !std::isfinite(q_hat[t]) || !std::isfinite(e_hat[t])) {
      throw DataError("realized panel has a non-finite value at row " + std::to_string(t));
    }
    if (e_hat[t] > q_hat[t]) {
      throw DataError("realized panel has ES above VaR at row " + std::to_string(t));
    }
  }
}

RealizedPanel RealizedPanel::slice(std::size_t begin, std::size_t end) const {
  RealizedPanel out;
  out.theta = theta;
  auto cut = [&](const auto& v) { return std::vector(v.begin() + static_cast<std::ptrdiff_t>(begin), v.begin() + static_cast<std::ptrdiff_t>(end)); };
  if (!dates.empty()) out.dates = cut(dates);
  out.y = cut(y);
  out.q_hat = cut(q_hat);
  out.e_hat = cut(e_hat);
  return out;
}

double pinball_loss(double q_hat, double y, double theta) {
  return (y - q_hat) * (theta - (y <= q_hat ? 1.0 : 0.0));
}

double joint_loss(double q_hat, double e_hat, double y, double theta) {
  if (!(e_hat < 0.0)) throw std::domain_error("joint loss needs a negative ES");
  const double hit = y <= q_hat ? 1.0 : 0.0;
  return q_hat / e_hat - (q_hat - y) * hit / (theta * e_hat) + std::log(-e_hat);
}

double hits_frequency(const RealizedPanel& panel) {
  if (panel.size() == 0) throw DataError("hits frequency of an empty panel");
  std::size_t hits = 0;
  for (std::size_t t = 0; t < panel.size(); ++t) hits += panel.y[t] <= panel.q_hat[t] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(panel.size());
}

AsTestResult as_tests(const RealizedPanel& panel, std::size_t n_boot, std::uint64_t seed) {
  // A forecast with e_hat above q_hat is misspecified, not malformed; the test
  // should get to reject it.
  check_columns(panel);
  if (panel.size() == 0) throw DataError("AS tests on an empty panel");
  if (n_boot == 0) throw std::invalid_argument("n_boot must be positive");
  const std::size_t T = panel.size();
  // Only hit days carry Z terms; a non-hit day contributes zero to Z2 and
  // nothing to Z1, so a day-level resample is drawn as a binomial number of
  // hits followed by uniform picks among them.
  std::vector<double> ratio;
  for (std::size_t t = 0; t < T; ++t) {
    if (panel.y[t] > panel.q_hat[t]) continue;
    if (!(panel.e_hat[t] < 0.0)) throw DataError("AS tests need e_hat < 0 on hit days (row " + std::to_string(t) + ")");
    ratio.push_back(panel.y[t] / panel.e_hat[t]);
  }
  AsTestResult out;
  out.hits = ratio.size();
  const double theta = panel.theta;
  double sum = 0.0;
  for (double r : ratio) sum += r;
  out.z2 = sum / (theta * static_cast<double>(T));
  if (ratio.empty()) {
    out.as2_p = 0.5;
    return out;
  }
  out.z1 = sum / static_cast<double>(ratio.size());

  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::size_t> hit_count(T, static_cast<double>(ratio.size()) / static_cast<double>(T));
  std::uniform_int_distribution<std::size_t> pick(0, ratio.size() - 1);
  std::vector<double> boot1;
  std::vector<double> boot2;
  boot1.reserve(n_boot);
  boot2.reserve(n_boot);
  for (std::size_t b = 0; b < n_boot; ++b) {
    const std::size_t k = hit_count(rng);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += ratio[pick(rng)];
    boot2.push_back(s / (theta * static_cast<double>(T)));
    if (k > 0) boot1.push_back(s / static_cast<double>(k));
  }
  // Shift the bootstrap law so that it is centred at 1:
  // P(Z* - z + 1 >= z) = P(Z* >= 2 z - 1).
  out.as1_p = upper_mid_p(boot1, 2.0 * *out.z1 - 1.0);
  out.as2_p = upper_mid_p(boot2, 2.0 * out.z2 - 1.0);
  return out;
}

YearlyAsSummary as_tests_by_year(const RealizedPanel& panel, std::size_t n_boot, std::uint64_t seed,
                                 double level) {
  panel.validate();
  if (panel.dates.size() != panel.size()) throw DataError("yearly AS tests need dates");
  std::map<int, std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t t = 0; t < panel.size(); ++t) {
    const int year = static_cast<int>(panel.dates[t].year());
    auto [it, inserted] = spans.try_emplace(year, t, t + 1);
    if (!inserted) it->second.second = t + 1;
  }
  YearlyAsSummary out;
  std::size_t reject1 = 0;
  std::size_t reject2 = 0;
  for (const auto& [year, span] : spans) {
    const auto result = as_tests(panel.slice(span.first, span.second), n_boot,
                                 derive_seed(seed, static_cast<std::uint64_t>(year)));
    out.years.push_back(year);
    if (result.as1_p) {
      ++out.as1_tested;
      reject1 += *result.as1_p < level ? 1 : 0;
    }
    reject2 += result.as2_p < level ? 1 : 0;
    out.results.push_back(result);
  }
  out.as1_rejection_rate = out.as1_tested ? static_cast<double>(reject1) / static_cast<double>(out.as1_tested) : 0.0;
  out.as2_rejection_rate = out.years.empty() ? 0.0 : static_cast<double>(reject2) / static_cast<double>(out.years.size());
  return out;
}

ForecasterKind parse_forecaster_kind(std::string_view name) {
  if (name == "ar1") return ForecasterKind::Ar1;
  if (name == "ema") return ForecasterKind::Ema;
  if (name == "rw") return ForecasterKind::Rw;
  throw std::invalid_argument("unknown forecaster '" + std::string(name) + "'");
}

std::string_view to_string(ForecasterKind kind) {
  switch (kind) {
    case ForecasterKind::Ar1: return "ar1";
    case ForecasterKind::Ema: return "ema";
    case ForecasterKind::Rw: return "rw";
  }
  return "?";
}

void ForecasterSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (train_years < 1 || test_years < 1 || days_per_year < 1) {
    throw std::invalid_argument("window lengths must be positive");
  }
}

std::vector<double> ema_forecasts(std::span<const double> series, double alpha, double initial) {
  std::vector<double> f(series.size());
  if (f.empty()) return f;
  f[0] = initial;
  for (std::size_t t = 1; t < series.size(); ++t) f[t] = alpha * series[t - 1] + (1.0 - alpha) * f[t - 1];
  return f;
}

AutoregressionFit fit_ar1(std::span<const double> series) {
  if (series.size() < 3) throw DataError("AR(1) fit needs at least 3 observations");
  const auto lagged = series.first(series.size() - 1);
  if (std::all_of(lagged.begin(), lagged.end(), [&](double v) { return v == lagged.front(); })) {
    return {series.back(), 0.0};
  }
  const auto fit = numerics::ordinary_least_squares(series.first(series.size() - 1), series.subspan(1));
  if (!std::isfinite(fit.slope) || !std::isfinite(fit.intercept)) {
    // A constant training block: the best linear predictor is the constant.
    return {series.back(), 0.0};
  }
  return {fit.intercept, fit.slope};
}

std::vector<double> forecast_series(std::span<const double> series, std::size_t train_begin,
                                    std::size_t test_begin, std::size_t test_end,
                                    const ForecasterSpec& spec) {
  spec.validate();
  if (!(train_begin < test_begin && test_begin <= test_end && test_end <= series.size())) {
    throw std::invalid_argument("forecast_series: invalid block bounds");
  }
  std::vector<double> out;
  out.reserve(test_end - test_begin);
  switch (spec.kind) {
    case ForecasterKind::Rw:
      for (std::size_t t = test_begin; t < test_end; ++t) out.push_back(series[t - 1]);
      break;
    case ForecasterKind::Ar1: {
      const auto fit = fit_ar1(series.subspan(train_begin, test_begin - train_begin));
      for (std::size_t t = test_begin; t < test_end; ++t) out.push_back(fit.intercept + fit.slope * series[t - 1]);
      break;
    }
    case ForecasterKind::Ema: {
      const std::size_t warm =
          std::min<std::size_t>(static_cast<std::size_t>(spec.days_per_year), test_begin - train_begin);
      const std::size_t start = train_begin + warm;
      const double initial = numerics::mean(series.subspan(train_begin, warm));
      const auto f = ema_forecasts(series.subspan(start, test_end - start), spec.alpha, initial);
      for (std::size_t t = test_begin; t < test_end; ++t) out.push_back(f[t - start]);
      break;
    }
  }
  return out;
}

std::vector<ForecastBlock> rolling_forecast_eval(const RealizedPanel& panel, const ForecasterSpec& spec) {
  panel.validate();
  spec.validate();
  const std::size_t train = static_cast<std::size_t>(spec.train_years) * static_cast<std::size_t>(spec.days_per_year);
  const std::size_t test = static_cast<std::size_t>(spec.test_years) * static_cast<std::size_t>(spec.days_per_year);
  if (panel.size() < train + test) {
    throw DataError("rolling evaluation needs at least " + std::to_string(train + test) +
                    " days, got " + std::to_string(panel.size()));
  }
  std::vector<ForecastBlock> blocks;
  for (std::size_t begin = 0; begin + train + test <= panel.size(); begin += test) {
    ForecastBlock block;
    block.train_begin = begin;
    block.test_begin = begin + train;
    block.test_end = begin + train + test;
    const auto q = forecast_series(panel.q_hat, block.train_begin, block.test_begin, block.test_end, spec);
    const auto e = forecast_series(panel.e_hat, block.train_begin, block.test_begin, block.test_end, spec);
    double pinball = 0.0;
    double joint = 0.0;
    std::size_t joint_n = 0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double y = panel.y[block.test_begin + k];
      pinball += pinball_loss(q[k], y, panel.theta);
      if (e[k] < 0.0) {
        joint += joint_loss(q[k], e[k], y, panel.theta);
        ++joint_n;
      } else {
        ++block.joint_skipped;
      }
    }
    block.pinball_mean = pinball / static_cast<double>(q.size());
    block.joint_mean = joint_n ? joint / static_cast<double>(joint_n) : std::nan("");
    blocks.push_back(block);
  }
  return blocks;
}

double rmse_vs_truth(std::span<const double> estimates, std::span<const double> truth) {
  if (estimates.size() != truth.size()) throw std::invalid_argument("rmse: length mismatch");
  if (estimates.empty()) throw std::invalid_argument("rmse: empty input");
  double acc = 0.0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const double d = estimates[t] - truth[t];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(truth.size()));
}

}  // namespace rrm
