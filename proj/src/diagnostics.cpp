#include "rrm/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "rrm/errors.hpp"
#include "rrm/numerics.hpp"

namespace rrm {
namespace {

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool ok = false;
};

Regression regress_log_log(const std::vector<double>& log_delta, const std::vector<double>& log_m) {
  Regression out;
  if (log_delta.size() < 2) return out;
  const auto fit = numerics::ordinary_least_squares(log_delta, log_m);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r2 = std::clamp(std::isfinite(fit.r2) ? fit.r2 : 1.0, 0.0, 1.0);
  out.ok = std::isfinite(fit.slope) && std::isfinite(fit.intercept);
  return out;
}

void fill_defaults(StructureFunctionOptions& options) {
  if (options.q_grid.empty()) options.q_grid = default_q_grid();
  if (options.delta_grid.empty()) options.delta_grid = default_delta_grid();
  for (double q : options.q_grid) {
    if (!(q > 0.0)) throw std::invalid_argument("q grid values must be positive");
  }
  for (int d : options.delta_grid) {
    if (d < 1) throw std::invalid_argument("delta grid values must be >= 1");
  }
}

}  // namespace

std::vector<double> default_q_grid() {
  std::vector<double> q(40);
  for (int k = 0; k < 40; ++k) q[static_cast<std::size_t>(k)] = 0.25 + (10.0 - 0.25) * (k + 1) / 40.0;
  return q;
}

std::vector<int> default_delta_grid() {
  std::vector<int> d(38);
  for (int k = 0; k < 38; ++k) d[static_cast<std::size_t>(k)] = k + 1;
  return d;
}

double structure_moment(std::span<const double> path, double q, int delta) {
  if (delta < 1 || path.size() <= static_cast<std::size_t>(delta)) {
    throw std::invalid_argument("path too short for the requested delta");
  }
  const std::size_t n = path.size() - static_cast<std::size_t>(delta);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += std::pow(std::abs(path[j + static_cast<std::size_t>(delta)] - path[j]), q);
  return acc / static_cast<double>(n);
}

StructureFunctionReport structure_function_paths(const std::vector<std::vector<double>>& paths,
                                                 const StructureFunctionOptions& input) {
  StructureFunctionOptions options = input;
  fill_defaults(options);
  if (paths.empty()) throw DataError("structure function needs at least one day");
  const std::size_t nq = options.q_grid.size();
  StructureFunctionReport report;
  report.q_grid = options.q_grid;
  report.delta_grid = options.delta_grid;
  report.Hq.assign(nq, 0.0);
  report.Aq_log.assign(nq, 0.0);
  report.r2.assign(nq, 0.0);

  if (options.aggregation == StructureAggregation::Pooled) {
    // Pooled: per (q, delta), mean of m over the days that can supply it.
    for (std::size_t iq = 0; iq < nq; ++iq) {
      std::vector<double> x;
      std::vector<double> y;
      for (int delta : options.delta_grid) {
        double acc = 0.0;
        int used = 0;
        for (const auto& path : paths) {
          if (path.size() <= static_cast<std::size_t>(delta)) continue;
          acc += structure_moment(path, options.q_grid[iq], delta);
          ++used;
        }
        if (used == 0 || !(acc > 0.0)) continue;
        x.push_back(std::log(static_cast<double>(delta)));
        y.push_back(std::log(acc / used));
      }
      const Regression r = regress_log_log(x, y);
      if (!r.ok) throw DataError("structure function: not enough usable deltas");
      report.Hq[iq] = r.slope;
      report.Aq_log[iq] = r.intercept;
      report.r2[iq] = r.r2;
    }
    report.days_averaged = static_cast<int>(paths.size());
    return report;
  }

  int days = 0;
  for (const auto& path : paths) {
    std::vector<Regression> fits(nq);
    bool usable = true;
    for (std::size_t iq = 0; iq < nq && usable; ++iq) {
      std::vector<double> x;
      std::vector<double> y;
      for (int delta : options.delta_grid) {
        if (path.size() <= static_cast<std::size_t>(delta)) continue;
        const double m = structure_moment(path, options.q_grid[iq], delta);
        if (!(m > 0.0)) continue;
        x.push_back(std::log(static_cast<double>(delta)));
        y.push_back(std::log(m));
      }
      fits[iq] = regress_log_log(x, y);
      usable = fits[iq].ok;
    }
    if (!usable) continue;
    for (std::size_t iq = 0; iq < nq; ++iq) {
      report.Hq[iq] += fits[iq].slope;
      report.Aq_log[iq] += fits[iq].intercept;
      report.r2[iq] += fits[iq].r2;
    }
    ++days;
  }
  if (days == 0) throw DataError("structure function: no day had enough usable increments");
  for (std::size_t iq = 0; iq < nq; ++iq) {
    report.Hq[iq] /= days;
    report.Aq_log[iq] /= days;
    report.r2[iq] /= days;
  }
  report.days_averaged = days;
  return report;
}

StructureFunctionReport structure_function(const DayPanel& panel, const SubordinationSpec& spec,
                                           const StructureFunctionOptions& options) {
  if (panel.days.empty()) throw DataError("structure function needs a non-empty panel");
  std::vector<std::vector<double>> paths;
  paths.reserve(panel.days.size());
  for (const auto& day : panel.days) {
    const auto series = subordinate(day, spec);
    std::vector<double> path(series.tau.size());
    for (std::size_t j = 0; j < series.tau.size(); ++j) {
      path[j] = day.log_prices[static_cast<std::size_t>(series.tau[j])];
    }
    paths.push_back(std::move(path));
  }
  return structure_function_paths(paths, options);
}

LjungBoxResult ljung_box(std::span<const double> series, int lags) {
  if (lags < 1) throw std::invalid_argument("Ljung-Box needs lags >= 1");
  const std::size_t n = series.size();
  if (n <= static_cast<std::size_t>(lags) + 1) {
    throw DataError("Ljung-Box needs more than lags + 1 observations");
  }
  const double m = numerics::mean(series);
  double c0 = 0.0;
  for (double v : series) c0 += (v - m) * (v - m);
  if (!(c0 > 0.0)) throw DataError("Ljung-Box: series has zero variance");
  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double ck = 0.0;
    for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) {
      ck += (series[t] - m) * (series[t - static_cast<std::size_t>(k)] - m);
    }
    const double rho = ck / c0;
    q += rho * rho / static_cast<double>(n - static_cast<std::size_t>(k));
  }
  const double nd = static_cast<double>(n);
  LjungBoxResult out;
  out.statistic = nd * (nd + 2.0) * q;
  out.lags = lags;
  const boost::math::chi_squared_distribution<double> chi2(lags);
  out.p_value = boost::math::cdf(boost::math::complement(chi2, out.statistic));
  return out;
}

ScalingBias scaling_bias(double mu, double sigma, int c, double theta) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (c < 1) throw std::invalid_argument("c must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  const double alpha = numerics::normal_quantile(theta);
  return {mu / std::sqrt(static_cast<double>(c)) + sigma * alpha, mu + sigma * alpha};
}

}  // namespace rrm
