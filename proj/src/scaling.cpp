#include "rrm/scaling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>

#include "rrm/errors.hpp"
#include "rrm/student_t.hpp"

namespace rrm {
namespace {

constexpr double kCutoffLogModulus = -27.631021115928547;  // log(1e-12)
constexpr double kRootTolerance = 1e-8;
constexpr std::size_t kBrentIterations = 60;
constexpr int kBrentRestarts = 10;
constexpr int kMaxBracketDoublings = 4;
constexpr double kFallbackAccept = 1e-4;
constexpr double kStartingPoint = -1e-3;
constexpr double kFarEnd = -0.2;
constexpr double kNearEnd = -1e-12;

// Ten log-spaced magnitudes from `from` to `to` (both > 0), inclusive.
std::vector<double> geomspace(double from, double to, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double lf = std::log(from);
  const double lt = std::log(to);
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = std::exp(lf + (lt - lf) * k / (n - 1));
  out.front() = from;
  out.back() = to;
  return out;
}

std::size_t panel_count(double distance, double omega_max) {
  const double half_periods = std::abs(distance) * omega_max / std::numbers::pi;
  std::size_t n = 4;
  while (static_cast<double>(n) < half_periods && n < 1024) n *= 2;
  return n;
}

double unit_variance(const TailModel& m) {
  return m.nu > 2.0 ? m.sigma * m.sigma * m.nu / (m.nu - 2.0)
                    : std::numeric_limits<double>::infinity();
}

// Number of innovation-variance units in the daily sum.
double daily_variance_weight(const TailModel& m) {
  if (!m.is_ma()) return m.c;
  const double phi = *m.phi;
  return phi * phi + (m.c - 1.0) * (1.0 + phi) * (1.0 + phi) + 1.0;
}

std::complex<double> from_log(double log_modulus, double phase) {
  return std::polar(std::exp(log_modulus), phase);
}

}  // namespace

RiskMethod parse_risk_method(std::string_view name) {
  if (name == "cf") return RiskMethod::Cf;
  if (name == "mc") return RiskMethod::Mc;
  if (name == "ensemble") return RiskMethod::Ensemble;
  if (name == "dh") return RiskMethod::Dh;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(RiskMethod method) {
  switch (method) {
    case RiskMethod::Cf: return "cf";
    case RiskMethod::Mc: return "mc";
    case RiskMethod::Ensemble: return "ensemble";
    case RiskMethod::Dh: return "dh";
  }
  return "?";
}

void RiskSpec::validate() const {
  if (!(theta > 0.0 && theta < 0.5)) throw std::invalid_argument("theta must lie in (0, 0.5)");
  if (es_grid_size < 1) throw std::invalid_argument("es_grid_size must be positive");
}

void McConfig::validate() const {
  if (batch_size == 0 || batch_size % 2 != 0) {
    throw std::invalid_argument("Monte-Carlo batch size must be positive and even");
  }
}

CharFn hf_char_fn(const TailModel& model) {
  model.validate();
  return [mu = model.mu, sigma = model.sigma, nu = model.nu](double omega) {
    const LogCfValue v = standard_t_log_cf(sigma * std::abs(omega), nu);
    return from_log(v.log_value, mu * omega);
  };
}

CharFn daily_char_fn(const TailModel& model) {
  model.validate();
  const CharFn hf = hf_char_fn(model);
  if (!model.is_ma()) {
    return [hf, c = model.c](double omega) { return std::pow(hf(omega), c); };
  }
  return [hf, c = model.c, phi = *model.phi](double omega) {
    return hf(omega) * hf(phi * omega) * std::pow(hf((1.0 + phi) * omega), c - 1);
  };
}

double gil_pelaez_cdf(const CharFn& phi, double x) {
  double omega_max = 1.0;
  int doublings = 0;
  while (std::abs(phi(omega_max)) > 1e-12) {
    omega_max *= 2.0;
    if (++doublings > 200) throw NumericalError("characteristic function does not decay");
  }
  numerics::QuadratureOptions options;
  options.abs_tol = 1e-11;
  options.rel_tol = 1e-11;
  options.max_intervals = 8000;
  options.initial_panels = panel_count(x, omega_max);
  auto integrand = [&](double w) {
    return (std::exp(std::complex<double>(0.0, -w * x)) * phi(w)).imag() / w;
  };
  const auto r = numerics::integrate(integrand, 0.0, omega_max, options);
  if (!r.converged && r.abs_error > 1e-8) {
    throw NumericalError("Gil-Pelaez quadrature did not converge (error estimate " +
                             std::to_string(r.abs_error) + ")",
                         r.abs_error);
  }
  return std::clamp(0.5 - r.value / std::numbers::pi, 0.0, 1.0);
}

DailyDistribution::DailyDistribution(const TailModel& model) : model_(model) {
  model_.validate();
  const double phi = model_.phi_or_zero();
  mean_ = model_.mu * model_.c * (1.0 + phi);
  variance_ = unit_variance(model_) * daily_variance_weight(model_);

  // |phi_Y| is decreasing in w (scale mixture of normals), so bracket the
  // cutoff by doubling and then bisect.
  double hi = std::isfinite(variance_) && variance_ > 0.0 ? 1.0 / std::sqrt(variance_)
                                                          : 1.0 / model_.sigma;
  double lo = 0.0;
  for (int k = 0; log_modulus(hi).first > kCutoffLogModulus; ++k) {
    if (k > 200) throw NumericalError("daily characteristic function does not decay");
    lo = hi;
    hi *= 2.0;
  }
  for (int k = 0; k < 30; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (log_modulus(mid).first > kCutoffLogModulus) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  omega_max_ = hi;
  cache_.clear();
}

std::pair<double, double> DailyDistribution::log_modulus(double omega) {
  const auto key = std::bit_cast<std::uint64_t>(omega);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const double s = model_.sigma;
  std::pair<double, double> out;
  if (!model_.is_ma()) {
    const LogCfValue v = standard_t_log_cf(s * omega, model_.nu);
    out = {model_.c * v.log_value, model_.c * s * v.derivative};
  } else {
    const double phi = *model_.phi;
    const double a0 = s;
    const double a1 = s * std::abs(phi);
    const double a2 = s * std::abs(1.0 + phi);
    const LogCfValue v0 = standard_t_log_cf(a0 * omega, model_.nu);
    const LogCfValue v1 = standard_t_log_cf(a1 * omega, model_.nu);
    const LogCfValue v2 = standard_t_log_cf(a2 * omega, model_.nu);
    const double k = model_.c - 1.0;
    out = {v0.log_value + v1.log_value + k * v2.log_value,
           a0 * v0.derivative + a1 * v1.derivative + k * a2 * v2.derivative};
  }
  cache_.emplace(key, out);
  return out;
}

double DailyDistribution::integrate(const std::function<double(double)>& f, double distance) {
  numerics::QuadratureOptions options;
  options.abs_tol = 1e-12;
  options.rel_tol = 1e-10;
  options.max_intervals = 8000;
  options.initial_panels = panel_count(distance, omega_max_);
  const auto r = numerics::integrate(f, 0.0, omega_max_, options);
  last_error_ = r.abs_error / std::numbers::pi;
  if (!r.converged && r.abs_error > 1e-8) {
    throw NumericalError("Gil-Pelaez quadrature did not converge (error estimate " +
                             std::to_string(r.abs_error) + ")",
                         r.abs_error);
  }
  return r.value / std::numbers::pi;
}

double DailyDistribution::cdf(double x) {
  const double d = x - mean_;
  if (d == 0.0) {
    last_error_ = 0.0;
    return 0.5;
  }
  const double value = integrate(
      [&](double w) { return std::exp(log_modulus(w).first) * std::sin(d * w) / w; }, d);
  return std::clamp(0.5 + value, 0.0, 1.0);
}

double DailyDistribution::partial_expectation(double x) {
  const double d = x - mean_;
  const double f = cdf(x);
  const double error_f = last_error_;
  const double tail = integrate(
      [&](double w) {
        const auto [lg, dlg] = log_modulus(w);
        return std::exp(lg) * dlg * std::cos(d * w) / w;
      },
      d);
  last_error_ = std::max(last_error_, error_f * std::abs(mean_));
  return mean_ * f + tail;
}

std::vector<double> cf_quantiles(DailyDistribution& dist, std::span<const double> levels,
                                 RiskDiagnostics* diagnostics) {
  RiskDiagnostics local;
  RiskDiagnostics& diag = diagnostics ? *diagnostics : local;
  if (levels.empty()) return {};
  double min_level = 1.0;
  for (double level : levels) {
    if (!(level > 0.0 && level < 0.5)) throw std::invalid_argument("quantile levels must lie in (0, 0.5)");
    min_level = std::min(min_level, level);
  }
  const double m = dist.mean();
  const double var = dist.variance();
  const double tol = std::isfinite(var) ? std::min(kRootTolerance, 1e-4 * std::sqrt(var)) : kRootTolerance;

  // Exact evaluation, tracking the quadrature error.
  auto exact = [&](double x) {
    const double f = dist.cdf(x);
    diag.quadrature_error = std::max(diag.quadrature_error, dist.last_error());
    return f;
  };
  // Tabulation value: the sign of F - level is all that matters there, so
  // points provably outside every target skip the quadrature. At or above
  // the mean F >= 1/2; far below it Cantelli gives F <= var / (var + d^2).
  auto probe = [&](double x) {
    if (x >= m) return 0.5;
    if (std::isfinite(var)) {
      const double d = m - x;
      const double bound = var / (var + d * d);
      if (bound < 0.5 * min_level) return bound;
    }
    return exact(x);
  };

  std::vector<double> grid;
  for (double g : geomspace(-kFarEnd, -kStartingPoint, 10)) grid.push_back(-g);
  for (double g : geomspace(-kStartingPoint, -kNearEnd, 10)) {
    if (-g != grid.back()) grid.push_back(-g);
  }
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = probe(grid[k]);

  std::vector<double> roots;
  roots.reserve(levels.size());
  for (double level : levels) {
    // Widen to the left when the quantile lies below the far end.
    for (int k = 0; values.front() >= level; ++k) {
      if (k == kMaxBracketDoublings) {
        throw NumericalError("quantile lies below the widened bracket", values.front() - level);
      }
      grid.insert(grid.begin(), 2.0 * grid.front());
      values.insert(values.begin(), probe(grid.front()));
      ++diag.bracket_expansions;
    }
    // The near end is just below zero; a positive quantile needs the mirrored
    // positive candidates.
    if (values.back() < level) {
      for (double g : geomspace(-kNearEnd, -kFarEnd, 10)) {
        grid.push_back(g);
        values.push_back(probe(g));
      }
      for (int k = 0; values.back() < level; ++k) {
        if (k == kMaxBracketDoublings) {
          throw NumericalError("quantile lies above the widened bracket", level - values.back());
        }
        grid.push_back(2.0 * grid.back());
        values.push_back(probe(grid.back()));
      }
      ++diag.bracket_expansions;
    }
    std::size_t k = 0;
    while (!(values[k] < level && values[k + 1] >= level)) ++k;
    double a = grid[k];
    double b = grid[k + 1];
    double fa = values[k] - level;
    double fb = values[k + 1] - level;

    auto f = [&](double x) { return exact(x) - level; };
    bool done = false;
    double root = 0.0;
    double residual = 0.0;
    for (int attempt = 0; attempt <= kBrentRestarts && !done; ++attempt) {
      if (fb == 0.0) {
        root = b;
        residual = 0.0;
        done = true;
        break;
      }
      const auto r = numerics::brent_root(f, a, b, fa, fb, tol, kBrentIterations);
      diag.root_iterations += static_cast<int>(r.iterations);
      if (r.converged) {
        root = r.root;
        residual = std::abs(r.f_root);
        done = true;
        break;
      }
      // Shrink the bracket to the side of the last iterate that keeps the
      // sign change and try again.
      if (r.f_root < 0.0) {
        a = r.root;
        fa = r.f_root;
      } else {
        b = r.root;
        fb = r.f_root;
      }
    }
    if (!done) {
      diag.fallback_used = true;
      const auto [x_best, f_best] = boost::math::tools::brent_find_minima(
          [&](double x) { return std::abs(f(x)); }, a, b, 40);
      if (!(f_best < kFallbackAccept)) {
        throw NumericalError("quantile search failed after all fallbacks", f_best);
      }
      root = x_best;
      residual = f_best;
    }
    diag.root_residual = std::max(diag.root_residual, residual);
    roots.push_back(root);
  }
  return roots;
}

std::vector<RiskPair> cf_risk_pairs(const TailModel& model, std::span<const RiskSpec> specs) {
  for (const auto& s : specs) s.validate();
  DailyDistribution dist(model);
  std::vector<RiskPair> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    RiskPair pair;
    pair.theta = spec.theta;
    pair.method = RiskMethod::Cf;
    if (spec.es_rule == EsRule::QuantileGrid) {
      std::vector<double> levels;
      for (int j = 1; j <= spec.es_grid_size; ++j) levels.push_back(j * spec.theta / spec.es_grid_size);
      const auto q = cf_quantiles(dist, levels, &pair.diagnostics);
      pair.var = q.back();
      double sum = 0.0;
      for (double v : q) sum += v;
      pair.es = sum / static_cast<double>(q.size());
    } else {
      const double level = spec.theta;
      pair.var = cf_quantiles(dist, std::span<const double>(&level, 1), &pair.diagnostics).front();
      const double pe = dist.partial_expectation(pair.var);
      pair.diagnostics.quadrature_error = std::max(pair.diagnostics.quadrature_error, dist.last_error());
      const double f = dist.cdf(pair.var);
      pair.es = std::min(pe / f, pair.var);
    }
    if (model.nu < 2.5) pair.diagnostics.warnings.push_back("nu below 2.5: heavy tails, unstable scaling");
    out.push_back(std::move(pair));
  }
  return out;
}

RiskPair cf_risk_pair(const TailModel& model, const RiskSpec& spec) {
  return cf_risk_pairs(model, std::span<const RiskSpec>(&spec, 1)).front();
}

std::vector<double> simulate_daily_returns(const TailModel& model, const McConfig& config) {
  model.validate();
  config.validate();
  std::mt19937_64 rng(config.seed);
  const TQuantileTable quantile(model.nu);
  auto draw = [&](std::mt19937_64& g) { return quantile.sample(g); };
  const double phi = model.phi_or_zero();
  const double center = model.mu * model.c * (1.0 + phi);
  const std::size_t pairs = config.batch_size / 2;
  std::vector<double> out(config.batch_size);
  for (std::size_t p = 0; p < pairs; ++p) {
    double shock = 0.0;
    if (!model.is_ma()) {
      for (int j = 0; j < model.c; ++j) shock += draw(rng);
    } else {
      // xi_0 enters with weight phi, xi_1..xi_{c-1} with 1 + phi, xi_c with 1.
      shock = phi * draw(rng);
      double middle = 0.0;
      for (int j = 1; j < model.c; ++j) middle += draw(rng);
      shock += (1.0 + phi) * middle + draw(rng);
    }
    shock *= model.sigma;
    // Antithetic partner: every u replaced by 1 - u, and Q(1 - u) = -Q(u).
    out[2 * p] = center + shock;
    out[2 * p + 1] = center - shock;
  }
  std::sort(out.begin(), out.end());
  return out;
}

RiskPair empirical_risk_pair(std::span<const double> sorted, double theta) {
  if (sorted.empty()) throw std::invalid_argument("empirical_risk_pair: no samples");
  RiskPair pair;
  pair.theta = theta;
  pair.var = numerics::quantile_type7(sorted, theta);
  const auto end = std::lower_bound(sorted.begin(), sorted.end(), pair.var);
  const auto count = static_cast<std::size_t>(end - sorted.begin());
  if (count == 0) {
    throw NumericalError("no simulated values below the quantile");
  }
  double sum = 0.0;
  for (auto it = sorted.begin(); it != end; ++it) sum += *it;
  pair.es = sum / static_cast<double>(count);
  pair.diagnostics.samples = sorted.size();
  return pair;
}

std::vector<RiskPair> mc_risk_pairs(const TailModel& model, std::span<const RiskSpec> specs,
                                    const McConfig& config) {
  for (const auto& s : specs) s.validate();
  const auto sample = simulate_daily_returns(model, config);
  std::vector<RiskPair> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    RiskPair pair;
    if (sample.front() == sample.back()) {
      // Point mass (e.g. sigma underflowing against mu): nothing lies below.
      pair.theta = spec.theta;
      pair.var = pair.es = sample.front();
      pair.diagnostics.samples = sample.size();
    } else {
      pair = empirical_risk_pair(sample, spec.theta);
    }
    pair.method = RiskMethod::Mc;
    if (model.nu < 2.5) pair.diagnostics.warnings.push_back("nu below 2.5: heavy tails, unstable scaling");
    out.push_back(std::move(pair));
  }
  return out;
}

RiskPair mc_risk_pair(const TailModel& model, const RiskSpec& spec, const McConfig& config) {
  return mc_risk_pairs(model, std::span<const RiskSpec>(&spec, 1), config).front();
}

RiskPair ensemble_risk_pair(const RiskPair& cf, const RiskPair& mc) {
  if (cf.theta != mc.theta) throw std::invalid_argument("ensemble inputs must share theta");
  RiskPair out;
  out.theta = cf.theta;
  out.var = 0.5 * (cf.var + mc.var);
  out.es = 0.5 * (cf.es + mc.es);
  out.method = RiskMethod::Ensemble;
  out.diagnostics.quadrature_error = cf.diagnostics.quadrature_error;
  out.diagnostics.root_residual = cf.diagnostics.root_residual;
  out.diagnostics.root_iterations = cf.diagnostics.root_iterations;
  out.diagnostics.bracket_expansions = cf.diagnostics.bracket_expansions;
  out.diagnostics.fallback_used = cf.diagnostics.fallback_used;
  out.diagnostics.samples = mc.diagnostics.samples;
  out.diagnostics.warnings = cf.diagnostics.warnings;
  return out;
}

}  // namespace rrm
