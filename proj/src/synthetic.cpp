#include "rrm/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "rrm/numerics.hpp"
#include "rrm/parallel.hpp"
#include "rrm/seeding.hpp"
#include "rrm/subordinator.hpp"

namespace rrm {
namespace {

constexpr std::uint64_t kOracleStream = 0x6f7261636c65ULL;  // "oracle"
constexpr std::uint64_t kBootstrapStream = 0x626f6f74ULL;
constexpr std::size_t kOracleBatch = 1 << 16;

double innovation_variance(const GeneratorSpec& spec) {
  const double s2 = spec.sigma * spec.sigma;
  return spec.family == Family::Gaussian ? s2 : s2 * spec.nu / (spec.nu - 2.0);
}

double variance_weight(int c, double phi) {
  return (c - 1.0) * (1.0 + phi) * (1.0 + phi) + 1.0 + phi * phi;
}

// Draws xi_1..xi_c into xi[1..c], then xi_0 into xi[0].
template <typename Draw>
void draw_innovations(std::vector<double>& xi, Draw&& draw) {
  for (std::size_t j = 1; j < xi.size(); ++j) xi[j] = draw();
  xi[0] = draw();
}

struct TailStats {
  double var = 0.0;
  double es = 0.0;
};

TailStats tail_stats(std::span<const double> sorted, double theta) {
  TailStats out;
  out.var = numerics::quantile_type7(sorted, theta);
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : sorted) {
    if (v >= out.var) break;
    sum += v;
    ++n;
  }
  out.es = n ? sum / static_cast<double>(n) : sorted.front();
  return out;
}

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "t") return Family::StudentT;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

Dependence parse_dependence(std::string_view name) {
  if (name == "iid") return Dependence::Iid;
  if (name == "ma1") return Dependence::Ma1;
  throw std::invalid_argument("unknown dependence '" + std::string(name) + "'");
}

std::string_view to_string(Family family) { return family == Family::Gaussian ? "gaussian" : "t"; }
std::string_view to_string(Dependence dependence) { return dependence == Dependence::Iid ? "iid" : "ma1"; }

void GeneratorSpec::validate() const {
  if (c < 1 || c > kSessionMinutes) throw std::invalid_argument("c must lie in [1, 390]");
  if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("|phi| must be < 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
  if (family == Family::StudentT && !(nu > 2.0)) throw std::invalid_argument("nu must exceed 2");
  if (n_days < 1) throw std::invalid_argument("n_days must be >= 1");
}

GeneratorSpec GeneratorSpec::calibrated(Family family, Dependence dependence, int c, double phi,
                                        double nu, double daily_mean_target, double daily_sd,
                                        int n_days, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.family = family;
  spec.dependence = dependence;
  spec.c = c;
  spec.phi = dependence == Dependence::Ma1 ? phi : 0.0;
  spec.nu = nu;
  spec.n_days = n_days;
  spec.seed = seed;
  const double p = spec.phi_or_zero();
  spec.mu = daily_mean_target / (c * (1.0 + p));
  double unit_sd = daily_sd / std::sqrt(variance_weight(c, p));
  if (family == Family::StudentT) unit_sd *= std::sqrt((nu - 2.0) / nu);
  spec.sigma = unit_sd;
  spec.validate();
  return spec;
}

double daily_mean(const GeneratorSpec& spec) { return spec.c * (1.0 + spec.phi_or_zero()) * spec.mu; }

double daily_variance(const GeneratorSpec& spec) {
  return variance_weight(spec.c, spec.phi_or_zero()) * innovation_variance(spec);
}

std::vector<Date> business_days(Date first, int count) {
  std::vector<Date> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  std::chrono::sys_days day{first};
  while (static_cast<int>(out.size()) < count) {
    const std::chrono::weekday wd{day};
    if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.emplace_back(day);
    day += std::chrono::days{1};
  }
  return out;
}

SyntheticPanel generate(const GeneratorSpec& spec) {
  spec.validate();
  SyntheticPanel panel;
  panel.spec = spec;
  panel.dates = business_days(Date{std::chrono::year{2000}, std::chrono::January, std::chrono::day{3}}, spec.n_days);
  panel.returns.assign(static_cast<std::size_t>(spec.n_days), std::vector<double>(static_cast<std::size_t>(spec.c)));
  const double phi = spec.phi_or_zero();
  const bool ma = spec.dependence == Dependence::Ma1;
  parallel_for(static_cast<std::size_t>(spec.n_days), default_jobs(), [&](std::size_t d) {
    std::mt19937_64 rng(derive_seed(spec.seed, static_cast<std::uint64_t>(d)));
    std::vector<double> xi(static_cast<std::size_t>(spec.c) + 1);
    if (spec.family == Family::Gaussian) {
      std::normal_distribution<double> z;
      draw_innovations(xi, [&] { return spec.mu + spec.sigma * z(rng); });
    } else {
      std::student_t_distribution<double> z(spec.nu);
      draw_innovations(xi, [&] { return spec.mu + spec.sigma * z(rng); });
    }
    auto& row = panel.returns[d];
    for (std::size_t j = 1; j < xi.size(); ++j) row[j - 1] = ma ? phi * xi[j - 1] + xi[j] : xi[j];
  });
  return panel;
}

DayPanel to_day_panel(const SyntheticPanel& panel, std::string asset_id) {
  IntensitySeries flat;
  flat.lambda.assign(kSessionMinutes + 1, 1.0);
  flat.cumulative.resize(kSessionMinutes + 1);
  for (int i = 0; i <= kSessionMinutes; ++i) flat.cumulative[static_cast<std::size_t>(i)] = i + 1.0;
  flat.total = kSessionMinutes + 1.0;
  const auto tau = subordination_grid(flat, panel.spec.c);

  DayPanel out;
  out.asset_id = std::move(asset_id);
  out.days.reserve(panel.returns.size());
  const double start = std::log(100.0);
  for (std::size_t d = 0; d < panel.returns.size(); ++d) {
    IntradayDay day;
    day.date = panel.dates[d];
    day.log_prices.assign(kSessionMinutes + 1, start);
    day.volumes.assign(kSessionMinutes, 1.0);
    double level = start;
    std::size_t j = 1;
    for (int i = 1; i <= kSessionMinutes; ++i) {
      if (j < tau.size() && tau[j] == i) {
        level += panel.returns[d][j - 1];
        ++j;
      }
      day.log_prices[static_cast<std::size_t>(i)] = level;
    }
    out.days.push_back(std::move(day));
  }
  return out;
}

GroundTruth gaussian_ground_truth(const GeneratorSpec& spec, std::span<const double> thetas) {
  if (spec.family != Family::Gaussian) throw std::invalid_argument("analytic truth needs a Gaussian spec");
  spec.validate();
  const double m = daily_mean(spec);
  const double s = std::sqrt(daily_variance(spec));
  GroundTruth out;
  out.method = TruthMethod::Analytic;
  for (double theta : thetas) {
    const double z = numerics::normal_quantile(theta);
    out.theta.push_back(theta);
    out.var_true.push_back(m + s * z);
    out.es_true.push_back(m - s * numerics::normal_pdf(z) / theta);
    out.var_se.push_back(0.0);
    out.es_se.push_back(0.0);
  }
  return out;
}

GroundTruth t_ground_truth_oracle(const GeneratorSpec& spec, std::span<const double> thetas,
                                  std::size_t oracle_n, std::size_t n_boot) {
  if (spec.family != Family::StudentT) throw std::invalid_argument("oracle truth needs a Student-t spec");
  spec.validate();
  if (oracle_n < 2) throw std::invalid_argument("oracle_n must be at least 2");
  const double phi = spec.phi_or_zero();
  const bool ma = spec.dependence == Dependence::Ma1;
  std::vector<double> sample(oracle_n);
  const std::size_t batches = (oracle_n + kOracleBatch - 1) / kOracleBatch;
  const std::uint64_t oracle_seed = derive_seed(spec.seed, kOracleStream);
  parallel_for(batches, default_jobs(), [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(oracle_seed, static_cast<std::uint64_t>(b)));
    std::student_t_distribution<double> z(spec.nu);
    std::vector<double> xi(static_cast<std::size_t>(spec.c) + 1);
    const std::size_t end = std::min(oracle_n, (b + 1) * kOracleBatch);
    for (std::size_t i = b * kOracleBatch; i < end; ++i) {
      draw_innovations(xi, [&] { return spec.mu + spec.sigma * z(rng); });
      double sum = 0.0;
      for (std::size_t j = 1; j < xi.size(); ++j) sum += ma ? phi * xi[j - 1] + xi[j] : xi[j];
      sample[i] = sum;
    }
  });
  std::sort(sample.begin(), sample.end());

  GroundTruth out;
  out.method = TruthMethod::McOracle;
  out.oracle_n = oracle_n;
  std::mt19937_64 boot_rng(derive_seed(oracle_seed, kBootstrapStream));
  const double n = static_cast<double>(oracle_n);
  for (double theta : thetas) {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
    const TailStats point = tail_stats(sample, theta);
    out.theta.push_back(theta);
    out.var_true.push_back(point.var);
    out.es_true.push_back(point.es);

    // A resample's theta-quantile and tail mean only involve its lowest order
    // statistics, which come from the lowest `tail` points of the sample with
    // overwhelming probability. The number of draws landing there is
    // binomial; each lands uniformly on one of them.
    const double h = (n - 1.0) * theta;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    const auto tail = std::min<std::size_t>(
        oracle_n, static_cast<std::size_t>(theta * n + 8.0 * std::sqrt(theta * n) + 50.0));
    std::binomial_distribution<std::size_t> landed(oracle_n, static_cast<double>(tail) / n);
    std::uniform_int_distribution<std::size_t> pick(0, tail - 1);
    std::vector<std::uint32_t> counts(tail);
    std::vector<double> var_boot;
    std::vector<double> es_boot;
    for (std::size_t b = 0; b < n_boot; ++b) {
      std::fill(counts.begin(), counts.end(), 0u);
      const std::size_t k = landed(boot_rng);
      if (k < lo + 2) continue;
      for (std::size_t i = 0; i < k; ++i) ++counts[pick(boot_rng)];
      // Order statistics lo and lo + 1 of the resample.
      double x_lo = 0.0;
      double x_hi = 0.0;
      std::size_t seen = 0;
      for (std::size_t i = 0; i < tail && seen <= lo + 1; ++i) {
        const std::size_t next = seen + counts[i];
        if (seen <= lo && lo < next) x_lo = sample[i];
        if (seen <= lo + 1 && lo + 1 < next) x_hi = sample[i];
        seen = next;
      }
      const double q = x_lo + frac * (x_hi - x_lo);
      double sum = 0.0;
      std::size_t below = 0;
      for (std::size_t i = 0; i < tail && sample[i] < q; ++i) {
        sum += counts[i] * sample[i];
        below += counts[i];
      }
      var_boot.push_back(q);
      es_boot.push_back(below ? sum / static_cast<double>(below) : q);
    }
    out.var_se.push_back(var_boot.size() > 1 ? numerics::stddev(var_boot) : 0.0);
    out.es_se.push_back(es_boot.size() > 1 ? numerics::stddev(es_boot) : 0.0);
  }
  return out;
}

GroundTruth ground_truth(const GeneratorSpec& spec, std::span<const double> thetas, std::size_t oracle_n) {
  return spec.family == Family::Gaussian ? gaussian_ground_truth(spec, thetas)
                                         : t_ground_truth_oracle(spec, thetas, oracle_n);
}

}  // namespace rrm
