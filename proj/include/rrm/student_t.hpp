#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rrm {

// Log density of the location-scale Student's t (sigma is the scale, not the
// standard deviation; variance is sigma^2 * nu / (nu - 2)).
double t_logpdf(double x, double mu, double sigma, double nu);

// Precomputes the nu-dependent constants so that repeated density evaluations
// in a likelihood reduce to one log1p per observation.
class TLogDensity {
 public:
  TLogDensity(double sigma, double nu);
  double operator()(double residual) const {
    return norm_ - half_nu_plus_one_ * std::log1p(residual * residual * inv_nu_sigma2_);
  }

 private:
  double norm_;
  double half_nu_plus_one_;
  double inv_nu_sigma2_;
};

struct LogCfValue {
  double log_value = 0.0;   // log psi_nu(u)
  double derivative = 0.0;  // d/du log psi_nu(u)
};

// Characteristic function of the standard Student's t with nu > 2 degrees of
// freedom, psi(u) = K_{nu/2}(sqrt(nu)|u|) (sqrt(nu)|u|)^{nu/2} / (Gamma(nu/2) 2^{nu/2-1}),
// evaluated in log space. K_{nu/2} is built from K_f, K_{f+1} (f the fractional
// order) by upward recurrence on the ratio K_{a+1}/K_a, which never overflows.
// The derivative uses d/dz [z^v K_v(z)] = -z^v K_{v-1}(z). Valid for u >= 0.
LogCfValue standard_t_log_cf(double u, double nu);

// Inverse CDF of the standard Student's t. Exact quantiles (Boost.Math) are
// tabulated at 64 points per binary octave of u in [2^-41, 1/2] together with
// their slopes dQ/du = 1/f(Q(u)); lookups use cubic Hermite interpolation, and
// u below the table falls through to the exact quantile. Q(1 - u) = -Q(u).
class TQuantileTable {
 public:
  static constexpr int kOctaves = 40;
  static constexpr int kPerOctave = 64;

  explicit TQuantileTable(double nu);

  double operator()(double u) const;  // u in (0, 1)

  // Q(u) for u = (r + 1/2) 2^-53, r < 2^53: the draw used by sample().
  double from_bits(std::uint64_t r) const {
    constexpr std::uint64_t half = std::uint64_t{1} << 52;
    if (r >= half) return -lower_bits((std::uint64_t{1} << 53) - 1 - r);
    return lower_bits(r);
  }

  template <typename Urng>
  double sample(Urng& rng) const {
    return from_bits(static_cast<std::uint64_t>(rng()) >> 11);
  }

  double nu() const { return nu_; }

 private:
  // Lower half, u = (r + 1/2) 2^-53 < 1/2.
  double lower_bits(std::uint64_t r) const {
    const int p = 63 - std::countl_zero(r | 1);  // highest set bit
    const int o = 52 - p;                         // u in [2^-o-1, 2^-o)
    if (o > kOctaves || p < 7) return exact((static_cast<double>(r) + 0.5) * 0x1.0p-53);
    const std::uint64_t offset = r - (std::uint64_t{1} << p);
    const int shift = p - 6;  // 64 cells per octave
    const auto i = static_cast<std::size_t>(offset >> shift);
    const double t = (static_cast<double>(offset & ((std::uint64_t{1} << shift) - 1)) + 0.5) *
                     std::ldexp(1.0, -shift);
    const std::size_t at = static_cast<std::size_t>(o - 1) * (kPerOctave + 1) + i;
    const double y0 = value_[at];
    const double y1 = value_[at + 1];
    const double d0 = slope_[at];
    const double d1 = slope_[at + 1];
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
  }

  double exact(double u) const;

  double nu_;
  std::vector<double> value_;  // per octave: kPerOctave + 1 nodes
  std::vector<double> slope_;  // dQ per cell width
};

}  // namespace rrm
