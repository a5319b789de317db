#include "rrm/student_t.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

namespace rrm {
namespace {

constexpr int kOctaves = 40;
constexpr int kPerOctave = 64;

// log K_mu(z) and K_{mu+1}(z) / K_mu(z) for large z from the Hankel expansion.
void bessel_k_large_argument(double mu, double z, double& log_k, double& ratio) {
  auto series = [z](double order) {
    const double m4 = 4.0 * order * order;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
      const double odd = 2.0 * k - 1.0;
      term *= (m4 - odd * odd) / (k * 8.0 * z);
      sum += term;
    }
    return sum;
  };
  const double s0 = series(mu);
  const double s1 = series(mu + 1.0);
  log_k = 0.5 * std::log(std::numbers::pi / (2.0 * z)) - z + std::log(s0);
  ratio = s1 / s0;
}

}  // namespace

double t_logpdf(double x, double mu, double sigma, double nu) {
  const double z = (x - mu) / sigma;
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * std::numbers::pi) - std::log(sigma) -
         0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

TLogDensity::TLogDensity(double sigma, double nu)
    : norm_(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
            0.5 * std::log(nu * std::numbers::pi) - std::log(sigma)),
      half_nu_plus_one_(0.5 * (nu + 1.0)),
      inv_nu_sigma2_(1.0 / (nu * sigma * sigma)) {}

LogCfValue standard_t_log_cf(double u, double nu) {
  const double order = 0.5 * nu;
  const double root_nu = std::sqrt(nu);
  const double z = root_nu * std::abs(u);
  if (z == 0.0) return {0.0, 0.0};
  if (z < 1e-10) {
    // psi(u) = 1 - z^2 / (4 (v - 1)) + o(z^2) for v > 1.
    const double k = 1.0 / (4.0 * (order - 1.0));
    return {-k * z * z, -2.0 * k * z * root_nu};
  }

  const double whole = std::floor(order);
  const double frac = order - whole;
  double log_k;
  double ratio;  // K_{a}/K_{a-1}, starting at a = frac + 1
  if (z > 500.0) {
    bessel_k_large_argument(frac, z, log_k, ratio);
  } else {
    const double k0 = std::cyl_bessel_k(frac, z);
    const double k1 = std::cyl_bessel_k(frac + 1.0, z);
    log_k = std::log(k0);
    ratio = k1 / k0;
  }

  // Walk the order from frac+1 up to `order`, accumulating log K via the
  // product of ratios; frexp keeps the running product in range.
  double mantissa = ratio;
  long exponent_sum = 0;
  double a = frac + 1.0;
  const int steps = static_cast<int>(whole) - 1;
  for (int k = 0; k < steps; ++k) {
    ratio = 2.0 * a / z + 1.0 / ratio;
    a += 1.0;
    mantissa *= ratio;
    int e;
    mantissa = std::frexp(mantissa, &e);
    exponent_sum += e;
  }
  log_k += std::log(mantissa) + static_cast<double>(exponent_sum) * std::numbers::ln2;

  LogCfValue out;
  out.log_value = log_k + order * std::log(z) - std::lgamma(order) -
                  (order - 1.0) * std::numbers::ln2;
  if (out.log_value > 0.0) out.log_value = 0.0;
  out.derivative = -root_nu / ratio;
  return out;
}

TQuantileTable::TQuantileTable(double nu) : nu_(nu) {
  const std::size_t stride = kPerOctave + 1;
  value_.resize(stride * kOctaves);
  slope_.resize(stride * kOctaves);
  for (int o = 1; o <= kOctaves; ++o) {
    const double scale = std::ldexp(1.0, -o);
    const double cell = scale * 0.5 / kPerOctave;
    for (int i = 0; i <= kPerOctave; ++i) {
      const std::size_t at = static_cast<std::size_t>(o - 1) * stride + static_cast<std::size_t>(i);
      if (i == kPerOctave && o > 1) {
        // u = 2^-o is node 0 of the next octave up, already computed.
        value_[at] = value_[static_cast<std::size_t>(o - 2) * stride];
      } else {
        value_[at] = exact((0.5 + 0.5 * i / kPerOctave) * scale);
      }
      const double density = std::exp(t_logpdf(value_[at], 0.0, 1.0, nu_));
      slope_[at] = cell / density;
    }
  }
}

double TQuantileTable::exact(double u) const {
  if (u == 0.5) return 0.0;
  return boost::math::quantile(boost::math::students_t_distribution<double>(nu_), u);
}

double TQuantileTable::operator()(double u) const {
  if (!(u > 0.0 && u < 1.0)) return u <= 0.0 ? -HUGE_VAL : HUGE_VAL;
  const bool upper = u > 0.5;
  const double v = upper ? 1.0 - u : u;
  if (v == 0.5) return 0.0;
  const double r = v * 0x1.0p53 - 0.5;
  double out;
  if (r >= 0.0 && r == std::floor(r) && r < 0x1.0p52) {
    out = lower_bits(static_cast<std::uint64_t>(r));
  } else {
    int e = 0;
    const double m = std::frexp(v, &e);
    const int o = -e;
    if (o > kOctaves) {
      out = exact(v);
    } else {
      const double s = (m - 0.5) * (2.0 * kPerOctave);
      const int i = std::min(static_cast<int>(s), kPerOctave - 1);
      const double t = s - i;
      const std::size_t at = static_cast<std::size_t>(o - 1) * (kPerOctave + 1) + static_cast<std::size_t>(i);
      const double t2 = t * t;
      const double t3 = t2 * t;
      out = (2 * t3 - 3 * t2 + 1) * value_[at] + (t3 - 2 * t2 + t) * slope_[at] +
            (-2 * t3 + 3 * t2) * value_[at + 1] + (t3 - t2) * slope_[at + 1];
    }
  }
  return upper ? -out : out;
}

}  // namespace rrm
