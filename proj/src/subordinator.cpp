#include "rrm/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rrm {
namespace {

constexpr int kTpvHalfWindow = 15;

std::vector<int> clock_grid(int c) {
  IntensitySeries flat;
  flat.lambda.assign(kSessionMinutes + 1, 1.0);
  flat.cumulative.resize(kSessionMinutes + 1);
  for (int i = 0; i <= kSessionMinutes; ++i) flat.cumulative[i] = i + 1.0;
  flat.total = kSessionMinutes + 1.0;
  return subordination_grid(flat, c);
}

}  // namespace

SubordinatorKind parse_subordinator_kind(std::string_view name) {
  if (name == "clock") return SubordinatorKind::Clock;
  if (name == "tpv") return SubordinatorKind::Tpv;
  if (name == "vol") return SubordinatorKind::Vol;
  throw std::invalid_argument("unknown subordinator '" + std::string(name) + "'");
}

std::string_view to_string(SubordinatorKind kind) {
  switch (kind) {
    case SubordinatorKind::Clock: return "clock";
    case SubordinatorKind::Tpv: return "tpv";
    case SubordinatorKind::Vol: return "vol";
  }
  return "?";
}

void SubordinationSpec::validate() const {
  if (c < 1 || c > kSessionMinutes) {
    throw std::invalid_argument("c must lie in [1, 390], got " + std::to_string(c));
  }
}

IntensitySeries intensity(const IntradayDay& day, SubordinatorKind kind) {
  IntensitySeries out;
  out.lambda.assign(kSessionMinutes + 1, 0.0);
  switch (kind) {
    case SubordinatorKind::Clock:
      std::fill(out.lambda.begin(), out.lambda.end(), 1.0);
      break;
    case SubordinatorKind::Vol:
      for (int i = 1; i <= kSessionMinutes; ++i) out.lambda[i] = day.volumes[i - 1];
      break;
    case SubordinatorKind::Tpv: {
      // term[l] = |dS_l|^{2/3} |dS_{l-1}|^{2/3} |dS_{l-2}|^{2/3} for l >= 3.
      std::vector<double> root(kSessionMinutes + 1, 0.0);
      for (int l = 1; l <= kSessionMinutes; ++l) {
        root[l] = std::cbrt(std::pow(day.log_prices[l] - day.log_prices[l - 1], 2));
      }
      for (int i = 0; i <= kSessionMinutes; ++i) {
        const int lo = std::max(i - kTpvHalfWindow, 0) + 3;
        const int hi = std::min(i + kTpvHalfWindow, kSessionMinutes);
        if (lo > hi) continue;
        double sum = 0.0;
        for (int l = lo; l <= hi; ++l) sum += root[l] * root[l - 1] * root[l - 2];
        out.lambda[i] = sum;
      }
      break;
    }
  }
  out.cumulative.resize(out.lambda.size());
  double running = 0.0;
  for (std::size_t i = 0; i < out.lambda.size(); ++i) {
    running += out.lambda[i];
    out.cumulative[i] = running;
  }
  out.total = running;
  return out;
}

std::vector<int> subordination_grid(const IntensitySeries& series, int c, bool* clock_fallback) {
  SubordinationSpec{SubordinatorKind::Clock, c}.validate();
  if (series.cumulative.size() != kSessionMinutes + 1) {
    throw std::invalid_argument("intensity series must have 391 entries");
  }
  const double base = series.cumulative[0];
  const double mass = series.cumulative[kSessionMinutes] - base;
  if (clock_fallback) *clock_fallback = false;
  if (!(mass > 0.0)) {
    if (clock_fallback) *clock_fallback = true;
    return clock_grid(c);
  }

  // bucket[l] = j such that (j-1)/c < M_l/M <= j/c; 0 when M_l = 0.
  std::vector<int> bucket(kSessionMinutes + 1, 0);
  for (int l = 1; l <= kSessionMinutes; ++l) {
    const double m = series.cumulative[l] - base;
    if (m <= 0.0) continue;
    const double scaled = c * m / mass;
    bucket[l] = std::clamp(static_cast<int>(std::ceil(scaled)), 1, c);
  }

  std::vector<int> tau(c + 1, 0);
  tau[c] = kSessionMinutes;
  for (int j = 1; j < c; ++j) {
    const int lo = tau[j - 1] + 1;
    const int hi = kSessionMinutes - (c - j);
    int chosen = -1;
    for (int l = hi; l >= lo; --l) {
      if (bucket[l] == j) {
        chosen = l;
        break;
      }
    }
    if (chosen < 0) {
      // Empty bucket: first element of the nearest later bucket that still
      // has an admissible index, else the next free minute.
      int best_bucket = c + 1;
      for (int l = lo; l <= hi; ++l) {
        if (bucket[l] > j && bucket[l] < best_bucket) {
          best_bucket = bucket[l];
          chosen = l;
        }
      }
      if (chosen < 0) chosen = lo;
    }
    tau[j] = chosen;
  }
  return tau;
}

std::vector<double> sample_returns(const std::vector<double>& log_prices,
                                   const std::vector<int>& tau) {
  std::vector<double> out(tau.size() > 0 ? tau.size() - 1 : 0);
  for (std::size_t j = 1; j < tau.size(); ++j) {
    out[j - 1] = log_prices[static_cast<std::size_t>(tau[j])] -
                 log_prices[static_cast<std::size_t>(tau[j - 1])];
  }
  return out;
}

SubordinatedSeries subordinate(const IntradayDay& day, const SubordinationSpec& spec) {
  spec.validate();
  SubordinatedSeries out;
  out.tau = subordination_grid(intensity(day, spec.kind), spec.c, &out.clock_fallback);
  out.returns = sample_returns(day.log_prices, out.tau);
  return out;
}

}  // namespace rrm
