#include "rrm/dh_benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rrm/numerics.hpp"

namespace rrm {

void DhConfig::validate() const {
  if (!(hurst >= 0.0 && hurst < 1.0)) throw std::invalid_argument("Hurst exponent must lie in [0, 1)");
}

RiskPair dh_risk_pair(std::span<const double> returns, const RiskSpec& spec, const DhConfig& config) {
  spec.validate();
  config.validate();
  if (returns.size() < 2) throw std::invalid_argument("DH benchmark needs at least 2 returns");
  std::vector<double> sorted(returns.begin(), returns.end());
  std::sort(sorted.begin(), sorted.end());
  const double q = numerics::quantile_type7(sorted, spec.theta);
  double sum = 0.0;
  std::size_t count = 0;
  for (double y : sorted) {
    if (y > q) break;
    sum += y;
    ++count;
  }
  const double e = count > 0 ? sum / static_cast<double>(count) : sorted.front();
  const double factor = std::pow(static_cast<double>(returns.size()), config.hurst);
  RiskPair pair;
  pair.theta = spec.theta;
  pair.var = factor * q;
  pair.es = factor * e;
  pair.method = RiskMethod::Dh;
  return pair;
}

}  // namespace rrm
