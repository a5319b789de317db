#pragma once

#include <span>

#include "rrm/risk.hpp"

namespace rrm {

struct DhConfig {
  double hurst = 0.5;

  void validate() const;  // 0 < H < 1; H = 0 is allowed for experiments
};

// Realized-quantile benchmark: type-7 empirical theta-quantile of the intraday
// returns and the mean of returns at or below it, both multiplied by c^H.
RiskPair dh_risk_pair(std::span<const double> returns, const RiskSpec& spec,
                      const DhConfig& config = {});

}  // namespace rrm
