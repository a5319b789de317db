#pragma once

#include <string_view>
#include <vector>

#include "rrm/market_data.hpp"

namespace rrm {

enum class SubordinatorKind { Clock, Tpv, Vol };

SubordinatorKind parse_subordinator_kind(std::string_view name);  // clock|tpv|vol
std::string_view to_string(SubordinatorKind kind);

// Per-minute market activity lambda_0..lambda_390 with its running sum.
struct IntensitySeries {
  std::vector<double> lambda;
  std::vector<double> cumulative;
  double total = 0.0;
};

struct SubordinationSpec {
  SubordinatorKind kind = SubordinatorKind::Clock;
  int c = 39;

  void validate() const;  // throws std::invalid_argument unless 1 <= c <= 390
};

struct SubordinatedSeries {
  std::vector<int> tau;         // tau(0) = 0 < ... < tau(c) = 390
  std::vector<double> returns;  // Y_j = S_tau(j) - S_tau(j-1)
  // Set when the day carried no activity and the clock grid was used instead.
  bool clock_fallback = false;
};

IntensitySeries intensity(const IntradayDay& day, SubordinatorKind kind);

// Splits the cumulative activity of intervals 1..390 into c equal-mass buckets
// and samples the log price at the last minute of each bucket.
std::vector<int> subordination_grid(const IntensitySeries& intensity, int c,
                                    bool* clock_fallback = nullptr);

SubordinatedSeries subordinate(const IntradayDay& day, const SubordinationSpec& spec);

// Returns Y_j for an explicit grid; used by diagnostics and tests.
std::vector<double> sample_returns(const std::vector<double>& log_prices,
                                   const std::vector<int>& tau);

}  // namespace rrm
