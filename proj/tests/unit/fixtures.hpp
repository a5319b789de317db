#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "rrm/market_data.hpp"

namespace rrm::fixture {

inline IntradayDay make_day(std::vector<double> log_prices, std::vector<double> volumes = {},
                            const std::string& date = "2020-01-02") {
  IntradayDay day;
  day.date = parse_date(date);
  day.log_prices = std::move(log_prices);
  day.volumes = volumes.empty() ? std::vector<double>(kSessionMinutes, 1.0) : std::move(volumes);
  day.observed_minutes = kSessionMinutes + 1;
  return day;
}

inline IntradayDay random_walk_day(std::uint64_t seed, double step_sd = 1e-4, const std::string& date = "2020-01-02") {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, step_sd);
  std::uniform_real_distribution<double> v(100.0, 1000.0);
  std::vector<double> s(kSessionMinutes + 1);
  std::vector<double> vol(kSessionMinutes);
  s[0] = std::log(100.0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    s[i] = s[i - 1] + z(rng);
    vol[i - 1] = v(rng);
  }
  return make_day(std::move(s), std::move(vol), date);
}

}  // namespace rrm::fixture
