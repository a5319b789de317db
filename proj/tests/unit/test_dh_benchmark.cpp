#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rrm/dh_benchmark.hpp"

using namespace rrm;

namespace {

RiskSpec at(double theta) {
  RiskSpec s;
  s.theta = theta;
  return s;
}

// Linear interpolation between order statistics at position (n - 1) theta,
// and the mean of the values at or below it.
std::pair<double, double> order_statistic_oracle(std::vector<double> y, double theta) {
  std::sort(y.begin(), y.end());
  const double h = (double(y.size()) - 1.0) * theta;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double q = y[lo] + (h - double(lo)) * (y[std::min(lo + 1, y.size() - 1)] - y[lo]);
  double sum = 0.0;
  int n = 0;
  for (double v : y) {
    if (v <= q) {
      sum += v;
      ++n;
    }
  }
  return {q, n > 0 ? sum / n : y.front()};
}

}  // namespace

TEST(DhRiskPair, SquareRootScaling) {
  // 100 returns whose 5% type-7 quantile is -0.002
  std::vector<double> y(100, 0.001);
  for (int k = 0; k < 4; ++k) y[static_cast<std::size_t>(k)] = -0.01 + 0.001 * k;
  y[4] = y[5] = -0.002;
  const auto p = dh_risk_pair(y, at(0.05));
  EXPECT_NEAR(p.var, -0.02, 1e-15);
  EXPECT_EQ(p.method, RiskMethod::Dh);
}

TEST(DhRiskPair, ConstantSample) {
  const std::vector<double> y(39, 0.0007);
  const auto p = dh_risk_pair(y, at(0.025));
  EXPECT_NEAR(p.var, std::sqrt(39.0) * 0.0007, 1e-15);
  EXPECT_NEAR(p.es, std::sqrt(39.0) * 0.0007, 1e-15);
}

TEST(DhRiskPair, MatchesOrderStatistics) {
  std::vector<double> y(39, 0.0);
  y[0] = -3;
  y[1] = -2;
  y[2] = -1;
  const auto p = dh_risk_pair(y, at(0.05));
  // h = 38 * 0.05 = 1.9: -2 + 0.9 * 1
  EXPECT_NEAR(p.var / std::sqrt(39.0), -1.1, 1e-12);
  EXPECT_NEAR(p.es / std::sqrt(39.0), -2.5, 1e-12);

  std::mt19937_64 rng(4);
  std::student_t_distribution<double> t(3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> r(78);
    for (auto& v : r) v = 0.001 * t(rng);
    for (double theta : {0.05, 0.025, 0.01}) {
      const auto [q, e] = order_statistic_oracle(r, theta);
      const auto got = dh_risk_pair(r, at(theta));
      EXPECT_NEAR(got.var, std::sqrt(78.0) * q, 1e-15);
      EXPECT_NEAR(got.es, std::sqrt(78.0) * e, 1e-15);
      EXPECT_LE(got.es, got.var);
    }
  }
}

TEST(DhRiskPair, HomogeneityAndHurst) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z(0.0, 0.001);
  std::vector<double> y(39);
  for (auto& v : y) v = z(rng);
  const auto base = dh_risk_pair(y, at(0.05));
  std::vector<double> scaled(y);
  for (auto& v : scaled) v *= 4.0;
  const auto p = dh_risk_pair(scaled, at(0.05));
  EXPECT_DOUBLE_EQ(p.var, 4.0 * base.var);
  EXPECT_DOUBLE_EQ(p.es, 4.0 * base.es);

  const auto raw = dh_risk_pair(y, at(0.05), DhConfig{0.0});
  const auto [q, e] = order_statistic_oracle(y, 0.05);
  EXPECT_DOUBLE_EQ(raw.var, q);
  EXPECT_DOUBLE_EQ(raw.es, e);
  EXPECT_NEAR(dh_risk_pair(y, at(0.05), DhConfig{0.7}).var, std::pow(39.0, 0.7) * q, 1e-15);
  EXPECT_THROW(DhConfig{1.0}.validate(), std::invalid_argument);
}
