#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "rrm/errors.hpp"
#include "rrm/evaluation.hpp"
#include "rrm/numerics.hpp"
#include "rrm/synthetic.hpp"

using namespace rrm;

namespace {

// Standard normal returns with the analytic (VaR, ES) as forecasts.
RealizedPanel normal_panel(std::size_t n, double theta, std::uint64_t seed, double es_factor = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  RealizedPanel p;
  p.theta = theta;
  p.dates = business_days(parse_date("2001-01-01"), static_cast<int>(n));
  const double q = numerics::normal_quantile(theta);
  const double e = -numerics::normal_pdf(q) / theta;
  for (std::size_t t = 0; t < n; ++t) {
    p.y.push_back(z(rng));
    p.q_hat.push_back(q);
    p.e_hat.push_back(e * es_factor);
  }
  return p;
}

}  // namespace

TEST(PinballLoss, Examples) {
  EXPECT_DOUBLE_EQ(pinball_loss(-1.0, -1.0, 0.05), 0.0);
  EXPECT_DOUBLE_EQ(pinball_loss(-1.0, -2.0, 0.05), 0.95);
  EXPECT_DOUBLE_EQ(pinball_loss(0.0, 1.0, 0.05), 0.05);
}

TEST(PinballLoss, NonNegativeAndMinimisedByEmpiricalQuantile) {
  std::mt19937_64 rng(3);
  std::student_t_distribution<double> t(3.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> y(201);
    for (auto& v : y) v = t(rng);
    for (double q : {-2.0, 0.0, 1.5}) {
      for (double v : y) {
        EXPECT_GE(pinball_loss(q, v, 0.05), 0.0);
        if (v != q) EXPECT_GT(pinball_loss(q, v, 0.05), 0.0);
      }
    }
    auto mean_loss = [&](double q) {
      double s = 0.0;
      for (double v : y) s += pinball_loss(q, v, 0.05);
      return s / double(y.size());
    };
    std::vector<double> sorted(y);
    std::sort(sorted.begin(), sorted.end());
    // with n = 201 and theta = 0.05, the order statistic at h = 10 is a minimiser
    const double best = mean_loss(sorted[10]);
    for (double q = sorted.front() - 1.0; q < sorted.back() + 1.0; q += 0.01) EXPECT_GE(mean_loss(q), best - 1e-12);
  }
}

TEST(JointLoss, Examples) {
  EXPECT_NEAR(joint_loss(-1.0, -2.0, -3.0, 0.05), 21.19315, 1e-5);
  EXPECT_NEAR(joint_loss(-1.0, -2.0, -3.0, 0.05), 0.5 + 20.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(joint_loss(-1.0, -2.0, 0.0, 0.05), 1.19315, 1e-5);
  EXPECT_THROW(joint_loss(-1.0, 0.0, 0.0, 0.05), std::domain_error);
}

TEST(JointLoss, GridMinimiserNearAnalyticPair) {
  const auto p = normal_panel(200000, 0.05, 8);
  const double q0 = p.q_hat[0];
  const double e0 = p.e_hat[0];
  const double step = 0.02;
  double best = std::numeric_limits<double>::infinity();
  double best_q = 0.0;
  double best_e = 0.0;
  for (double q = q0 - 0.2; q <= q0 + 0.2 + 1e-12; q += step) {
    for (double e = e0 - 0.2; e <= e0 + 0.2 + 1e-12; e += step) {
      double s = 0.0;
      for (double y : p.y) s += joint_loss(q, e, y, 0.05);
      if (s < best) {
        best = s;
        best_q = q;
        best_e = e;
      }
    }
  }
  EXPECT_NEAR(best_q, q0, 2 * step);
  EXPECT_NEAR(best_e, e0, 2 * step);
}

TEST(HitsFrequency, SaturationAndBinomial) {
  auto p = normal_panel(2520, 0.05, 1);
  const double band = 3.0 * std::sqrt(0.05 * 0.95 / 2520.0);
  EXPECT_NEAR(hits_frequency(p), 0.05, band);
  std::fill(p.q_hat.begin(), p.q_hat.end(), 1e9);
  std::fill(p.e_hat.begin(), p.e_hat.end(), -1e-9);
  EXPECT_EQ(hits_frequency(p), 1.0);
  std::fill(p.q_hat.begin(), p.q_hat.end(), -1e9);
  std::fill(p.e_hat.begin(), p.e_hat.end(), -2e9);
  EXPECT_EQ(hits_frequency(p), 0.0);
}

TEST(AsTests, NullSaturation) {
  RealizedPanel p;
  p.theta = 0.05;
  p.dates = business_days(parse_date("2001-01-01"), 100);
  for (int t = 0; t < 100; ++t) {
    p.q_hat.push_back(-1.0);
    p.e_hat.push_back(-2.0);
    p.y.push_back(t % 20 == 0 ? -2.0 : 0.5);
  }
  const auto r = as_tests(p, 2000, 1);
  ASSERT_TRUE(r.z1.has_value());
  EXPECT_DOUBLE_EQ(*r.z1, 1.0);
  EXPECT_EQ(r.hits, 5u);
  EXPECT_NEAR(*r.as1_p, 0.5, 0.05);
}

TEST(AsTests, NoHits) {
  auto p = normal_panel(50, 0.05, 2);
  std::fill(p.q_hat.begin(), p.q_hat.end(), -100.0);
  std::fill(p.e_hat.begin(), p.e_hat.end(), -200.0);
  const auto r = as_tests(p, 500, 1);
  EXPECT_FALSE(r.z1.has_value());
  EXPECT_FALSE(r.as1_p.has_value());
  EXPECT_EQ(r.hits, 0u);
}

TEST(AsTests, ScaleInvariance) {
  auto p = normal_panel(1000, 0.025, 4);
  const auto a = as_tests(p, 2000, 9);
  for (std::size_t t = 0; t < p.size(); ++t) {
    p.y[t] *= 0.01;
    p.q_hat[t] *= 0.01;
    p.e_hat[t] *= 0.01;
  }
  const auto b = as_tests(p, 2000, 9);
  EXPECT_NEAR(*a.as1_p, *b.as1_p, 1e-12);
  EXPECT_NEAR(a.as2_p, b.as2_p, 1e-12);
}

TEST(AsTests, SizeAndPower) {
  // smaller than the 500-replication acceptance run; the bands are wider to match
  const int reps = 150;
  int size1 = 0;
  int size2 = 0;
  int power1 = 0;
  int power2 = 0;
  for (int r = 0; r < reps; ++r) {
    const auto ok = as_tests(normal_panel(2520, 0.05, 1000 + r), 1000, r);
    size1 += ok.as1_p && *ok.as1_p < 0.05;
    size2 += ok.as2_p < 0.05;
    const auto bad = as_tests(normal_panel(2520, 0.05, 5000 + r, 0.5), 1000, r);
    power1 += bad.as1_p && *bad.as1_p < 0.05;
    power2 += bad.as2_p < 0.05;
  }
  const double band = 3.0 * std::sqrt(0.05 * 0.95 / reps);
  EXPECT_NEAR(size1 / double(reps), 0.05, band);
  EXPECT_NEAR(size2 / double(reps), 0.05, band);
  EXPECT_GT(power1 / double(reps), 0.9);
  EXPECT_GT(power2 / double(reps), 0.9);
}

TEST(AsTests, ByYear) {
  const auto p = normal_panel(600, 0.05, 12);
  const auto s = as_tests_by_year(p, 500, 3);
  // 2001-01-01 onwards: 261 weekdays in 2001, 261 in 2002, the rest in 2003
  ASSERT_EQ(s.years, (std::vector<int>{2001, 2002, 2003}));
  EXPECT_EQ(s.results.size(), 3u);
  EXPECT_GE(s.as2_rejection_rate, 0.0);
  EXPECT_LE(s.as2_rejection_rate, 1.0);
}

TEST(Forecasters, RandomWalkOnConstant) {
  RealizedPanel p = normal_panel(252 * 3, 0.05, 5);
  const auto blocks = rolling_forecast_eval(p, ForecasterSpec{ForecasterKind::Rw, 0.9, 2, 1, 252});
  ASSERT_EQ(blocks.size(), 1u);
  double pin = 0.0;
  double joint = 0.0;
  for (std::size_t t = 504; t < 756; ++t) {
    pin += pinball_loss(p.q_hat[0], p.y[t], 0.05);
    joint += joint_loss(p.q_hat[0], p.e_hat[0], p.y[t], 0.05);
  }
  EXPECT_NEAR(blocks[0].pinball_mean, pin / 252.0, 1e-12);
  EXPECT_NEAR(blocks[0].joint_mean, joint / 252.0, 1e-12);
  const auto f = forecast_series(p.q_hat, 0, 504, 756, ForecasterSpec{ForecasterKind::Rw});
  for (double v : f) EXPECT_EQ(v, p.q_hat[0]);
}

TEST(Forecasters, Ar1Recovery) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 0.1);
  const double a = 0.1;
  const double b = 0.8;
  std::vector<double> x(1260);
  x[0] = a / (1.0 - b);
  for (std::size_t t = 1; t < x.size(); ++t) x[t] = a + b * x[t - 1] + z(rng);
  const auto fit = fit_ar1(x);
  EXPECT_NEAR(fit.intercept, a, 0.02);
  EXPECT_NEAR(fit.slope, b, 0.02);
  const auto constant = fit_ar1(std::vector<double>(20, 3.0));
  EXPECT_EQ(constant.intercept, 3.0);
  EXPECT_EQ(constant.slope, 0.0);
}

TEST(Forecasters, EmaRecursion) {
  // f_t = alpha x_{t-1} + (1 - alpha) f_{t-1}: the previous realized value
  // carries weight alpha
  const std::vector<double> x{1.0, 0.0, 0.0, 0.0};
  const auto f = ema_forecasts(x, 0.9, 1.0);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 1.0);
  EXPECT_NEAR(f[2], 0.1, 1e-15);
  EXPECT_NEAR(f[3], 0.01, 1e-15);
}

TEST(Forecasters, TooShortIsAnError) {
  const auto p = normal_panel(300, 0.05, 1);
  EXPECT_THROW(rolling_forecast_eval(p, ForecasterSpec{}), DataError);
}

TEST(Rmse, Examples) {
  const std::vector<double> t{0.1, -0.2, 0.3};
  EXPECT_EQ(rmse_vs_truth(t, t), 0.0);
  EXPECT_NEAR(rmse_vs_truth(std::vector<double>{0.101, -0.199, 0.301}, t), 0.001, 1e-12);
  EXPECT_DOUBLE_EQ(rmse_vs_truth(std::vector<double>{1.0, -1.0}, std::vector<double>{0.0, 0.0}), 1.0);
}

TEST(RealizedPanel, Validation) {
  auto p = normal_panel(10, 0.05, 1);
  EXPECT_NO_THROW(p.validate());
  p.e_hat[3] = p.q_hat[3] + 1.0;
  EXPECT_THROW(p.validate(), DataError);
}
