#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "rrm/subordinator.hpp"

using namespace rrm;

namespace {

// Direct evaluation of the tri-power window sum for one minute.
double tpv_brute_force(const std::vector<double>& s, int i) {
  auto inc = [&](int l) { return std::pow(std::abs(s[static_cast<std::size_t>(l)] - s[static_cast<std::size_t>(l - 1)]), 2.0 / 3.0); };
  double total = 0.0;
  for (int l = std::max(i - 15, 0) + 3; l <= std::min(i + 15, 390); ++l) total += inc(l) * inc(l - 1) * inc(l - 2);
  return total;
}

// Bucket labels from the cumulative mass of intervals 1..390 and the
// max-of-bucket rule, for inputs where no bucket is empty.
std::vector<int> grid_oracle(const std::vector<double>& lambda, int c) {
  std::vector<long double> mass(391, 0.0L);
  for (int l = 1; l <= 390; ++l) mass[static_cast<std::size_t>(l)] = mass[static_cast<std::size_t>(l - 1)] + lambda[static_cast<std::size_t>(l)];
  std::vector<int> tau(static_cast<std::size_t>(c) + 1, 0);
  for (int l = 1; l <= 390; ++l) {
    const long double ratio = c * mass[static_cast<std::size_t>(l)] / mass[390];
    if (ratio <= 0) continue;
    const int bucket = std::clamp(static_cast<int>(std::ceil(static_cast<double>(ratio))), 1, c);
    tau[static_cast<std::size_t>(bucket)] = std::max(tau[static_cast<std::size_t>(bucket)], l);
  }
  return tau;
}

}  // namespace

TEST(Intensity, ClockIsFlat) {
  const auto day = fixture::random_walk_day(3);
  const auto in = intensity(day, SubordinatorKind::Clock);
  ASSERT_EQ(in.lambda.size(), 391u);
  for (double l : in.lambda) EXPECT_EQ(l, 1.0);
  EXPECT_EQ(in.total, 391.0);
  EXPECT_EQ(in.cumulative.back(), in.total);
}

TEST(Intensity, TpvOfConstantPricesIsZero) {
  const auto day = fixture::make_day(std::vector<double>(391, std::log(50.0)));
  const auto in = intensity(day, SubordinatorKind::Tpv);
  for (double l : in.lambda) EXPECT_EQ(l, 0.0);
  EXPECT_EQ(in.total, 0.0);
}

TEST(Intensity, TpvOfLinearPrices) {
  const double a = 3e-4;
  std::vector<double> s(391);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a * static_cast<double>(i);
  const auto in = intensity(fixture::make_day(s), SubordinatorKind::Tpv);
  for (int i = 15; i <= 375; ++i) EXPECT_NEAR(in.lambda[static_cast<std::size_t>(i)], 28.0 * a * a, 1e-20) << i;
  // truncated windows at the ends have fewer terms
  EXPECT_NEAR(in.lambda[0], 13.0 * a * a, 1e-20);
  EXPECT_NEAR(in.lambda[390], 13.0 * a * a, 1e-20);
}

TEST(Intensity, TpvMatchesWindowSum) {
  const auto day = fixture::random_walk_day(11);
  const auto in = intensity(day, SubordinatorKind::Tpv);
  for (int i = 0; i <= 390; ++i) {
    const double want = tpv_brute_force(day.log_prices, i);
    EXPECT_NEAR(in.lambda[static_cast<std::size_t>(i)], want, 1e-12 * want + 1e-30) << i;
  }
}

TEST(Intensity, VolumeAndCumulative) {
  const auto day = fixture::random_walk_day(5);
  const auto in = intensity(day, SubordinatorKind::Vol);
  EXPECT_EQ(in.lambda[0], 0.0);
  for (int i = 1; i <= 390; ++i) EXPECT_EQ(in.lambda[static_cast<std::size_t>(i)], day.volumes[static_cast<std::size_t>(i - 1)]);
  for (std::size_t i = 1; i < in.cumulative.size(); ++i) EXPECT_GE(in.cumulative[i], in.cumulative[i - 1]);
  EXPECT_EQ(in.cumulative[390], in.total);
}

TEST(Subordinate, ClockGrids) {
  const auto day = fixture::random_walk_day(7);
  const auto s39 = subordinate(day, {SubordinatorKind::Clock, 39});
  ASSERT_EQ(s39.tau.size(), 40u);
  for (int j = 0; j <= 39; ++j) EXPECT_EQ(s39.tau[static_cast<std::size_t>(j)], 10 * j);
  const auto s390 = subordinate(day, {SubordinatorKind::Clock, 390});
  for (int j = 0; j <= 390; ++j) EXPECT_EQ(s390.tau[static_cast<std::size_t>(j)], j);
  // c dividing 390 is plain resampling
  const auto s78 = subordinate(day, {SubordinatorKind::Clock, 78});
  for (int j = 1; j <= 78; ++j) {
    EXPECT_EQ(s78.returns[static_cast<std::size_t>(j - 1)],
              day.log_prices[static_cast<std::size_t>(5 * j)] - day.log_prices[static_cast<std::size_t>(5 * (j - 1))]);
  }
}

TEST(Subordinate, MassInFirstHalf) {
  std::vector<double> vol(390, 0.0);
  for (int i = 1; i <= 195; ++i) vol[static_cast<std::size_t>(i - 1)] = 1.0;
  const auto day = fixture::make_day(fixture::random_walk_day(1).log_prices, vol);
  const auto s = subordinate(day, {SubordinatorKind::Vol, 2});
  ASSERT_EQ(s.tau.size(), 3u);
  EXPECT_TRUE(s.tau[1] == 97 || s.tau[1] == 98) << s.tau[1];
  EXPECT_EQ(s.tau[2], 390);
  EXPECT_FALSE(s.clock_fallback);
}

TEST(Subordinate, EmptyBucketsTakeNextAvailableIndex) {
  std::vector<double> vol(390, 0.0);
  vol[199] = 1.0;  // all activity in interval 200; zero-mass intervals 1..199 belong to no bucket
  const auto day = fixture::make_day(fixture::random_walk_day(1).log_prices, vol);
  const auto s = subordinate(day, {SubordinatorKind::Vol, 4});
  EXPECT_EQ(s.tau, (std::vector<int>{0, 200, 201, 202, 390}));
}

TEST(Subordinate, ZeroMassFallsBackToClock) {
  const auto day = fixture::make_day(fixture::random_walk_day(1).log_prices, std::vector<double>(390, 0.0));
  const auto s = subordinate(day, {SubordinatorKind::Vol, 39});
  EXPECT_TRUE(s.clock_fallback);
  for (int j = 0; j <= 39; ++j) EXPECT_EQ(s.tau[static_cast<std::size_t>(j)], 10 * j);
}

TEST(Subordinate, MatchesBucketOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto day = fixture::random_walk_day(seed);
    for (int c : {13, 39, 78, 130}) {
      const auto in = intensity(day, SubordinatorKind::Vol);
      const auto s = subordinate(day, {SubordinatorKind::Vol, c});
      EXPECT_EQ(s.tau, grid_oracle(in.lambda, c)) << "seed " << seed << " c " << c;
    }
  }
}

TEST(Subordinate, PropertiesOnRandomDays) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick_c(1, 390);
  for (int trial = 0; trial < 200; ++trial) {
    auto day = fixture::random_walk_day(static_cast<std::uint64_t>(trial));
    // sprinkle flat stretches and zero volumes
    for (int k = 0; k < 40; ++k) {
      const auto at = static_cast<std::size_t>(rng() % 390);
      day.volumes[at] = 0.0;
      day.log_prices[at + 1] = day.log_prices[at];
    }
    const int c = pick_c(rng);
    for (auto kind : {SubordinatorKind::Clock, SubordinatorKind::Tpv, SubordinatorKind::Vol}) {
      const auto s = subordinate(day, {kind, c});
      ASSERT_EQ(s.tau.size(), static_cast<std::size_t>(c) + 1);
      EXPECT_EQ(s.tau.front(), 0);
      EXPECT_EQ(s.tau.back(), 390);
      for (std::size_t j = 1; j < s.tau.size(); ++j) ASSERT_LT(s.tau[j - 1], s.tau[j]);
      ASSERT_EQ(s.returns.size(), static_cast<std::size_t>(c));
      // Y_j are differences of one array, so the sum telescopes up to rounding
      const double sum = std::accumulate(s.returns.begin(), s.returns.end(), 0.0);
      EXPECT_NEAR(sum, daily_return(day), 1e-14);
    }
  }
}

TEST(Subordinate, PermutingInsideBucketsKeepsGrid) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto day = fixture::random_walk_day(seed);
    const auto before = subordinate(day, {SubordinatorKind::Vol, 39});
    // shuffle volumes of intervals tau(j-1)+2 .. tau(j); the first interval of
    // each bucket keeps its mass so no index changes bucket
    for (std::size_t j = 1; j < before.tau.size(); ++j) {
      const auto lo = static_cast<std::size_t>(before.tau[j - 1] + 1);
      const auto hi = static_cast<std::size_t>(before.tau[j]);
      if (hi > lo) std::shuffle(day.volumes.begin() + static_cast<std::ptrdiff_t>(lo),
                                day.volumes.begin() + static_cast<std::ptrdiff_t>(hi), rng);
    }
    const auto after = subordinate(day, {SubordinatorKind::Vol, 39});
    EXPECT_EQ(before.tau, after.tau);
  }
}

TEST(SubordinationSpec, Validation) {
  EXPECT_THROW((SubordinationSpec{SubordinatorKind::Clock, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((SubordinationSpec{SubordinatorKind::Clock, 391}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((SubordinationSpec{SubordinatorKind::Clock, 390}.validate()));
  EXPECT_EQ(parse_subordinator_kind("tpv"), SubordinatorKind::Tpv);
  EXPECT_THROW(parse_subordinator_kind("tick"), std::invalid_argument);
}
