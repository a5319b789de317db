#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "rrm/intraday_model.hpp"
#include "rrm/risk.hpp"
#include "rrm/scaling.hpp"

using namespace rrm;

namespace {

TailModel iid_model(double mu, double sigma, double nu, int c) {
  TailModel m;
  m.mu = mu;
  m.sigma = sigma;
  m.nu = nu;
  m.c = c;
  return m;
}

TailModel ma_model(double mu, double sigma, double nu, double phi, int c) {
  auto m = iid_model(mu, sigma, nu, c);
  m.phi = phi;
  return m;
}

RiskSpec spec_at(double theta, EsRule rule = EsRule::TailIntegral) {
  RiskSpec s;
  s.theta = theta;
  s.es_rule = rule;
  return s;
}

double sd_of(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / double(v.size() - 1));
}

}  // namespace

TEST(CharFn, OriginAndSymmetry) {
  const auto hf = hf_char_fn(iid_model(0.0, 0.002, 3.0, 39));
  EXPECT_NEAR(std::abs(hf(0.0) - 1.0), 0.0, 1e-15);
  for (double w : {1.0, 50.0, 700.0}) {
    EXPECT_NEAR(hf(w).imag(), 0.0, 1e-15);
    EXPECT_EQ(hf(-w), std::conj(hf(w)));
  }
  const auto shifted = hf_char_fn(iid_model(0.001, 0.002, 3.0, 39));
  for (double w : {1.0, 50.0, 700.0}) {
    EXPECT_NEAR(std::abs(shifted(-w) - std::conj(shifted(w))), 0.0, 1e-15);
    EXPECT_NEAR(std::arg(shifted(w)), std::remainder(0.001 * w, 2 * M_PI), 1e-12);
  }
}

TEST(CharFn, DailyReductions) {
  const auto m1 = iid_model(0.0003, 0.002, 4.0, 1);
  const auto hf = hf_char_fn(m1);
  const auto daily = daily_char_fn(m1);
  for (double w : {0.5, 10.0, 300.0}) EXPECT_NEAR(std::abs(daily(w) - hf(w)), 0.0, 1e-15);

  // MA(1) at phi = 0: xi_0 enters with weight 0, so the sum has c t factors
  const auto iid = daily_char_fn(iid_model(0.0003, 0.002, 4.0, 39));
  const auto ma0 = daily_char_fn(ma_model(0.0003, 0.002, 4.0, 0.0, 39));
  for (double w = 0.0; w < 200.0; w += 7.3) EXPECT_NEAR(std::abs(ma0(w) - iid(w)), 0.0, 1e-13) << w;
}

TEST(CharFn, MaMatchesDirectProduct) {
  // sum = phi xi_0 + (1 + phi) (xi_1 + ... + xi_{c-1}) + xi_c
  const auto m = ma_model(0.0001, 0.001, 3.0, -0.2, 10);
  const auto hf = hf_char_fn(m);
  const auto daily = daily_char_fn(m);
  for (double w : {3.0, 40.0, 400.0}) {
    std::complex<double> want = hf(-0.2 * w) * hf(w);
    for (int j = 1; j < 10; ++j) want *= hf(0.8 * w);
    EXPECT_NEAR(std::abs(daily(w) - want), 0.0, 1e-14);
  }
}

TEST(CharFn, GaussianLimit) {
  const double s = 0.001;
  const int c = 39;
  const double nu = 200.0;
  const auto daily = daily_char_fn(iid_model(0.0, s, nu, c));
  const double top = 5.0 / (s * std::sqrt(double(c)));
  for (int k = 0; k <= 100; ++k) {
    const double w = top * k / 100.0;
    const double want = std::exp(-c * s * s * w * w * nu / (nu - 2.0) / 2.0);
    EXPECT_NEAR(std::abs(daily(w)), want, 1e-4) << w;
  }
}

TEST(GilPelaez, NormalAndSymmetry) {
  const CharFn normal = [](double w) { return std::complex<double>(std::exp(-0.5 * w * w), 0.0); };
  EXPECT_NEAR(gil_pelaez_cdf(normal, -1.6449), 0.05, 1e-5);
  EXPECT_NEAR(gil_pelaez_cdf(normal, -1.6449), boost::math::cdf(boost::math::normal(), -1.6449), 1e-9);
  const auto daily = daily_char_fn(iid_model(0.0, 0.002, 3.0, 39));
  EXPECT_NEAR(gil_pelaez_cdf(daily, 0.0), 0.5, 1e-8);
}

TEST(GilPelaez, AgreesWithSpecialisedRoute) {
  // generic complex integrand against the symmetric real form
  for (const auto& m : {iid_model(0.0002, 0.0015, 3.0, 39), ma_model(-0.0001, 0.001, 2.6, -0.05, 78)}) {
    const auto daily = daily_char_fn(m);
    DailyDistribution dist(m);
    const double sd = std::sqrt(dist.variance());
    for (double z : {-6.0, -3.0, -1.0, 0.0, 0.7, 2.5}) {
      const double x = dist.mean() + z * sd;
      EXPECT_NEAR(dist.cdf(x), gil_pelaez_cdf(daily, x), 1e-9) << z;
    }
  }
}

TEST(DailyDistribution, SingleIntervalIsStudentT) {
  const double mu = 0.001;
  const double sigma = 0.003;
  for (double nu : {2.3, 3.0, 6.0}) {
    DailyDistribution dist(iid_model(mu, sigma, nu, 1));
    boost::math::students_t_distribution<double> t(nu);
    for (double z : {-30.0, -5.0, -1.0, 0.0, 0.4, 3.0}) {
      const double x = mu + sigma * z;
      EXPECT_NEAR(dist.cdf(x), boost::math::cdf(t, z), 1e-9) << nu << " " << z;
      // E[X; X <= x] = mu F(z) - sigma (nu + z^2) / (nu - 1) f(z)
      const double pe = mu * boost::math::cdf(t, z) - sigma * (nu + z * z) / (nu - 1.0) * boost::math::pdf(t, z);
      EXPECT_NEAR(dist.partial_expectation(x), pe, 1e-11) << nu << " " << z;
    }
  }
}

TEST(DailyDistribution, TwoIntervalConvolution) {
  // F_2(x) = int f(y) F(x - y) dy by adaptive Gauss-Kronrod on the density
  const double nu = 3.0;
  const double sigma = 1.0;
  boost::math::students_t_distribution<double> t(nu);
  DailyDistribution dist(iid_model(0.0, sigma, nu, 2));
  for (double x : {-12.0, -4.0, -2.0, -0.5, 1.0}) {
    auto integrand = [&](double y) { return boost::math::pdf(t, y) * boost::math::cdf(t, x - y); };
    const double want = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 15, 1e-13);
    EXPECT_NEAR(dist.cdf(x), want, 1e-9) << x;
  }
}

TEST(DailyDistribution, CdfIsMonotone) {
  DailyDistribution dist(ma_model(0.0, 0.001, 2.5, -0.05, 39));
  const double sd = std::sqrt(dist.variance());
  double prev = 0.0;
  for (int k = -200; k <= 200; ++k) {
    const double f = dist.cdf(0.05 * k * sd);
    EXPECT_GE(f, prev - 1e-7) << k;
    EXPECT_GE(f, -1e-9);
    EXPECT_LE(f, 1.0 + 1e-9);
    prev = f;
  }
}

TEST(CfRiskPair, GaussianLimit) {
  const double s = 0.001;
  const int c = 39;
  const double nu = 200.0;
  const auto m = iid_model(0.0, s, nu, c);
  const double sd = s * std::sqrt(c * nu / (nu - 2.0));
  const auto pair = cf_risk_pair(m, spec_at(0.05));
  EXPECT_NEAR(pair.var / (sd * -1.6448536269514722), 1.0, 1e-3);
  boost::math::normal n;
  const double es = -sd * boost::math::pdf(n, 1.6448536269514722) / 0.05;
  EXPECT_NEAR(pair.es / es, 1.0, 2e-3);
  EXPECT_LE(pair.es, pair.var);
  EXPECT_EQ(pair.method, RiskMethod::Cf);
}

TEST(CfRiskPair, GridRuleIsMeanOfQuantiles) {
  const auto m = iid_model(0.0, 0.001, 3.0, 39);
  DailyDistribution dist(m);
  std::vector<double> levels;
  for (int j = 1; j <= 10; ++j) levels.push_back(0.025 * j / 10.0);
  const auto q = cf_quantiles(dist, levels);
  const double want = std::accumulate(q.begin(), q.end(), 0.0) / 10.0;
  const auto pair = cf_risk_pair(m, spec_at(0.025, EsRule::QuantileGrid));
  EXPECT_NEAR(pair.es, want, 1e-10);
  EXPECT_NEAR(pair.var, q.back(), 1e-10);
  // the left-Riemann grid sits above the tail mean
  const auto exact = cf_risk_pair(m, spec_at(0.025));
  EXPECT_GT(pair.es, exact.es);
}

TEST(CfRiskPair, QuantileHitsLevel) {
  for (const auto& m : {iid_model(0.0, 0.002, 2.2, 39), ma_model(0.0001, 0.0008, 4.0, -0.05, 130),
                        iid_model(0.0, 0.05, 3.0, 78)}) {
    DailyDistribution dist(m);
    const std::vector<double> levels{0.05, 0.025, 0.01, 0.001};
    RiskDiagnostics diag;
    const auto q = cf_quantiles(dist, levels, &diag);
    for (std::size_t k = 0; k < levels.size(); ++k) EXPECT_NEAR(dist.cdf(q[k]), levels[k], 1e-7);
    EXPECT_LT(diag.root_residual, 1e-7);
  }
}

TEST(CfRiskPair, ExtendsBracketBelowDefault) {
  // daily scale ~0.6, far below the -0.2 starting endpoint
  const auto pair = cf_risk_pair(iid_model(0.0, 0.05, 3.0, 78), spec_at(0.01));
  EXPECT_LT(pair.var, -0.4);
  EXPECT_GT(pair.diagnostics.bracket_expansions, 0);
  EXPECT_LE(pair.es, pair.var);
}

TEST(CfRiskPair, TranslationAndScale) {
  const auto base = iid_model(0.0, 0.001, 3.5, 39);
  auto shifted = base;
  shifted.mu = 2e-5;
  auto scaled = base;
  scaled.sigma = 0.003;
  for (double theta : {0.05, 0.01}) {
    const auto a = cf_risk_pair(base, spec_at(theta));
    const auto b = cf_risk_pair(shifted, spec_at(theta));
    const auto c = cf_risk_pair(scaled, spec_at(theta));
    EXPECT_NEAR(b.var - a.var, 39 * 2e-5, 1e-8);
    EXPECT_NEAR(b.es - a.es, 39 * 2e-5, 1e-8);
    EXPECT_NEAR(c.var / a.var, 3.0, 1e-6);
    EXPECT_NEAR(c.es / a.es, 3.0, 1e-6);
  }
}

TEST(CfRiskPair, EsCoherentAcrossLevels) {
  const auto m = ma_model(0.0, 0.001, 3.0, -0.05, 39);
  const std::vector<RiskSpec> specs{spec_at(0.05), spec_at(0.025), spec_at(0.01)};
  const auto pairs = cf_risk_pairs(m, specs);
  EXPECT_LE(pairs[2].es, pairs[1].es);
  EXPECT_LE(pairs[1].es, pairs[0].es);
  EXPECT_LE(pairs[2].var, pairs[1].var);
  for (const auto& p : pairs) EXPECT_LE(p.es, p.var);
}

TEST(CfRiskPair, HeavyTailWarning) {
  const auto pair = cf_risk_pair(iid_model(0.0, 0.001, 2.2, 39), spec_at(0.05));
  EXPECT_FALSE(pair.diagnostics.warnings.empty());
  const auto calm = cf_risk_pair(iid_model(0.0, 0.001, 4.0, 39), spec_at(0.05));
  EXPECT_TRUE(calm.diagnostics.warnings.empty());
}

TEST(McRiskPair, PointMass) {
  const auto pair = mc_risk_pair(iid_model(0.0, kMinSigma, 200.0, 39), spec_at(0.05), McConfig{10000, 1});
  EXPECT_NEAR(pair.var, 0.0, 1e-4);
  EXPECT_NEAR(pair.es, 0.0, 1e-4);
}

TEST(McRiskPair, MatchesCf) {
  for (const auto& m : {iid_model(0.0, 0.001, 3.0, 39), ma_model(0.00002, 0.0012, 4.0, -0.05, 39)}) {
    const auto cf = cf_risk_pair(m, spec_at(0.05));
    const auto mc = mc_risk_pair(m, spec_at(0.05), McConfig{1000000, 42});
    EXPECT_NEAR(mc.var / cf.var, 1.0, 0.01);
    EXPECT_NEAR(mc.es / cf.es, 1.0, 0.02);
    EXPECT_EQ(mc.diagnostics.samples, 1000000u);
  }
}

TEST(McRiskPair, DeterministicForSeed) {
  const auto m = ma_model(0.0, 0.001, 3.0, -0.05, 39);
  const auto a = mc_risk_pair(m, spec_at(0.025), McConfig{20000, 5});
  const auto b = mc_risk_pair(m, spec_at(0.025), McConfig{20000, 5});
  const auto c = mc_risk_pair(m, spec_at(0.025), McConfig{20000, 6});
  EXPECT_EQ(a.var, b.var);
  EXPECT_EQ(a.es, b.es);
  EXPECT_NE(a.var, c.var);
}

TEST(McRiskPair, AntitheticSampleIsSymmetric) {
  const auto m = iid_model(0.0003, 0.001, 3.0, 13);
  const auto draws = simulate_daily_returns(m, McConfig{1000, 3});
  ASSERT_EQ(draws.size(), 1000u);
  EXPECT_TRUE(std::is_sorted(draws.begin(), draws.end()));
  // pairs reflect about the centre c mu
  for (std::size_t i = 0; i < 500; ++i) EXPECT_NEAR(draws[i] + draws[999 - i], 2 * 13 * 0.0003, 1e-15);
}

TEST(McRiskPair, ErrorShrinksWithSqrtB) {
  const auto m = iid_model(0.0, 0.001, 3.0, 39);
  std::vector<double> small;
  std::vector<double> large;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    small.push_back(mc_risk_pair(m, spec_at(0.05), McConfig{10000, seed}).var);
    large.push_back(mc_risk_pair(m, spec_at(0.05), McConfig{40000, 1000 + seed}).var);
  }
  EXPECT_NEAR(sd_of(large) / sd_of(small), 0.5, 0.5 * 0.2 + 0.08);
}

TEST(McConfig, BatchMustBeEven) {
  EXPECT_THROW((McConfig{1001, 0}.validate()), std::invalid_argument);
  EXPECT_THROW((McConfig{0, 0}.validate()), std::invalid_argument);
}

TEST(EnsembleRiskPair, Averages) {
  RiskPair cf{0.05, -0.02, -0.03, RiskMethod::Cf, {}};
  RiskPair mc{0.05, -0.04, -0.05, RiskMethod::Mc, {}};
  const auto e = ensemble_risk_pair(cf, mc);
  EXPECT_DOUBLE_EQ(e.var, -0.03);
  EXPECT_DOUBLE_EQ(e.es, -0.04);
  EXPECT_LE(e.es, e.var);
  EXPECT_EQ(e.method, RiskMethod::Ensemble);
  const auto same = ensemble_risk_pair(cf, cf);
  EXPECT_EQ(same.var, cf.var);
  EXPECT_EQ(same.es, cf.es);
}

TEST(EmpiricalRiskPair, TypeSevenAndStrictTail) {
  const std::vector<double> sorted{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4};
  const auto p = empirical_risk_pair(sorted, 0.25);
  // h = 9 * 0.25 = 2.25 -> -3 + 0.25
  EXPECT_DOUBLE_EQ(p.var, -2.75);
  EXPECT_DOUBLE_EQ(p.es, -4.0);
}
