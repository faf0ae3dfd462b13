#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "uamdp/metrics.hpp"
#include "uamdp/rng.hpp"

using namespace uamdp;

namespace {

std::vector<ForecastRecord> gaussian_records(std::size_t n, double sd_scale, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<ForecastRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({PredictiveDist::gaussian({0.0}, {sd_scale * sd_scale}), {z(rng)}, 1});
  return out;
}

}  // namespace

TEST(PointMetrics, Perfect) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_EQ(mae(a, a), 0.0);
  EXPECT_EQ(smape(a, a), 0.0);
}

TEST(PointMetrics, HandArithmetic) {
  EXPECT_EQ(rmse(std::vector<double>{1, -1}, std::vector<double>{0, 0}), 1.0);
  EXPECT_EQ(mae(std::vector<double>{1, -1}, std::vector<double>{0, 0}), 1.0);
  EXPECT_NEAR(rmse(std::vector<double>{3, 4}, std::vector<double>{0, 0}), std::sqrt(12.5), 1e-15);
  EXPECT_EQ(mae(std::vector<double>{3, 4}, std::vector<double>{0, 0}), 3.5);
}

TEST(Smape, Cases) {
  EXPECT_NEAR(smape(std::vector<double>{110}, std::vector<double>{90}), 20.0, 1e-12);
  EXPECT_EQ(smape(std::vector<double>{1}, std::vector<double>{0}), 200.0);
  EXPECT_EQ(smape(std::vector<double>{0}, std::vector<double>{0}), 0.0);
}

TEST(PointMetrics, LengthMismatchThrows) {
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST(CrpsGaussian, StandardAtMean) {
  EXPECT_NEAR(crps_gaussian(0.0, 1.0, 0.0), 2.0 * normal_pdf(0.0) - 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(crps_gaussian(0.0, 1.0, 0.0), 0.23370, 1e-5);
}

TEST(CrpsGaussian, SmallSigmaLimit) {
  EXPECT_NEAR(crps_gaussian(1.0, 1e-9, 1.0), 0.0, 1e-9);
}

TEST(CrpsGaussian, MatchesIntegralOracle) {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const double mu = 4.0 * uniform01(rng) - 2.0;
    const double sigma = 0.1 + 2.0 * uniform01(rng);
    const double y = 6.0 * uniform01(rng) - 3.0;
    EXPECT_NEAR(crps_gaussian(mu, sigma, y), oracles::crps_gaussian_integral(mu, sigma, y), 1e-6);
  }
}

TEST(CrpsGaussianProperty, MinimizedAtObservation) {
  const double y = 0.7, sigma = 0.4, h = 1e-4;
  const double grad = (crps_gaussian(y + h, sigma, y) - crps_gaussian(y - h, sigma, y)) / (2.0 * h);
  EXPECT_NEAR(grad, 0.0, 1e-6);
  EXPECT_LT(crps_gaussian(y, sigma, y), crps_gaussian(y + 0.01, sigma, y));
}

TEST(CrpsEmpirical, Cases) {
  EXPECT_EQ(crps_empirical(std::vector<double>{2.0}, 0.5), 1.5);
  EXPECT_EQ(crps_empirical(std::vector<double>{0.0, 1.0}, 0.5), 0.25);
  EXPECT_EQ(crps_empirical(std::vector<double>(5, 3.0), 3.0), 0.0);
}

TEST(CrpsEmpirical, MatchesPairwiseDefinition) {
  Rng rng(13);
  std::vector<double> x(40);
  for (auto& v : x) v = uniform01(rng);
  const double y = 0.3;
  double a = 0.0, b = 0.0;
  for (double xi : x) a += std::abs(xi - y);
  for (double xi : x)
    for (double xj : x) b += std::abs(xi - xj);
  const double n = static_cast<double>(x.size());
  EXPECT_NEAR(crps_empirical(x, y), a / n - 0.5 * b / (n * n), 1e-14);
}

TEST(CrpsEmpiricalProperty, NonNegative) {
  Rng rng(14);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(1 + i % 9);
    for (auto& v : x) v = uniform01(rng);
    EXPECT_GE(crps_empirical(x, uniform01(rng)), 0.0);
  }
}

TEST(CrpsEmpirical, AgreesWithGaussianAtLargeM) {
  Rng rng(15);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(10000);
  for (auto& v : x) v = 1.0 + 0.5 * z(rng);
  const double ref = crps_gaussian(1.0, 0.5, 1.3);
  EXPECT_NEAR(crps_empirical(x, 1.3), ref, 0.02 * ref);
}

TEST(Coverage, ActualsAtMean) {
  std::vector<ForecastRecord> r{{PredictiveDist::gaussian({1.0}, {1.0}), {1.0}, 1}};
  EXPECT_EQ(coverage(r, 0.8), 1.0);
}

TEST(Coverage, CalibratedGaussian) {
  const auto r = gaussian_records(10000, 1.0, 16);
  EXPECT_NEAR(coverage(r, 0.8), 0.8, 0.012);
}

TEST(Coverage, OverDispersedExceedsNominal) {
  const auto r = gaussian_records(10000, 2.0, 17);
  EXPECT_GT(coverage(r, 0.8), 0.8);
}

TEST(CoverageProperty, MonotoneInLevel) {
  const auto r = gaussian_records(2000, 1.0, 18);
  double prev = 0.0;
  for (double level = 0.1; level < 0.95; level += 0.1) {
    const double c = coverage(r, level);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(KsUniform, GridStatistic) {
  const std::size_t n = 50;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (i + 0.5) / n;
  EXPECT_NEAR(ks_uniform(u).statistic, 0.5 / n, 1e-15);
}

TEST(KsUniform, PointMass) {
  EXPECT_EQ(ks_uniform(std::vector<double>(10, 0.5)).statistic, 0.5);
}

TEST(KolmogorovSurvival, KnownValues) {
  // Reference values of the limiting Kolmogorov distribution.
  EXPECT_NEAR(kolmogorov_survival(1.3580986393225505), 0.05, 1e-9);
  EXPECT_NEAR(kolmogorov_survival(1.2238478702170823), 0.10, 1e-9);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(PitKs, CalibratedPasses) {
  const auto r = gaussian_records(10000, 1.0, 19);
  EXPECT_GT(pit_ks(r).p_value, 0.01);
  const auto pit = pit_values(r);
  EXPECT_EQ(pit.size(), 10000u);
}

TEST(PitKs, MiscalibratedFails) {
  const auto r = gaussian_records(10000, 0.5, 20);
  EXPECT_LT(pit_ks(r).p_value, 1e-6);
}

TEST(Sharpe, Cases) {
  EXPECT_THROW(sharpe_daily(std::vector<double>{0.01, 0.01, 0.01}), DegenerateSeries);
  EXPECT_EQ(sharpe_daily(std::vector<double>{0.01, -0.01}), 0.0);
  EXPECT_NEAR(sharpe_daily(std::vector<double>{0.02, 0.0, 0.01}), 1.0, 1e-12);
}

TEST(SharpeProperty, ScaleInvariant) {
  const std::vector<double> r{0.01, -0.02, 0.015, 0.003};
  std::vector<double> s = r;
  for (auto& x : s) x *= 4.0;
  EXPECT_NEAR(sharpe_daily(s), sharpe_daily(r), 1e-14);
}

TEST(MaxDrawdown, Cases) {
  EXPECT_EQ(max_drawdown(std::vector<double>{1, 2, 3}), 0.0);
  EXPECT_NEAR(max_drawdown(std::vector<double>{100, 120, 90, 100}), -0.25, 1e-15);
  EXPECT_NEAR(max_drawdown(std::vector<double>{100, 102, 101.5}), 101.5 / 102.0 - 1.0, 1e-15);
}

TEST(MaxDrawdownProperty, ScaleInvariant) {
  const std::vector<double> v{100, 120, 90, 100, 80, 130};
  std::vector<double> w = v;
  for (auto& x : w) x *= 3.0;
  EXPECT_NEAR(max_drawdown(w), max_drawdown(v), 1e-15);
}

TEST(Turnover, Cases) {
  EquityCurve c{{100, 101, 102}, {0.0, 0.0}};
  EXPECT_EQ(turnover(c), 0.0);
  c.turnover_per_step = {1.0, 1.0};
  EXPECT_EQ(turnover(c), 1.0);
}

TEST(PositiveDays, Count) {
  EXPECT_NEAR(positive_days(std::vector<double>{0.1, -0.1, 0.2}), 2.0 / 3.0, 1e-15);
}

TEST(EquityCurve, LogReturns) {
  const EquityCurve c{{100, 110, 99}, {}};
  const auto r = c.returns();
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], std::log(1.1), 1e-15);
}

TEST(InventoryMetrics, NoStockouts) {
  InventoryTrace t{{5, 5}, {5, 5}, {1, 2}, 6.0, 10.0};
  EXPECT_EQ(service_level(t), 1.0);
  EXPECT_EQ(stockout_rate(t), 0.0);
}

TEST(InventoryMetrics, ServiceLevelRatio) {
  InventoryTrace t{{60, 40}, {60, 36}, {0, 0}, 6.0, 10.0};
  EXPECT_NEAR(service_level(t), 0.96, 1e-15);
  EXPECT_NEAR(stockout_rate(t), 2.0, 1e-15);
}

TEST(InventoryMetrics, GmroiRatio) {
  // 100 units sold at margin 4 = 400; mean on-hand 19.5 units at cost 6 = 117.
  InventoryTrace t{{50, 50}, {50, 50}, {19, 20}, 6.0, 10.0};
  EXPECT_NEAR(gmroi(t), 400.0 / 117.0, 1e-12);
  EXPECT_NEAR(gmroi(t), 3.42, 5e-3);
}

TEST(Summary, MeanAndInterval) {
  const auto s = summarize(std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(s.ci_hi - s.mean, kZ95 * s.se, 1e-15);
}

TEST(NormalQuantile, InvertsCdf) {
  for (double p : {1e-8, 0.01, 0.3, 0.5, 0.9, 0.999}) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 + 1e-9 * p);
}

TEST(Wilcoxon, ExactMatchesEnumeration) {
  const std::vector<double> d{0.5, -0.2, 1.1, 0.9, -0.05, 0.3, 0.7};
  const auto r = wilcoxon_signed_rank_greater(d);
  ASSERT_TRUE(r.exact);
  // oracle: ranks of |d| and all 2^n sign flips
  std::vector<double> a;
  for (double x : d) a.push_back(std::abs(x));
  std::vector<double> ranks(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double rank = 1.0;
    for (std::size_t j = 0; j < d.size(); ++j) rank += a[j] < a[i];
    ranks[i] = rank;
  }
  double w = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) w += d[i] > 0 ? ranks[i] : 0.0;
  std::size_t ge = 0;
  const std::size_t total = std::size_t{1} << d.size();
  for (std::size_t mask = 0; mask < total; ++mask) {
    double wm = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (mask >> i & 1) wm += ranks[i];
    ge += wm >= w;
  }
  EXPECT_EQ(r.w_plus, w);
  EXPECT_NEAR(r.p_value, static_cast<double>(ge) / total, 1e-15);
}

TEST(Wilcoxon, AllPositiveTwenty) {
  std::vector<double> d(20);
  for (std::size_t i = 0; i < 20; ++i) d[i] = 1.0 + i;
  EXPECT_NEAR(wilcoxon_signed_rank_greater(d).p_value, std::ldexp(1.0, -20), 1e-18);
}

TEST(Wilcoxon, ZerosDroppedAndTiesApproximate) {
  const auto r = wilcoxon_signed_rank_greater(std::vector<double>{0.0, 1.0, 1.0, -1.0, 2.0});
  EXPECT_EQ(r.n, 4u);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LT(r.p_value, 1.0);
}
