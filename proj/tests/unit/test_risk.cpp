#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "uamdp/risk.hpp"
#include "uamdp/rng.hpp"

using namespace uamdp;

namespace {

double brute_cvar(std::vector<double> v, double alpha) {
  std::sort(v.begin(), v.end());
  const auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(alpha * static_cast<double>(v.size()))));
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += v[i];
  return s / static_cast<double>(k);
}

std::vector<double> random_samples(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = 10.0 * uniform01(rng) - 5.0;
  return v;
}

}  // namespace

TEST(Cvar, ConstantSamples) {
  EXPECT_EQ(cvar(std::vector<double>(7, 2.5), 0.1), 2.5);
}

TEST(Cvar, FourSamplesQuarterTail) {
  EXPECT_EQ(cvar(std::vector<double>{-3, -1, 0, 2}, 0.25), -3.0);
}

TEST(Cvar, OneToTen) {
  std::vector<double> v{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  EXPECT_EQ(cvar(v, 0.2), 1.5);
}

TEST(Cvar, TailSizeRounding) {
  EXPECT_EQ(cvar_tail_size(10, 0.2), 2u);
  EXPECT_EQ(cvar_tail_size(10, 0.21), 3u);
  EXPECT_EQ(cvar_tail_size(10, 0.01), 1u);
  EXPECT_EQ(cvar_tail_size(1, 0.5), 1u);
}

TEST(Cvar, MatchesBruteForce) {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const auto v = random_samples(rng, 1 + i % 37);
    for (double a : {0.01, 0.05, 0.1, 0.25, 0.5}) EXPECT_EQ(cvar(v, a), brute_cvar(v, a));
  }
}

TEST(CvarProperty, AtMostMean) {
  Rng rng(78);
  for (int i = 0; i < 500; ++i) {
    const ReturnDistribution z(random_samples(rng, 20));
    EXPECT_LE(cvar(z, 0.1), z.mean() + 1e-12);
  }
}

TEST(CvarProperty, MonotoneInAlpha) {
  Rng rng(79);
  for (int i = 0; i < 500; ++i) {
    const auto v = random_samples(rng, 50);
    EXPECT_LE(cvar(v, 0.05), cvar(v, 0.25) + 1e-12);
    EXPECT_LE(cvar(v, 0.25), cvar(v, 0.5) + 1e-12);
  }
}

TEST(CvarProperty, TranslationAndScaling) {
  // Powers of two keep every operation exact.
  Rng rng(80);
  for (int i = 0; i < 200; ++i) {
    auto v = random_samples(rng, 40);
    for (auto& x : v) x = std::round(x * 64.0) / 64.0;
    auto shifted = v, scaled = v;
    for (auto& x : shifted) x += 8.0;
    for (auto& x : scaled) x *= 4.0;
    EXPECT_EQ(cvar(shifted, 0.1), cvar(v, 0.1) + 8.0);
    EXPECT_EQ(cvar(scaled, 0.1), 4.0 * cvar(v, 0.1));
  }
}

TEST(BlendedObjective, Endpoints) {
  const std::vector<double> v{-3, -1, 0, 2};
  RiskConfig c;
  c.alpha = 0.25;
  c.eta = 0.0;
  EXPECT_EQ(blended_objective(v, c), -0.5);
  c.eta = 1.0;
  EXPECT_EQ(blended_objective(v, c), -3.0);
}

TEST(BlendedObjective, HandArithmetic) {
  RiskConfig c;
  c.alpha = 0.25;
  c.eta = 0.7;
  EXPECT_NEAR(blended_objective(std::vector<double>{-3, -1, 0, 2}, c), 0.3 * -0.5 + 0.7 * -3.0, 1e-15);
  EXPECT_NEAR(blended_objective(std::vector<double>{-3, -1, 0, 2}, c), -2.25, 1e-15);
}

TEST(BlendedObjectiveProperty, NonIncreasingInEta) {
  Rng rng(81);
  for (int i = 0; i < 100; ++i) {
    const auto v = random_samples(rng, 30);
    RiskConfig c;
    c.alpha = 0.1;
    double prev = std::numeric_limits<double>::infinity();
    for (double eta = 0.0; eta <= 1.0 + 1e-12; eta += 0.1) {
      c.eta = std::min(eta, 1.0);
      const double b = blended_objective(v, c);
      EXPECT_LE(b, prev + 1e-12);
      prev = b;
    }
  }
}

TEST(ReturnDistribution, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(ReturnDistribution({}), std::invalid_argument);
  EXPECT_THROW(ReturnDistribution({1.0, std::nan("")}), std::invalid_argument);
}

TEST(RiskConfig, Validate) {
  RiskConfig c;
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.alpha = 0.05;
  c.eta = 1.2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.eta = 0.5;
  c.delta = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ChanceConstraint, EntireSpace) {
  ObservationPaths paths(10, 3, 2);
  Rng rng(4);
  for (auto& x : paths.data) x = 1e6 * (uniform01(rng) - 0.5);
  RiskConfig c;
  c.delta = 0.01;
  const double inf = std::numeric_limits<double>::infinity();
  c.safe_set = SafeBox{{-inf, -inf}, {inf, inf}};
  for (bool ok : chance_constraint_ok(paths, c)) EXPECT_TRUE(ok);
}

TEST(ChanceConstraint, NinetySixVersusNinetyFour) {
  RiskConfig c;
  c.delta = 0.05;
  c.safe_set = SafeBox{{0.0}, {1.0}};
  ObservationPaths paths(100, 2, 1);
  for (std::size_t s = 0; s < 100; ++s) {
    paths.at(s, 0)[0] = s < 96 ? 0.5 : 2.0;
    paths.at(s, 1)[0] = s < 94 ? 0.5 : 2.0;
  }
  const auto ok = chance_constraint_ok(paths, c);
  EXPECT_TRUE(ok[0]);
  EXPECT_FALSE(ok[1]);
  const auto frac = safe_fraction(paths, *c.safe_set);
  EXPECT_EQ(frac[0], 0.96);
  EXPECT_EQ(frac[1], 0.94);
}

TEST(ChanceConstraint, RequiresSafeSet) {
  ObservationPaths paths(1, 1, 1);
  EXPECT_THROW(chance_constraint_ok(paths, RiskConfig{}), std::invalid_argument);
}

TEST(SafeBox, BoundsInclusive) {
  const SafeBox b{{0.0, -1.0}, {1.0, 1.0}};
  EXPECT_TRUE(b.contains(std::vector<double>{0.0, 1.0}));
  EXPECT_FALSE(b.contains(std::vector<double>{1.0001, 0.0}));
}
