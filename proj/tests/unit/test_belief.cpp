#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "uamdp/belief.hpp"
#include "uamdp/rng.hpp"

using namespace uamdp;

namespace {

std::vector<LatentParam> hyps(std::size_t n) {
  std::vector<LatentParam> h;
  for (std::size_t i = 0; i < n; ++i) h.push_back({"h" + std::to_string(i), {static_cast<double>(i)}});
  return h;
}

Belief random_belief(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = uniform01(rng) + 1e-3;
  return Belief(hyps(n), w);
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(BayesUpdate, UniformPriorIsProportionalToLikelihood) {
  const auto b = bayes_update(Belief::uniform(hyps(2)), std::vector<double>{0.8, 0.2});
  EXPECT_NEAR(b.weight(0), 0.8, 1e-12);
  EXPECT_NEAR(b.weight(1), 0.2, 1e-12);
}

TEST(BayesUpdate, EqualLikelihoodsLeaveBeliefUnchanged) {
  const Belief b(hyps(3), {0.2, 0.5, 0.3});
  const auto u = bayes_update(b, std::vector<double>{0.4, 0.4, 0.4});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(u.weight(i), b.weight(i), 1e-12);
  EXPECT_EQ(u.hypotheses(), b.hypotheses());
}

TEST(BayesUpdate, HandNormalization) {
  const Belief b(hyps(3), {0.5, 0.25, 0.25});
  const std::vector<double> l{0.1, 0.4, 0.4};
  // oracle: w_i l_i / sum_j w_j l_j
  std::vector<double> expect(3);
  double z = 0.0;
  for (std::size_t i = 0; i < 3; ++i) z += b.weight(i) * l[i];
  for (std::size_t i = 0; i < 3; ++i) expect[i] = b.weight(i) * l[i] / z;
  const auto u = bayes_update(b, l);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(u.weight(i), expect[i], 1e-12);
  EXPECT_NEAR(u.weight(0), 0.2, 1e-12);
  EXPECT_NEAR(u.weight(1), 0.4, 1e-12);
}

TEST(BayesUpdate, AllZeroLikelihoodThrows) {
  const Belief b(hyps(2), {1.0, 0.0});
  EXPECT_THROW(bayes_update(b, std::vector<double>{0.0, 1.0}), AllZeroLikelihood);
  EXPECT_THROW(bayes_update_log(b, std::vector<double>{-INFINITY, 0.0}), AllZeroLikelihood);
}

TEST(BayesUpdate, LengthMismatchThrows) {
  EXPECT_THROW(bayes_update(Belief::uniform(hyps(2)), std::vector<double>{1.0}), std::invalid_argument);
}

TEST(BayesUpdate, LogSpaceSurvivesUnderflow) {
  // Linear-space products of these likelihoods underflow to 0.
  const auto b = bayes_update_log(Belief::uniform(hyps(2)), std::vector<double>{-2000.0, -2001.0});
  EXPECT_NEAR(b.weight(0), 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(BayesUpdateProperty, PreservesNormalization) {
  Rng rng(11);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 1 + rep % 7;
    const auto b = random_belief(rng, n);
    std::vector<double> l(n);
    for (auto& x : l) x = uniform01(rng);
    const auto u = bayes_update(b, l);
    EXPECT_NEAR(sum(u.weights()), 1.0, 1e-12);
  }
}

TEST(BayesUpdateProperty, InvariantToLikelihoodScale) {
  Rng rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const auto b = random_belief(rng, 5);
    std::vector<double> l(5), l2(5);
    const double c = 0.001 + 1000.0 * uniform01(rng);
    for (std::size_t i = 0; i < 5; ++i) {
      l[i] = uniform01(rng);
      l2[i] = c * l[i];
    }
    const auto u1 = bayes_update(b, l), u2 = bayes_update(b, l2);
    EXPECT_EQ(u1.mode_index(), u2.mode_index());
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(u1.weight(i), u2.weight(i), 1e-12);
  }
}

TEST(BayesUpdateProperty, SequentialEqualsBatched) {
  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    const auto b = random_belief(rng, 4);
    std::vector<double> l1(4), l2(4), l12(4);
    for (std::size_t i = 0; i < 4; ++i) {
      l1[i] = uniform01(rng) + 1e-6;
      l2[i] = uniform01(rng) + 1e-6;
      l12[i] = l1[i] * l2[i];
    }
    const auto seq = bayes_update(bayes_update(b, l1), l2);
    const auto batch = bayes_update(b, l12);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(seq.weight(i), batch.weight(i), 1e-10);
  }
}

TEST(BayesUpdateProperty, DiracLikelihoodCollapsesEntropy) {
  Rng rng(14);
  for (int rep = 0; rep < 50; ++rep) {
    const auto b = random_belief(rng, 4);
    std::vector<double> l(4, 0.0);
    l[rep % 4] = 1.0;
    const auto u = bayes_update(b, l);
    EXPECT_LE(entropy(u), entropy(b));
    EXPECT_EQ(entropy(u), 0.0);
  }
}

TEST(BayesUpdate, SerialAndParallelAgreeBitwise) {
  Rng rng(15);
  const auto b = random_belief(rng, 1000);
  std::vector<double> ll(1000);
  for (auto& x : ll) x = -50.0 * uniform01(rng);
  const auto s = bayes_update_log(b, ll, Exec::serial);
  const auto p = bayes_update_log(b, ll, Exec::parallel);
  EXPECT_EQ(s.weights(), p.weights());
}

TEST(EffectiveSampleSize, Examples) {
  EXPECT_NEAR(effective_sample_size(Belief::uniform(hyps(4))), 4.0, 1e-12);
  EXPECT_NEAR(effective_sample_size(Belief(hyps(4), {1, 0, 0, 0})), 1.0, 1e-12);
  EXPECT_NEAR(effective_sample_size(Belief(hyps(3), {0.5, 0.3, 0.2})), 1.0 / 0.38, 1e-12);
}

TEST(Resample, DegenerateGivesCopies) {
  const auto r = resample(Belief::degenerate({"only", {1.0}}), {7, 0.5, 3});
  ASSERT_EQ(r.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(r.hypothesis(i).id, "only");
    EXPECT_NEAR(r.weight(i), 1.0 / 7.0, 1e-15);
  }
}

TEST(Resample, SystematicStrataByHand) {
  // strata at 0, 1/4, 2/4, 3/4 against cumulative weights (0.75, 1)
  const auto idx = systematic_indices(std::vector<double>{0.75, 0.25}, 4, 0.0);
  EXPECT_EQ(idx, (std::vector<std::size_t>{0, 0, 0, 1}));
}

TEST(Resample, OutputWeightsUniform) {
  Rng rng(16);
  const auto b = random_belief(rng, 5);
  const auto r = resample(b, {13, 0.5, 99});
  for (double w : r.weights()) EXPECT_NEAR(w, 1.0 / 13.0, 1e-15);
}

TEST(ResampleProperty, Unbiased) {
  const Belief b(hyps(3), {0.52, 0.31, 0.17});
  const std::size_t n = 10, reps = 10000;
  std::vector<double> s1(3, 0.0), s2(3, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto out = resample(b, {n, 0.5, derive_seed(77, r)});
    std::vector<double> c(3, 0.0);
    for (const auto& h : out.hypotheses()) c[static_cast<std::size_t>(h.params[0])] += 1.0;
    for (std::size_t i = 0; i < 3; ++i) {
      s1[i] += c[i];
      s2[i] += c[i] * c[i];
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double mean = s1[i] / reps;
    const double var = s2[i] / reps - mean * mean;
    const double se = std::sqrt(std::max(var, 1e-12) / reps);
    EXPECT_NEAR(mean, n * b.weight(i), 3.0 * se) << "hypothesis " << i;
  }
}

TEST(Thompson, DegenerateAndZeroMass) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    EXPECT_EQ(thompson_sample(Belief::degenerate({"x", {}}), s).id, "x");
    EXPECT_EQ(thompson_sample(Belief(hyps(2), {1.0, 0.0}), s).id, "h0");
  }
}

TEST(Thompson, FrequenciesMatchWeights) {
  const auto b = Belief::uniform(hyps(2));
  int first = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) first += thompson_sample(b, derive_seed(5, s)).id == "h0";
  EXPECT_NEAR(first / 10000.0, 0.5, 0.03);
}

TEST(Thompson, DeterministicGivenSeed) {
  Rng rng(17);
  const auto b = random_belief(rng, 6);
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(thompson_sample(b, s), thompson_sample(b, s));
}

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(Belief::degenerate({"x", {}})), 0.0);
  EXPECT_NEAR(entropy(Belief::uniform(hyps(4))), std::log(4.0), 1e-12);
  EXPECT_NEAR(entropy(Belief(hyps(3), {0.5, 0.25, 0.25})), 1.5 * std::log(2.0), 1e-12);
  EXPECT_NEAR(entropy(Belief(hyps(3), {0.5, 0.25, 0.25})), 1.0397, 1e-4);
}

TEST(BeliefInvariants, ConstructionValidates) {
  EXPECT_THROW(Belief({}, {}), std::invalid_argument);
  EXPECT_THROW(Belief(hyps(2), {1.0}), std::invalid_argument);
  EXPECT_THROW(Belief(hyps(2), {-1.0, 2.0}), std::invalid_argument);
  EXPECT_THROW(Belief(hyps(2), {NAN, 1.0}), std::invalid_argument);
  EXPECT_THROW(Belief(hyps(2), {0.0, 0.0}), std::invalid_argument);
  const Belief b(hyps(2), {3.0, 1.0});
  EXPECT_NEAR(b.weight(0), 0.75, 1e-15);
}

TEST(BeliefInvariants, ModeTiesToLowestIndex) {
  EXPECT_EQ(Belief(hyps(3), {0.4, 0.4, 0.2}).mode_index(), 0u);
  EXPECT_EQ(Belief(hyps(3), {0.2, 0.4, 0.4}).mode_index(), 1u);
}

TEST(Collapse, MergesDuplicateIds) {
  const Belief b({{"a", {}}, {"b", {}}, {"a", {}}}, {0.25, 0.5, 0.25});
  const auto c = collapse_by_id(b);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.hypothesis(0).id, "a");
  EXPECT_NEAR(c.weight(0), 0.5, 1e-15);
  EXPECT_NEAR(mass_of(b, "a"), 0.5, 1e-15);
  EXPECT_NEAR(l1_distance(b, Belief({{"a", {}}, {"b", {}}}, {0.5, 0.5})), 0.0, 1e-15);
}

TEST(MarkovMix, IdentityAtZeroAndMixing) {
  const Belief b(hyps(2), {0.9, 0.1});
  const auto same = markov_mix(b, 0.0);
  EXPECT_EQ(same.weights(), b.weights());
  const auto m = markov_mix(b, 0.1);
  EXPECT_NEAR(m.weight(0), 0.9 * 0.9 + 0.1 * 0.1, 1e-12);
  EXPECT_NEAR(m.weight(1), 0.1 * 0.9 + 0.9 * 0.1, 1e-12);
}

TEST(ParticleFilter, ConvergesOnRepeatedEvidence) {
  const auto prior = Belief::uniform(hyps(3));
  ParticleFilter pf(prior, {64, 0.5, 21});
  EXPECT_EQ(pf.particles().size(), 64u);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> ll;
    for (const auto& h : pf.particles().hypotheses()) ll.push_back(h.id == "h0" ? std::log(0.8) : std::log(0.2));
    pf.update_log(ll);
  }
  EXPECT_GT(mass_of(pf.marginal(), "h0"), 0.99);
  EXPECT_GT(pf.resample_count(), 0u);
}

TEST(ParticleFilter, PropagateKeepsSupport) {
  const auto support = hyps(3);
  ParticleFilter pf(Belief::uniform(support), {30, 0.5, 4});
  pf.propagate(support, 0.5);
  EXPECT_EQ(pf.particles().size(), 30u);
  for (const auto& h : pf.particles().hypotheses()) EXPECT_TRUE(h.id == "h0" || h.id == "h1" || h.id == "h2");
}

TEST(BeliefJson, RoundTrip) {
  const Belief b(hyps(3), {0.2, 0.3, 0.5});
  const auto j = to_json(b);
  EXPECT_TRUE(j.contains("hypotheses"));
  EXPECT_TRUE(j.contains("weights"));
  const auto back = belief_from_json(j);
  EXPECT_EQ(back.hypotheses(), b.hypotheses());
  EXPECT_EQ(back.weights(), b.weights());
}
