#pragma once

// Posterior beliefs over latent environment parameters.
//
// A Belief is a weighted list of hypotheses. Exact beliefs over a finite
// parameter set and N-particle approximations share this representation;
// particle beliefs may hold several copies of the same hypothesis id.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uamdp/kernels.hpp"

namespace uamdp {

struct LatentParam {
  std::string id;
  std::vector<double> params;

  friend bool operator==(const LatentParam&, const LatentParam&) = default;
};

class AllZeroLikelihood : public std::runtime_error {
 public:
  AllZeroLikelihood() : std::runtime_error("every hypothesis has zero posterior mass") {}
};

class Belief {
 public:
  // Weights are normalized on construction; throws std::invalid_argument for
  // empty input, mismatched lengths, negative or non-finite weights, or zero mass.
  Belief(std::vector<LatentParam> hypotheses, std::vector<double> weights);

  static Belief uniform(std::vector<LatentParam> hypotheses);
  static Belief degenerate(LatentParam hypothesis);

  std::size_t size() const { return hypotheses_.size(); }
  const std::vector<LatentParam>& hypotheses() const { return hypotheses_; }
  const std::vector<double>& weights() const { return weights_; }
  const LatentParam& hypothesis(std::size_t i) const { return hypotheses_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }

  // Index of the highest-weight hypothesis; ties go to the lowest index.
  std::size_t mode_index() const;
  const LatentParam& mode() const { return hypotheses_[mode_index()]; }

 private:
  struct Normalized {};
  Belief(std::vector<LatentParam> hypotheses, std::vector<double> weights, Normalized);
  friend Belief bayes_update_log(const Belief&, std::span<const double>, Exec);

  std::vector<LatentParam> hypotheses_;
  std::vector<double> weights_;
};

struct ParticleFilterConfig {
  std::size_t n_particles = 256;
  double resample_threshold = 0.5;
  std::uint64_t rng_seed = 0;
};

// w_i ∝ w_i * l_i. Throws AllZeroLikelihood if every product is zero.
Belief bayes_update(const Belief& b, std::span<const double> likelihoods,
                    Exec exec = Exec::serial);

// Same update with log-likelihoods; computed with a max shift so long products
// of small likelihoods do not underflow.
Belief bayes_update_log(const Belief& b, std::span<const double> log_likelihoods,
                        Exec exec = Exec::serial);

double effective_sample_size(const Belief& b);

// Systematic resampling indices for offset u in [0, 1): stratum k selects the
// first i with cumulative weight > (k + u) / n.
std::vector<std::size_t> systematic_indices(std::span<const double> weights, std::size_t n,
                                            double u);

// n_particles hypotheses by systematic resampling, uniform weights.
Belief resample(const Belief& b, const ParticleFilterConfig& cfg);

LatentParam thompson_sample(const Belief& b, std::uint64_t rng_seed);

// Shannon entropy in nats, 0 ln 0 := 0.
double entropy(const Belief& b);

// Merges hypotheses sharing an id (first occurrence keeps its position).
Belief collapse_by_id(const Belief& b);

// L1 distance between the id-marginals of two beliefs.
double l1_distance(const Belief& a, const Belief& b);

// Weight of hypothesis id (summed over copies).
double mass_of(const Belief& b, const std::string& id);

// Markov regime persistence: each hypothesis keeps its mass with probability
// 1 - switch_prob and spreads switch_prob evenly over the other ids.
// switch_prob = 0 is the identity. Applies to the collapsed id-marginal.
Belief markov_mix(const Belief& b, double switch_prob);

nlohmann::json to_json(const LatentParam& p);
nlohmann::json to_json(const Belief& b);
LatentParam latent_param_from_json(const nlohmann::json& j);
Belief belief_from_json(const nlohmann::json& j);

// Bootstrap filter over a fixed hypothesis set. Resamples whenever
// ESS / N drops below the threshold.
class ParticleFilter {
 public:
  // Initializes N particles from `prior` by systematic resampling.
  ParticleFilter(const Belief& prior, ParticleFilterConfig cfg);

  const Belief& particles() const { return particles_; }
  Belief marginal() const { return collapse_by_id(particles_); }
  std::size_t resample_count() const { return resample_count_; }

  // likelihoods per particle; throws AllZeroLikelihood.
  void update_log(std::span<const double> log_likelihoods, Exec exec = Exec::serial);

  // Regime propagation: each particle switches to a uniformly chosen other
  // hypothesis from `support` with probability switch_prob.
  void propagate(const std::vector<LatentParam>& support, double switch_prob);

  void reset(const Belief& prior);

 private:
  void maybe_resample();

  ParticleFilterConfig cfg_;
  Belief particles_;
  std::uint64_t draws_ = 0;
  std::size_t resample_count_ = 0;
};

}  // namespace uamdp
