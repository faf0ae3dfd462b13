#include "uamdp/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "uamdp/rng.hpp"

namespace uamdp {

namespace {

std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("belief weights must be finite and non-negative");
    total += v;
  }
  if (!(total > 0.0)) throw std::invalid_argument("belief weights sum to zero");
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

Belief::Belief(std::vector<LatentParam> hypotheses, std::vector<double> weights)
    : hypotheses_(std::move(hypotheses)) {
  if (hypotheses_.empty()) throw std::invalid_argument("belief needs at least one hypothesis");
  if (weights.size() != hypotheses_.size())
    throw std::invalid_argument("belief hypotheses/weights length mismatch");
  weights_ = normalized(std::move(weights));
}

Belief::Belief(std::vector<LatentParam> hypotheses, std::vector<double> weights, Normalized)
    : hypotheses_(std::move(hypotheses)), weights_(std::move(weights)) {}

Belief Belief::uniform(std::vector<LatentParam> hypotheses) {
  std::vector<double> w(hypotheses.size(), 1.0);
  return Belief(std::move(hypotheses), std::move(w));
}

Belief Belief::degenerate(LatentParam hypothesis) {
  return Belief({std::move(hypothesis)}, {1.0});
}

std::size_t Belief::mode_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < weights_.size(); ++i)
    if (weights_[i] > weights_[best]) best = i;
  return best;
}

Belief bayes_update(const Belief& b, std::span<const double> likelihoods, Exec exec) {
  if (likelihoods.size() != b.size())
    throw std::invalid_argument("bayes_update: likelihood length mismatch");
  std::vector<double> logs(likelihoods.size());
  for (std::size_t i = 0; i < likelihoods.size(); ++i) {
    const double l = likelihoods[i];
    if (!(l >= 0.0) || !std::isfinite(l))
      throw std::invalid_argument("bayes_update: likelihoods must be finite and non-negative");
    logs[i] = l > 0.0 ? std::log(l) : -std::numeric_limits<double>::infinity();
  }
  return bayes_update_log(b, logs, exec);
}

Belief bayes_update_log(const Belief& b, std::span<const double> log_likelihoods, Exec exec) {
  const std::size_t n = b.size();
  if (log_likelihoods.size() != n)
    throw std::invalid_argument("bayes_update: likelihood length mismatch");
  std::vector<double> log_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(log_likelihoods[i]) || log_likelihoods[i] == std::numeric_limits<double>::infinity())
      throw std::invalid_argument("bayes_update: log-likelihood must not be NaN or +inf");
    const double w = b.weights()[i];
    log_w[i] = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
  }
  std::vector<double> shifted(n);
  const double shift = kernels::shifted_log_posterior(log_w, log_likelihoods, shifted, exec);
  if (shift == -std::numeric_limits<double>::infinity()) throw AllZeroLikelihood();

  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(shifted[i]);
    total += w[i];
  }
  for (double& v : w) v /= total;
  return Belief(b.hypotheses(), std::move(w), Belief::Normalized{});
}

double effective_sample_size(const Belief& b) {
  double s = 0.0;
  for (double w : b.weights()) s += w * w;
  return 1.0 / s;
}

std::vector<std::size_t> systematic_indices(std::span<const double> weights, std::size_t n,
                                            double u) {
  if (weights.empty()) throw std::invalid_argument("systematic_indices: empty weights");
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("systematic_indices: u not in [0,1)");
  std::vector<std::size_t> idx(n);
  double cumulative = weights[0];
  std::size_t i = 0;
  const std::size_t last = weights.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double point = (static_cast<double>(k) + u) / static_cast<double>(n);
    while (point >= cumulative && i < last) {
      ++i;
      cumulative += weights[i];
    }
    idx[k] = i;
  }
  return idx;
}

Belief resample(const Belief& b, const ParticleFilterConfig& cfg) {
  if (cfg.n_particles < 1) throw std::invalid_argument("resample: n_particles must be >= 1");
  Rng rng(cfg.rng_seed);
  const double u = uniform01(rng);
  const auto idx = systematic_indices(b.weights(), cfg.n_particles, u);
  std::vector<LatentParam> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(b.hypotheses()[i]);
  return Belief::uniform(std::move(out));
}

LatentParam thompson_sample(const Belief& b, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  const double u = uniform01(rng);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.weights()[i] <= 0.0) continue;
    last_positive = i;
    cumulative += b.weights()[i];
    if (u < cumulative) return b.hypotheses()[i];
  }
  return b.hypotheses()[last_positive];
}

double entropy(const Belief& b) {
  double h = 0.0;
  for (double w : b.weights())
    if (w > 0.0) h -= w * std::log(w);
  return std::max(h, 0.0);
}

Belief collapse_by_id(const Belief& b) {
  std::vector<LatentParam> hyps;
  std::vector<double> w;
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& h = b.hypotheses()[i];
    auto [it, inserted] = pos.try_emplace(h.id, hyps.size());
    if (inserted) {
      hyps.push_back(h);
      w.push_back(b.weights()[i]);
    } else {
      w[it->second] += b.weights()[i];
    }
  }
  return Belief(std::move(hyps), std::move(w));
}

double mass_of(const Belief& b, const std::string& id) {
  double m = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    if (b.hypotheses()[i].id == id) m += b.weights()[i];
  return m;
}

double l1_distance(const Belief& a, const Belief& b) {
  std::unordered_map<std::string, double> diff;
  for (std::size_t i = 0; i < a.size(); ++i) diff[a.hypotheses()[i].id] += a.weights()[i];
  for (std::size_t i = 0; i < b.size(); ++i) diff[b.hypotheses()[i].id] -= b.weights()[i];
  double d = 0.0;
  for (const auto& [id, v] : diff) d += std::abs(v);
  return d;
}

Belief markov_mix(const Belief& b, double switch_prob) {
  if (!(switch_prob >= 0.0 && switch_prob <= 1.0))
    throw std::invalid_argument("markov_mix: switch_prob not in [0,1]");
  const Belief c = collapse_by_id(b);
  const std::size_t k = c.size();
  if (k == 1 || switch_prob == 0.0) return c;
  std::vector<double> w(k);
  const double spread = switch_prob / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i)
    w[i] = (1.0 - switch_prob) * c.weights()[i] + spread * (1.0 - c.weights()[i]);
  return Belief(c.hypotheses(), std::move(w));
}

nlohmann::json to_json(const LatentParam& p) { return {{"id", p.id}, {"params", p.params}}; }

nlohmann::json to_json(const Belief& b) {
  nlohmann::json hyps = nlohmann::json::array();
  for (const auto& h : b.hypotheses()) hyps.push_back(to_json(h));
  return {{"hypotheses", hyps}, {"weights", b.weights()}};
}

LatentParam latent_param_from_json(const nlohmann::json& j) {
  LatentParam p;
  p.id = j.at("id").get<std::string>();
  p.params = j.value("params", std::vector<double>{});
  return p;
}

Belief belief_from_json(const nlohmann::json& j) {
  std::vector<LatentParam> hyps;
  for (const auto& h : j.at("hypotheses")) hyps.push_back(latent_param_from_json(h));
  return Belief(std::move(hyps), j.at("weights").get<std::vector<double>>());
}

ParticleFilter::ParticleFilter(const Belief& prior, ParticleFilterConfig cfg)
    : cfg_(cfg), particles_(Belief::degenerate(prior.hypothesis(0))) {
  if (cfg_.n_particles < 1) throw std::invalid_argument("particle filter needs N >= 1");
  if (!(cfg_.resample_threshold > 0.0 && cfg_.resample_threshold <= 1.0))
    throw std::invalid_argument("resample_threshold must lie in (0, 1]");
  reset(prior);
}

void ParticleFilter::reset(const Belief& prior) {
  ParticleFilterConfig c = cfg_;
  c.rng_seed = derive_seed(cfg_.rng_seed, Stream::particles, draws_++);
  particles_ = resample(prior, c);
}

void ParticleFilter::update_log(std::span<const double> log_likelihoods, Exec exec) {
  particles_ = bayes_update_log(particles_, log_likelihoods, exec);
  maybe_resample();
}

void ParticleFilter::maybe_resample() {
  const double ess = effective_sample_size(particles_);
  if (ess / static_cast<double>(particles_.size()) < cfg_.resample_threshold) {
    ParticleFilterConfig c = cfg_;
    c.rng_seed = derive_seed(cfg_.rng_seed, Stream::particles, draws_++);
    particles_ = resample(particles_, c);
    ++resample_count_;
  }
}

void ParticleFilter::propagate(const std::vector<LatentParam>& support, double switch_prob) {
  if (switch_prob <= 0.0 || support.size() < 2) return;
  Rng rng(derive_seed(cfg_.rng_seed, Stream::particles, draws_++));
  std::vector<LatentParam> moved = particles_.hypotheses();
  for (auto& p : moved) {
    if (uniform01(rng) >= switch_prob) continue;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < support.size(); ++i)
      if (support[i].id != p.id) others.push_back(i);
    if (others.empty()) continue;
    const auto pick = std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng);
    p = support[others[pick]];
  }
  particles_ = Belief(std::move(moved), particles_.weights());
}

}  // namespace uamdp
