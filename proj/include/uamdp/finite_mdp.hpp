#pragma once

// Finite MDPs with a finite set of candidate transition models, used for the
// tiny Bayes-adaptive instances and for planner test toys.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uamdp/belief.hpp"
#include "uamdp/planner.hpp"

namespace uamdp {

// Rewards r(s,a) are shared by every theta; only transitions are uncertain,
// and the next state is the observation.
struct TinyBAMDP {
  std::string name;
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<LatentParam> thetas;
  std::vector<std::vector<double>> transitions;  // per theta, flat [s][a][s']
  std::vector<double> reward;                    // flat [s][a]
  std::vector<double> prior;                     // over thetas
  std::size_t s0 = 0;
  std::size_t horizon = 1;
  double discount = 0.9;

  double p(std::size_t theta, std::size_t s, std::size_t a, std::size_t s_next) const {
    return transitions[theta][(s * n_actions + a) * n_states + s_next];
  }
  double r(std::size_t s, std::size_t a) const { return reward[s * n_actions + a]; }
  double r_max() const;
  Belief prior_belief() const { return Belief(thetas, prior); }
  std::size_t theta_index(const std::string& id) const;

  // Throws std::invalid_argument on shape errors, rows not summing to 1
  // within 1e-12, or a problem larger than the desk-scale cap.
  void validate() const;
};

TinyBAMDP tiny_bamdp_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TinyBAMDP& p);
TinyBAMDP load_tiny_bamdp(const std::string& path);

// Next state by inverse-CDF on one uniform draw.
std::size_t sample_next_state(const TinyBAMDP& p, std::size_t theta, std::size_t s,
                              std::size_t a, double u);

// Planning model over a TinyBAMDP. The state carries the step index so the
// horizon is respected; reward noise (Gaussian, sd reward_noise_sd) is optional.
class FiniteMdpModel {
 public:
  struct State {
    std::size_t s = 0;
    std::size_t t = 0;
  };

  explicit FiniteMdpModel(const TinyBAMDP& problem, double reward_noise_sd = 0.0);

  std::size_t num_actions() const { return problem_->n_actions; }
  Step<State> step(const State& st, std::size_t a, const LatentParam& theta, Rng& rng) const;
  std::vector<double> observe(const State& st) const { return {static_cast<double>(st.s)}; }

 private:
  const TinyBAMDP* problem_;
  double reward_noise_sd_;
};

// Two-step deferred-reward toy with one known model: action 0 pays 1 now and
// leads to a zero-reward state; action 1 pays 0 now and leads to a state
// whose every action pays 2. Optimal first action is 1 when discount > 0.5.
TinyBAMDP deferred_reward_toy(double discount = 1.0);

}  // namespace uamdp
