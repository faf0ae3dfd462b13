#pragma once

// Small planning models shared by the planner unit tests and the acceptance binary.

#include <cstddef>
#include <random>
#include <vector>

#include "uamdp/planner.hpp"

namespace uamdp::toys {

// Two steps. Step 0: action 0 pays 1, action 1 pays 0 and opens the deferred
// branch. Step 1 pays 2 on the deferred branch and 0 otherwise, whatever the
// action. Each reward carries N(0, noise_sd^2) noise.
struct DeferredToy {
  struct State {
    int h = 0;
    int branch = 0;
  };
  double noise_sd = 0.0;

  std::size_t num_actions() const { return 2; }
  Step<State> step(const State& s, std::size_t a, const LatentParam&, Rng& rng) const {
    double r;
    State next{s.h + 1, s.branch};
    if (s.h == 0) {
      next.branch = static_cast<int>(a);
      r = a == 0 ? 1.0 : 0.0;
    } else {
      r = s.branch == 1 ? 2.0 : 0.0;
    }
    if (noise_sd > 0.0) r += noise_sd * std::normal_distribution<double>(0.0, 1.0)(rng);
    return {next, r, next.h >= 2};
  }
  std::vector<double> observe(const State& s) const { return {static_cast<double>(s.branch)}; }
};

// Deterministic per-action rewards, one state.
struct BanditToy {
  struct State {};
  std::vector<double> rewards;

  std::size_t num_actions() const { return rewards.size(); }
  Step<State> step(const State&, std::size_t a, const LatentParam&, Rng&) const { return {{}, rewards[a], false}; }
  std::vector<double> observe(const State&) const { return {0.0}; }
};

// Constant reward, terminating after `terminal_at` steps when that is non-zero.
struct ConstantToy {
  struct State {
    int h = 0;
  };
  double reward = 1.0;
  int terminal_at = 0;

  std::size_t num_actions() const { return 2; }
  Step<State> step(const State& s, std::size_t, const LatentParam&, Rng&) const {
    const State next{s.h + 1};
    return {next, reward, terminal_at > 0 && next.h >= terminal_at};
  }
  std::vector<double> observe(const State&) const { return {0.0}; }
};

// Two steps with random transitions. From state 0, action a moves to state 1
// with probability p[a]; state 1 pays 1 per step and state 0 pays 0. Rewards
// are paid on arrival.
struct CoinToy {
  struct State {
    int h = 0;
    int s = 0;
  };
  double p[2] = {0.3, 0.7};

  std::size_t num_actions() const { return 2; }
  Step<State> step(const State& st, std::size_t a, const LatentParam&, Rng& rng) const {
    const double q = st.s == 1 ? 0.9 : p[a];
    const int next = std::bernoulli_distribution(q)(rng) ? 1 : 0;
    return {{st.h + 1, next}, next == 1 ? 1.0 : 0.0, st.h + 1 >= 2};
  }
  std::vector<double> observe(const State& st) const { return {static_cast<double>(st.s)}; }

  // Exact expected return of the first action followed by uniform-random play.
  double exact_q(std::size_t a, double gamma) const {
    const double p1 = p[a];
    const double p_after0 = 0.5 * (p[0] + p[1]);
    return p1 + gamma * (p1 * 0.9 + (1.0 - p1) * p_after0);
  }
};

// Action 1 pays more but moves the observation to 10 with certainty.
struct HazardToy {
  struct State {
    double x = 0.0;
  };

  std::size_t num_actions() const { return 2; }
  Step<State> step(const State& s, std::size_t a, const LatentParam&, Rng&) const {
    if (a == 1) return {{10.0}, 5.0, false};
    return {{s.x}, 1.0, false};
  }
  std::vector<double> observe(const State& s) const { return {s.x}; }
};

}  // namespace uamdp::toys
