#pragma once

// Exact Bayes-adaptive solutions on tiny finite problems and the regret /
// error-bound instrumentation built on them.
//
// Beliefs here are weight vectors over the instance's theta list. The
// reachable belief tree is enumerated by observation history (next states),
// so values are exact up to floating-point rounding.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uamdp/belief.hpp"
#include "uamdp/finite_mdp.hpp"
#include "uamdp/kernels.hpp"

namespace uamdp {

class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(std::size_t cap)
      : std::runtime_error("belief tree exceeds node cap " + std::to_string(cap)) {}
};

inline constexpr std::size_t kDefaultNodeCap = 2'000'000;

struct MdpSolution {
  std::vector<std::vector<double>> value;         // [t][s], t = 0..H
  std::vector<std::vector<std::size_t>> policy;   // [t][s], t < H; ties to lowest action
};

// Finite-horizon value iteration on the fully observable M(theta).
MdpSolution exact_mdp_optimal(const TinyBAMDP& p, std::size_t theta);

// Bayes posterior over thetas after observing s -> s_next under a.
// Returns false (and leaves `out` untouched) if the transition has zero
// predictive probability.
bool posterior_step(const TinyBAMDP& p, std::span<const double> b, std::size_t s, std::size_t a,
                    std::size_t s_next, std::vector<double>& out);

// Backward induction over the history-enumerated belief tree.
class BayesSolver {
 public:
  explicit BayesSolver(const TinyBAMDP& p, std::size_t node_cap = kDefaultNodeCap)
      : p_(&p), node_cap_(node_cap) {}

  // Bayesian action values with `depth` steps of lookahead from (b, s);
  // values past the lookahead are taken as 0.
  std::vector<double> q_values(std::span<const double> b, std::size_t s, std::size_t depth);
  double value(std::span<const double> b, std::size_t s, std::size_t depth);
  std::size_t nodes() const { return nodes_; }

 private:
  const TinyBAMDP* p_;
  std::size_t node_cap_;
  std::size_t nodes_ = 0;
};

struct ExactBayesValue {
  double value = 0.0;  // V*_0(b0, s0)
  std::size_t nodes = 0;
};

ExactBayesValue exact_bayes_value(const TinyBAMDP& p, std::size_t node_cap = kDefaultNodeCap);

// Lowest index among the maxima.
std::size_t argmax_lowest(std::span<const double> v);

// Interaction contract used by the regret runner. Beliefs are over the
// instance's theta indices.
class TinyAgent {
 public:
  virtual ~TinyAgent() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(std::uint64_t seed) = 0;
  virtual std::size_t act(std::size_t s, std::size_t t) = 0;
  virtual void observe(std::size_t s, std::size_t a, std::size_t s_next) = 0;
  // The belief the agent plans with, if it keeps one.
  virtual std::optional<std::vector<double>> belief() const { return std::nullopt; }
};

using AgentFactory = std::function<std::unique_ptr<TinyAgent>()>;

// Exact filter; maximizes the Bayesian action value with `lookahead` steps
// (0 means the full remaining horizon).
std::unique_ptr<TinyAgent> make_exact_bayes_agent(const TinyBAMDP& p, std::size_t lookahead = 0);
std::unique_ptr<TinyAgent> make_random_agent(const TinyBAMDP& p);
// One Thompson draw per episode, then the optimal policy of M(theta_k).
std::unique_ptr<TinyAgent> make_psrl_agent(const TinyBAMDP& p);
// N-particle bootstrap filter (static theta), exact planning on the particle
// marginal with `lookahead` steps. Falls back to the prior on AllZeroLikelihood.
std::unique_ptr<TinyAgent> make_particle_agent(const TinyBAMDP& p, std::size_t n_particles,
                                               std::size_t lookahead = 0);

struct RegretStats {
  std::size_t episodes = 0;
  double v_star = 0.0;
  double mean_return = 0.0;
  double mean = 0.0;  // mean of V* - G_k
  double sd = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double eps_f_max = 0.0;   // max over episodes and decision steps of L1(agent, exact)
  double eps_f_mean = 0.0;  // mean over episodes of the per-episode max
  double eps_p_max = 0.0;   // max (max_a Q - Q(chosen)) under the agent's own belief
  bool has_belief = false;

  bool ci_contains_zero() const { return ci_lo <= 0.0 && 0.0 <= ci_hi; }
};

// Each episode draws theta from the prior, starts the agent fresh and runs H
// steps. Regret_k = V*(b0, s0) - sum_t gamma^t r_t. 95% normal CI.
RegretStats bayes_regret(const TinyBAMDP& p, const AgentFactory& make_agent,
                         std::size_t n_episodes, std::uint64_t rng_seed,
                         Exec exec = Exec::serial);

struct PolicyEvaluation {
  double value = 0.0;  // exact expected return of the policy from (b0, s0)
  double eps_p = 0.0;  // max action-value gap over reachable nodes
};

// Exact evaluation of the exact-filter agent with the given lookahead.
PolicyEvaluation evaluate_lookahead_policy(const TinyBAMDP& p, std::size_t lookahead,
                                           std::size_t node_cap = kDefaultNodeCap);

struct ErrorBudget {
  double eps_f = 0.0;
  double eps_p = 0.0;
  double r_max = 1.0;
};

// eps_p / (1 - gamma) + 2 gamma r_max eps_f / (1 - gamma)^2; gamma in (0,1).
double error_bound(const ErrorBudget& budget, double gamma);
bool error_bound_check(const ErrorBudget& budget, double measured_gap, double gamma,
                       double slack = 0.0);

struct RegretCell {
  std::string instance;
  std::string agent;        // exact | random | psrl | particle | lookahead
  std::size_t n_particles = 0;  // 0 = exact filter
  std::size_t lookahead = 0;    // steps; equals H for full depth
  RegretStats stats;
  double delta0 = 0.0;
  std::string delta0_method;  // "exact" or "simulated"
  double eps_p = 0.0;
  double eps_f = 0.0;
  double bound = 0.0;
  bool bound_ok = true;
};

struct RegretSuiteConfig {
  std::vector<std::size_t> particle_counts{4, 16, 64};
  std::vector<std::size_t> lookaheads{1, 2, 0};  // 0 means H
  std::size_t episodes = 2000;
  std::uint64_t rng_seed = 0;
  double bound_slack = 1e-12;
  bool include_baselines = true;  // random and psrl rows
  Exec exec = Exec::serial;
};

std::vector<RegretCell> run_regret_suite(const std::vector<TinyBAMDP>& instances,
                                         const RegretSuiteConfig& cfg);

}  // namespace uamdp
