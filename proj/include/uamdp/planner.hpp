#pragma once

// Depth-bounded Monte Carlo tree search under a fixed latent parameter.
//
// The tree is open-loop: a node stands for an action prefix from the root and
// every simulation re-simulates the prefix from the root state. A leaf is
// scored by drawing `leaf_samples` H-step discounted returns (prefix, then the
// uniform-random rollout policy) and applying the blended mean/CVaR objective
// (plain mean when risk is off). Node values are means of leaf scores.
// The belief is not updated inside the tree.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uamdp/belief.hpp"
#include "uamdp/kernels.hpp"
#include "uamdp/risk.hpp"
#include "uamdp/rng.hpp"

namespace uamdp {

template <class State>
struct Step {
  State next;
  double reward = 0.0;
  bool terminal = false;
};

// Simulatable dynamics: step must be pure apart from the supplied RNG.
template <class M>
concept PlanningModel = requires(const M& m, const typename M::State& s, std::size_t a,
                                 const LatentParam& theta, Rng& rng) {
  typename M::State;
  { m.num_actions() } -> std::convertible_to<std::size_t>;
  { m.step(s, a, theta, rng) } -> std::same_as<Step<typename M::State>>;
  { m.observe(s) } -> std::convertible_to<std::vector<double>>;
};

struct PlannerConfig {
  std::size_t depth_limit = 3;      // L
  std::size_t horizon = 0;          // H for sampled returns; 0 means depth_limit
  std::size_t rollout_budget = 128; // UCT iterations per decision
  double exploration_const = 1.4142135623730951;
  double discount = 0.99;
  std::size_t leaf_samples = 16;
  std::size_t constraint_samples = 64;
  std::uint64_t rng_seed = 0;
  Exec exec = Exec::serial;

  std::size_t effective_horizon() const { return horizon == 0 ? depth_limit : horizon; }

  void validate() const {
    if (depth_limit < 1) throw std::invalid_argument("planner depth_limit must be >= 1");
    if (rollout_budget < 1) throw std::invalid_argument("planner rollout_budget must be >= 1");
    if (leaf_samples < 1) throw std::invalid_argument("planner leaf_samples must be >= 1");
    if (!(exploration_const > 0.0)) throw std::invalid_argument("planner exploration_const must be > 0");
    if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument("planner discount must lie in (0,1]");
    if (horizon != 0 && horizon < depth_limit)
      throw std::invalid_argument("planner horizon must be >= depth_limit");
  }
};

struct PlanDiagnostics {
  std::vector<double> root_values;     // mean leaf score per root action (NaN if unvisited)
  std::vector<double> root_value_se;   // standard error of that mean
  std::vector<std::size_t> visits;
  std::vector<double> root_mean_return;  // mean of pooled sampled returns under each root action
  std::vector<double> root_cvar;         // CVaR_alpha of the pooled returns
  std::vector<bool> excluded;            // removed by the chance constraint
  std::vector<double> constraint_violation;
  std::size_t iterations = 0;
  std::size_t tree_size = 0;
  bool risk_active = false;
};

struct PlanResult {
  std::size_t action = 0;
  PlanDiagnostics diagnostics;
};

class NoFeasibleAction : public std::runtime_error {
 public:
  NoFeasibleAction(std::size_t least_violating, PlanDiagnostics diag)
      : std::runtime_error("every root action violates the chance constraint"),
        least_violating_(least_violating),
        diagnostics_(std::move(diag)) {}
  std::size_t least_violating() const { return least_violating_; }
  const PlanDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::size_t least_violating_;
  PlanDiagnostics diagnostics_;
};

struct PlanNode {
  std::size_t visit_count = 0;
  double value_sum = 0.0;
  double value_sq_sum = 0.0;
  std::vector<int> children;         // indexed by action, -1 if not expanded
  std::vector<double> return_samples;  // returns drawn when this node was a leaf

  double mean_value() const { return value_sum / static_cast<double>(visit_count); }
};

inline nlohmann::json to_json(const PlanDiagnostics& d) {
  auto finite_or_null = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return a;
  };
  return {{"root_values", finite_or_null(d.root_values)},
          {"root_value_se", finite_or_null(d.root_value_se)},
          {"visits", d.visits},
          {"root_mean_return", finite_or_null(d.root_mean_return)},
          {"root_cvar", finite_or_null(d.root_cvar)},
          {"excluded", d.excluded},
          {"constraint_violation", d.constraint_violation},
          {"iterations", d.iterations},
          {"tree_size", d.tree_size},
          {"risk_active", d.risk_active}};
}

// Σ_{h<depth} γ^h r_h under the uniform-random policy; stops at a terminal step.
template <PlanningModel M>
double rollout_return(const M& model, typename M::State state, const LatentParam& theta,
                      std::size_t depth, double discount, Rng& rng) {
  const std::size_t n_actions = model.num_actions();
  std::uniform_int_distribution<std::size_t> pick(0, n_actions - 1);
  double total = 0.0;
  double scale = 1.0;
  for (std::size_t h = 0; h < depth; ++h) {
    auto st = model.step(state, pick(rng), theta, rng);
    total += scale * st.reward;
    if (st.terminal) break;
    scale *= discount;
    state = std::move(st.next);
  }
  return total;
}

template <PlanningModel M>
double rollout_return(const M& model, const typename M::State& state, const LatentParam& theta,
                      std::size_t depth, double discount, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return rollout_return(model, state, theta, depth, discount, rng);
}

// Executes `prefix` from `state`, then the rollout policy up to `horizon` steps in total.
template <PlanningModel M>
double open_loop_return(const M& model, typename M::State state, const LatentParam& theta,
                        const std::vector<std::size_t>& prefix, std::size_t horizon,
                        double discount, Rng& rng) {
  double total = 0.0;
  double scale = 1.0;
  std::size_t h = 0;
  for (; h < prefix.size() && h < horizon; ++h) {
    auto st = model.step(state, prefix[h], theta, rng);
    total += scale * st.reward;
    if (st.terminal) return total;
    scale *= discount;
    state = std::move(st.next);
  }
  return total + scale * rollout_return(model, std::move(state), theta, horizon - h, discount, rng);
}

struct QEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t n = 0;
};

// Monte Carlo estimate of taking `action` then following the rollout policy for
// the remaining H-1 steps, with dynamics fixed to theta. Uses cfg.rollout_budget rollouts.
template <PlanningModel M>
QEstimate q_estimate(const M& model, const typename M::State& root, std::size_t action,
                     const LatentParam& theta, const PlannerConfig& cfg) {
  cfg.validate();
  if (action >= model.num_actions()) throw std::out_of_range("q_estimate: action out of range");
  const std::size_t horizon = cfg.effective_horizon();
  const std::size_t n = cfg.rollout_budget;
  const std::vector<std::size_t> prefix{action};
  const auto returns = kernels::map_index<double>(n, cfg.exec, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.rng_seed, Stream::planner, i));
    return open_loop_return(model, root, theta, prefix, horizon, cfg.discount, rng);
  });
  QEstimate q;
  q.n = n;
  for (double r : returns) q.mean += r;
  q.mean /= static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double r : returns) ss += (r - q.mean) * (r - q.mean);
    q.standard_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  }
  return q;
}

namespace detail {

template <PlanningModel M>
ObservationPaths constraint_paths(const M& model, const typename M::State& root,
                                  const LatentParam& theta, std::size_t action,
                                  std::size_t horizon, std::size_t samples, std::uint64_t seed,
                                  Exec exec) {
  const std::size_t dim = model.observe(root).size();
  ObservationPaths paths(samples, horizon, dim);
  const std::size_t n_actions = model.num_actions();
  kernels::for_each_index(samples, exec, [&](std::size_t s) {
    Rng rng(derive_seed(seed, s));
    std::uniform_int_distribution<std::size_t> pick(0, n_actions - 1);
    auto state = root;
    bool done = false;
    std::vector<double> last = model.observe(root);
    for (std::size_t h = 0; h < horizon; ++h) {
      if (!done) {
        auto st = model.step(state, h == 0 ? action : pick(rng), theta, rng);
        state = std::move(st.next);
        last = model.observe(state);
        done = st.terminal;
      }
      auto slot = paths.at(s, h);
      std::copy(last.begin(), last.end(), slot.begin());
    }
  });
  return paths;
}

}  // namespace detail

template <PlanningModel M>
PlanResult plan(const typename M::State& root, const LatentParam& theta, const M& model,
                const PlannerConfig& cfg, const std::optional<RiskConfig>& risk) {
  cfg.validate();
  if (risk) risk->validate();
  const std::size_t n_actions = model.num_actions();
  if (n_actions == 0) throw std::invalid_argument("plan: empty action set");
  const std::size_t horizon = cfg.effective_horizon();
  const std::size_t depth = std::min(cfg.depth_limit, horizon);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  PlanDiagnostics diag;
  diag.risk_active = risk.has_value();
  diag.excluded.assign(n_actions, false);
  diag.constraint_violation.assign(n_actions, 0.0);

  if (risk && risk->safe_set) {
    for (std::size_t a = 0; a < n_actions; ++a) {
      const auto paths = detail::constraint_paths(
          model, root, theta, a, horizon, cfg.constraint_samples,
          derive_seed(cfg.rng_seed, {0xC0u, a}), cfg.exec);
      const auto frac = safe_fraction(paths, *risk->safe_set);
      const auto ok = chance_constraint_ok(paths, *risk);
      for (std::size_t h = 0; h < ok.size(); ++h) {
        if (!ok[h]) diag.excluded[a] = true;
        diag.constraint_violation[a] += std::max(0.0, (1.0 - risk->delta) - frac[h]);
      }
    }
  }

  std::vector<PlanNode> tree(1);
  tree[0].children.assign(n_actions, -1);
  std::vector<std::vector<double>> root_pool(n_actions);

  const bool any_feasible =
      std::find(diag.excluded.begin(), diag.excluded.end(), false) != diag.excluded.end();

  if (any_feasible) {
    std::vector<std::size_t> prefix;
    std::vector<std::size_t> path;
    for (std::size_t iter = 0; iter < cfg.rollout_budget; ++iter) {
      const std::uint64_t iter_seed = derive_seed(cfg.rng_seed, Stream::planner, iter);
      prefix.clear();
      path.assign(1, 0);
      std::size_t node = 0;
      while (prefix.size() < depth) {
        const bool at_root = node == 0;
        std::size_t chosen = n_actions;
        bool expanded = false;
        for (std::size_t a = 0; a < n_actions; ++a) {
          if (at_root && diag.excluded[a]) continue;
          if (tree[node].children[a] < 0) {
            chosen = a;
            expanded = true;
            break;
          }
        }
        if (!expanded) {
          const double log_parent = std::log(static_cast<double>(tree[node].visit_count));
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t a = 0; a < n_actions; ++a) {
            if (at_root && diag.excluded[a]) continue;
            const PlanNode& c = tree[static_cast<std::size_t>(tree[node].children[a])];
            const double score =
                c.mean_value() +
                cfg.exploration_const * std::sqrt(log_parent / static_cast<double>(c.visit_count));
            if (score > best) {
              best = score;
              chosen = a;
            }
          }
        }
        if (expanded) {
          tree[node].children[chosen] = static_cast<int>(tree.size());
          tree.emplace_back();
          tree.back().children.assign(n_actions, -1);
        }
        node = static_cast<std::size_t>(tree[node].children[chosen]);
        prefix.push_back(chosen);
        path.push_back(node);
        if (expanded) break;
      }

      const auto returns = kernels::map_index<double>(cfg.leaf_samples, cfg.exec, [&](std::size_t j) {
        Rng rng(derive_seed(iter_seed, j));
        return open_loop_return(model, root, theta, prefix, horizon, cfg.discount, rng);
      });
      double score;
      if (risk) {
        score = blended_objective(returns, *risk);
      } else {
        score = std::accumulate(returns.begin(), returns.end(), 0.0) /
                static_cast<double>(returns.size());
      }
      auto& leaf = tree[path.back()];
      leaf.return_samples.insert(leaf.return_samples.end(), returns.begin(), returns.end());
      auto& pool = root_pool[prefix.front()];
      pool.insert(pool.end(), returns.begin(), returns.end());
      for (std::size_t n : path) {
        tree[n].visit_count += 1;
        tree[n].value_sum += score;
        tree[n].value_sq_sum += score * score;
      }
      ++diag.iterations;
    }
  }

  diag.tree_size = tree.size();
  diag.root_values.assign(n_actions, nan);
  diag.root_value_se.assign(n_actions, nan);
  diag.visits.assign(n_actions, 0);
  diag.root_mean_return.assign(n_actions, nan);
  diag.root_cvar.assign(n_actions, nan);
  const double report_alpha = risk ? risk->alpha : 0.05;
  for (std::size_t a = 0; a < n_actions; ++a) {
    const int c = tree[0].children[a];
    if (c < 0) continue;
    const PlanNode& ch = tree[static_cast<std::size_t>(c)];
    const double n = static_cast<double>(ch.visit_count);
    diag.visits[a] = ch.visit_count;
    diag.root_values[a] = ch.mean_value();
    if (ch.visit_count > 1) {
      const double var = std::max(0.0, (ch.value_sq_sum - n * diag.root_values[a] * diag.root_values[a]) / (n - 1.0));
      diag.root_value_se[a] = std::sqrt(var / n);
    } else {
      diag.root_value_se[a] = 0.0;
    }
    const auto& pool = root_pool[a];
    diag.root_mean_return[a] =
        std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(pool.size());
    diag.root_cvar[a] = cvar(pool, report_alpha);
  }

  if (!any_feasible) {
    std::size_t least = 0;
    for (std::size_t a = 1; a < n_actions; ++a)
      if (diag.constraint_violation[a] < diag.constraint_violation[least]) least = a;
    throw NoFeasibleAction(least, std::move(diag));
  }

  std::size_t best = n_actions;
  for (std::size_t a = 0; a < n_actions; ++a) {
    if (diag.excluded[a] || diag.visits[a] == 0) continue;
    if (best == n_actions || diag.root_values[a] > diag.root_values[best]) best = a;
  }
  return PlanResult{best, std::move(diag)};
}

}  // namespace uamdp
