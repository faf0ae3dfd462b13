#include "uamdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uamdp/rng.hpp"
#include "uamdp/stats.hpp"

namespace uamdp {

MdpSolution exact_mdp_optimal(const TinyBAMDP& p, std::size_t theta) {
  if (theta >= p.thetas.size()) throw std::out_of_range("exact_mdp_optimal: theta index");
  const std::size_t H = p.horizon;
  MdpSolution sol;
  sol.value.assign(H + 1, std::vector<double>(p.n_states, 0.0));
  sol.policy.assign(H, std::vector<std::size_t>(p.n_states, 0));
  std::vector<double> q(p.n_actions);
  for (std::size_t t = H; t-- > 0;) {
    for (std::size_t s = 0; s < p.n_states; ++s) {
      for (std::size_t a = 0; a < p.n_actions; ++a) {
        double cont = 0.0;
        for (std::size_t s2 = 0; s2 < p.n_states; ++s2) cont += p.p(theta, s, a, s2) * sol.value[t + 1][s2];
        q[a] = p.r(s, a) + p.discount * cont;
      }
      const std::size_t best = argmax_lowest(q);
      sol.policy[t][s] = best;
      sol.value[t][s] = q[best];
    }
  }
  return sol;
}

std::size_t argmax_lowest(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

bool posterior_step(const TinyBAMDP& p, std::span<const double> b, std::size_t s, std::size_t a,
                    std::size_t s_next, std::vector<double>& out) {
  double total = 0.0;
  std::vector<double> w(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) {
    w[k] = b[k] * p.p(k, s, a, s_next);
    total += w[k];
  }
  if (!(total > 0.0)) return false;
  for (double& x : w) x /= total;
  out = std::move(w);
  return true;
}

std::vector<double> BayesSolver::q_values(std::span<const double> b, std::size_t s, std::size_t depth) {
  const TinyBAMDP& p = *p_;
  if (++nodes_ > node_cap_) throw BudgetExceeded(node_cap_);
  std::vector<double> q(p.n_actions, 0.0);
  if (depth == 0) return q;
  std::vector<double> nb;
  for (std::size_t a = 0; a < p.n_actions; ++a) {
    double val = p.r(s, a);
    if (depth > 1) {
      for (std::size_t s2 = 0; s2 < p.n_states; ++s2) {
        double pred = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) pred += b[k] * p.p(k, s, a, s2);
        if (!(pred > 0.0)) continue;
        posterior_step(p, b, s, a, s2, nb);
        val += p.discount * pred * value(nb, s2, depth - 1);
      }
    }
    q[a] = val;
  }
  return q;
}

double BayesSolver::value(std::span<const double> b, std::size_t s, std::size_t depth) {
  if (depth == 0) return 0.0;
  const auto q = q_values(b, s, depth);
  return *std::max_element(q.begin(), q.end());
}

ExactBayesValue exact_bayes_value(const TinyBAMDP& p, std::size_t node_cap) {
  p.validate();
  BayesSolver solver(p, node_cap);
  ExactBayesValue out;
  out.value = solver.value(p.prior, p.s0, p.horizon);
  out.nodes = solver.nodes();
  return out;
}

namespace {

std::size_t remaining_depth(const TinyBAMDP& p, std::size_t lookahead, std::size_t t) {
  const std::size_t left = p.horizon - t;
  return lookahead == 0 ? left : std::min(lookahead, left);
}

class ExactBayesAgent final : public TinyAgent {
 public:
  ExactBayesAgent(const TinyBAMDP& p, std::size_t lookahead) : p_(&p), lookahead_(lookahead) {}
  std::string name() const override { return "exact"; }
  void begin_episode(std::uint64_t) override { b_ = p_->prior; }
  std::size_t act(std::size_t s, std::size_t t) override {
    BayesSolver solver(*p_);
    return argmax_lowest(solver.q_values(b_, s, remaining_depth(*p_, lookahead_, t)));
  }
  void observe(std::size_t s, std::size_t a, std::size_t s_next) override {
    if (!posterior_step(*p_, b_, s, a, s_next, b_)) b_ = p_->prior;
  }
  std::optional<std::vector<double>> belief() const override { return b_; }

 private:
  const TinyBAMDP* p_;
  std::size_t lookahead_;
  std::vector<double> b_;
};

class RandomAgent final : public TinyAgent {
 public:
  explicit RandomAgent(const TinyBAMDP& p) : p_(&p) {}
  std::string name() const override { return "random"; }
  void begin_episode(std::uint64_t seed) override { rng_.seed(seed); }
  std::size_t act(std::size_t, std::size_t) override {
    return std::uniform_int_distribution<std::size_t>(0, p_->n_actions - 1)(rng_);
  }
  void observe(std::size_t, std::size_t, std::size_t) override {}

 private:
  const TinyBAMDP* p_;
  Rng rng_;
};

class PsrlAgent final : public TinyAgent {
 public:
  explicit PsrlAgent(const TinyBAMDP& p) : p_(&p) {
    for (std::size_t k = 0; k < p.thetas.size(); ++k) solutions_.push_back(exact_mdp_optimal(p, k));
  }
  std::string name() const override { return "psrl"; }
  void begin_episode(std::uint64_t seed) override {
    b_ = p_->prior;
    const LatentParam draw = thompson_sample(Belief(p_->thetas, b_), derive_seed(seed, Stream::thompson));
    theta_ = p_->theta_index(draw.id);
  }
  std::size_t act(std::size_t s, std::size_t t) override { return solutions_[theta_].policy[t][s]; }
  void observe(std::size_t s, std::size_t a, std::size_t s_next) override {
    if (!posterior_step(*p_, b_, s, a, s_next, b_)) b_ = p_->prior;
  }

 private:
  const TinyBAMDP* p_;
  std::vector<MdpSolution> solutions_;
  std::vector<double> b_;
  std::size_t theta_ = 0;
};

class ParticleAgent final : public TinyAgent {
 public:
  ParticleAgent(const TinyBAMDP& p, std::size_t n, std::size_t lookahead)
      : p_(&p), lookahead_(lookahead), n_(n) {}
  std::string name() const override { return "particle"; }
  void begin_episode(std::uint64_t seed) override {
    ParticleFilterConfig cfg;
    cfg.n_particles = n_;
    cfg.rng_seed = derive_seed(seed, Stream::particles);
    filter_.emplace(p_->prior_belief(), cfg);
  }
  std::size_t act(std::size_t s, std::size_t t) override {
    BayesSolver solver(*p_);
    return argmax_lowest(solver.q_values(marginal(), s, remaining_depth(*p_, lookahead_, t)));
  }
  void observe(std::size_t s, std::size_t a, std::size_t s_next) override {
    const auto& parts = filter_->particles();
    std::vector<double> log_l(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const double v = p_->p(p_->theta_index(parts.hypothesis(i).id), s, a, s_next);
      log_l[i] = v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    }
    try {
      filter_->update_log(log_l);
    } catch (const AllZeroLikelihood&) {
      filter_->reset(p_->prior_belief());
    }
  }
  std::optional<std::vector<double>> belief() const override { return marginal(); }

 private:
  std::vector<double> marginal() const {
    std::vector<double> m(p_->thetas.size(), 0.0);
    const auto& parts = filter_->particles();
    for (std::size_t i = 0; i < parts.size(); ++i) m[p_->theta_index(parts.hypothesis(i).id)] += parts.weight(i);
    return m;
  }

  const TinyBAMDP* p_;
  std::size_t lookahead_;
  std::size_t n_;
  std::optional<ParticleFilter> filter_;
};

double l1(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

struct EpisodeOutcome {
  double ret = 0.0;
  double eps_f = 0.0;
  double eps_p = 0.0;
  bool has_belief = false;
};

EpisodeOutcome run_episode(const TinyBAMDP& p, TinyAgent& agent, std::uint64_t episode_seed) {
  Rng theta_rng(derive_seed(episode_seed, Stream::thompson));
  Rng env_rng(derive_seed(episode_seed, Stream::environment));
  std::size_t theta = 0;
  {
    const double u = uniform01(theta_rng);
    double acc = 0.0;
    theta = p.thetas.size() - 1;
    for (std::size_t k = 0; k < p.prior.size(); ++k) {
      acc += p.prior[k];
      if (u < acc) {
        theta = k;
        break;
      }
    }
  }
  agent.begin_episode(derive_seed(episode_seed, Stream::agent));
  std::vector<double> exact = p.prior;
  EpisodeOutcome out;
  std::size_t s = p.s0;
  double scale = 1.0;
  for (std::size_t t = 0; t < p.horizon; ++t) {
    const auto agent_b = agent.belief();
    const std::size_t a = agent.act(s, t);
    if (agent_b) {
      out.has_belief = true;
      out.eps_f = std::max(out.eps_f, l1(*agent_b, exact));
      BayesSolver solver(p);
      const auto q = solver.q_values(*agent_b, s, p.horizon - t);
      out.eps_p = std::max(out.eps_p, *std::max_element(q.begin(), q.end()) - q[a]);
    }
    const std::size_t s_next = sample_next_state(p, theta, s, a, uniform01(env_rng));
    out.ret += scale * p.r(s, a);
    scale *= p.discount;
    agent.observe(s, a, s_next);
    posterior_step(p, exact, s, a, s_next, exact);
    s = s_next;
  }
  return out;
}

}  // namespace

std::unique_ptr<TinyAgent> make_exact_bayes_agent(const TinyBAMDP& p, std::size_t lookahead) {
  return std::make_unique<ExactBayesAgent>(p, lookahead);
}
std::unique_ptr<TinyAgent> make_random_agent(const TinyBAMDP& p) { return std::make_unique<RandomAgent>(p); }
std::unique_ptr<TinyAgent> make_psrl_agent(const TinyBAMDP& p) { return std::make_unique<PsrlAgent>(p); }
std::unique_ptr<TinyAgent> make_particle_agent(const TinyBAMDP& p, std::size_t n_particles,
                                               std::size_t lookahead) {
  if (n_particles == 0) throw std::invalid_argument("particle agent needs n_particles >= 1");
  return std::make_unique<ParticleAgent>(p, n_particles, lookahead);
}

RegretStats bayes_regret(const TinyBAMDP& p, const AgentFactory& make_agent, std::size_t n_episodes,
                         std::uint64_t rng_seed, Exec exec) {
  RegretStats st;
  st.episodes = n_episodes;
  st.v_star = exact_bayes_value(p).value;
  if (n_episodes == 0) return st;
  const auto outcomes = kernels::map_index<EpisodeOutcome>(n_episodes, exec, [&](std::size_t k) {
    auto agent = make_agent();
    return run_episode(p, *agent, derive_seed(rng_seed, Stream::episode, k));
  });
  st.has_belief = outcomes.front().has_belief;
  std::vector<double> regret(n_episodes);
  double eps_f_sum = 0.0;
  for (std::size_t k = 0; k < n_episodes; ++k) {
    regret[k] = st.v_star - outcomes[k].ret;
    st.mean_return += outcomes[k].ret;
    st.eps_f_max = std::max(st.eps_f_max, outcomes[k].eps_f);
    st.eps_p_max = std::max(st.eps_p_max, outcomes[k].eps_p);
    eps_f_sum += outcomes[k].eps_f;
  }
  st.mean_return /= static_cast<double>(n_episodes);
  st.eps_f_mean = eps_f_sum / static_cast<double>(n_episodes);
  const Summary sum = summarize(regret);
  st.mean = sum.mean;
  st.sd = sum.sd;
  st.ci_lo = sum.ci_lo;
  st.ci_hi = sum.ci_hi;
  return st;
}

PolicyEvaluation evaluate_lookahead_policy(const TinyBAMDP& p, std::size_t lookahead,
                                           std::size_t node_cap) {
  p.validate();
  PolicyEvaluation out;
  BayesSolver solver(p, node_cap);
  std::function<double(const std::vector<double>&, std::size_t, std::size_t)> rec =
      [&](const std::vector<double>& b, std::size_t s, std::size_t t) -> double {
    if (t >= p.horizon) return 0.0;
    const auto q_agent = solver.q_values(b, s, remaining_depth(p, lookahead, t));
    const std::size_t a = argmax_lowest(q_agent);
    const auto q_full = solver.q_values(b, s, p.horizon - t);
    out.eps_p = std::max(out.eps_p, *std::max_element(q_full.begin(), q_full.end()) - q_full[a]);
    double val = p.r(s, a);
    std::vector<double> nb;
    for (std::size_t s2 = 0; s2 < p.n_states; ++s2) {
      double pred = 0.0;
      for (std::size_t k = 0; k < b.size(); ++k) pred += b[k] * p.p(k, s, a, s2);
      if (!(pred > 0.0)) continue;
      posterior_step(p, b, s, a, s2, nb);
      val += p.discount * pred * rec(nb, s2, t + 1);
    }
    return val;
  };
  out.value = rec(p.prior, p.s0, 0);
  return out;
}

double error_bound(const ErrorBudget& budget, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("error bound needs gamma in (0,1)");
  if (budget.eps_f < 0.0 || budget.eps_p < 0.0 || budget.r_max < 0.0)
    throw std::invalid_argument("error budget entries must be non-negative");
  const double g = 1.0 - gamma;
  return budget.eps_p / g + 2.0 * gamma * budget.r_max * budget.eps_f / (g * g);
}

bool error_bound_check(const ErrorBudget& budget, double measured_gap, double gamma, double slack) {
  return measured_gap <= error_bound(budget, gamma) + slack;
}

std::vector<RegretCell> run_regret_suite(const std::vector<TinyBAMDP>& instances,
                                         const RegretSuiteConfig& cfg) {
  std::vector<RegretCell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const TinyBAMDP& p = instances[i];
    const std::uint64_t seed = derive_seed(cfg.rng_seed, {0x5u, i});
    const double v_star = exact_bayes_value(p).value;
    const double gamma = p.discount;

    auto finish = [&](RegretCell c) {
      c.instance = p.name;
      if (gamma < 1.0) {
        ErrorBudget budget{c.eps_f, c.eps_p, p.r_max()};
        c.bound = error_bound(budget, gamma);
        c.bound_ok = error_bound_check(budget, c.delta0, gamma, cfg.bound_slack);
      }
      cells.push_back(std::move(c));
    };

    {
      RegretCell c;
      c.agent = "exact";
      c.lookahead = p.horizon;
      c.stats = bayes_regret(p, [&] { return make_exact_bayes_agent(p); }, cfg.episodes, seed, cfg.exec);
      const auto ev = evaluate_lookahead_policy(p, 0);
      c.delta0 = v_star - ev.value;
      c.delta0_method = "exact";
      c.eps_p = ev.eps_p;
      finish(std::move(c));
    }
    if (cfg.include_baselines) {
      RegretCell r;
      r.agent = "random";
      r.lookahead = 0;
      r.stats = bayes_regret(p, [&] { return make_random_agent(p); }, cfg.episodes, seed, cfg.exec);
      r.delta0 = r.stats.mean;
      r.delta0_method = "simulated";
      r.bound_ok = true;
      r.instance = p.name;
      cells.push_back(std::move(r));
      RegretCell s;
      s.agent = "psrl";
      s.lookahead = p.horizon;
      s.stats = bayes_regret(p, [&] { return make_psrl_agent(p); }, cfg.episodes, seed, cfg.exec);
      s.delta0 = s.stats.mean;
      s.delta0_method = "simulated";
      s.instance = p.name;
      cells.push_back(std::move(s));
    }
    for (std::size_t n : cfg.particle_counts) {
      RegretCell c;
      c.agent = "particle";
      c.n_particles = n;
      c.lookahead = p.horizon;
      c.stats = bayes_regret(p, [&] { return make_particle_agent(p, n); }, cfg.episodes, seed, cfg.exec);
      c.delta0 = c.stats.mean;
      c.delta0_method = "simulated";
      c.eps_p = c.stats.eps_p_max;
      c.eps_f = c.stats.eps_f_max;
      finish(std::move(c));
    }
    for (std::size_t l : cfg.lookaheads) {
      const std::size_t depth = l == 0 ? p.horizon : std::min(l, p.horizon);
      RegretCell c;
      c.agent = "lookahead";
      c.lookahead = depth;
      c.stats = bayes_regret(p, [&] { return make_exact_bayes_agent(p, depth); }, cfg.episodes, seed, cfg.exec);
      const auto ev = evaluate_lookahead_policy(p, depth);
      c.delta0 = v_star - ev.value;
      c.delta0_method = "exact";
      c.eps_p = ev.eps_p;
      finish(std::move(c));
    }
  }
  return cells;
}

}  // namespace uamdp
