#include "uamdp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>

#include "uamdp/belief.hpp"
#include "uamdp/finite_mdp.hpp"
#include "uamdp/forecaster.hpp"
#include "uamdp/gp.hpp"
#include "uamdp/inventory.hpp"
#include "uamdp/planner.hpp"
#include "uamdp/risk.hpp"
#include "uamdp/trading.hpp"

namespace uamdp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string model_name(const RunConfig& cfg) {
  std::string name = "uamdp";
  for (const auto& a : cfg.ablations)
    if (a != "none") name += "/" + a;
  return name;
}

std::optional<RiskConfig> risk_of(const RunConfig& cfg) {
  if (!cfg.risk_enabled) return std::nullopt;
  RiskConfig r;
  r.alpha = cfg.alpha;
  r.eta = cfg.has("no-cvar") ? 0.0 : cfg.eta;
  r.delta = cfg.delta;
  if (!cfg.safe_lower.empty()) r.safe_set = SafeBox{cfg.safe_lower, cfg.safe_upper};
  return r;
}

// Mixture moments of per-hypothesis Gaussian predictives.
void mixture_moments(const std::vector<PredictiveDist>& preds, const std::vector<double>& w,
                     std::vector<double>& mean, std::vector<double>& var) {
  const std::size_t d = preds.front().dim();
  mean.assign(d, 0.0);
  var.assign(d, 0.0);
  for (std::size_t k = 0; k < preds.size(); ++k)
    for (std::size_t j = 0; j < d; ++j) {
      mean[j] += w[k] * preds[k].means()[j];
      var[j] += w[k] * (preds[k].variances()[j] + preds[k].means()[j] * preds[k].means()[j]);
    }
  for (std::size_t j = 0; j < d; ++j) var[j] = std::max(var[j] - mean[j] * mean[j], kVarianceFloor);
}

// GP over z = (last index return, last bond return, one-hot regime), trained on
// a fixed synthetic table drawn from each regime.
std::shared_ptr<Forecaster> make_trading_gp(const RegimeModel& market, Exec exec) {
  constexpr std::size_t kRowsPerRegime = 60;
  const std::size_t k = market.regimes.size();
  Rng rng(derive_seed(0, Stream::forecaster_train));
  std::normal_distribution<double> z(0.0, 1.0);
  GPModel m;
  m.inputs.resize(static_cast<Eigen::Index>(k * kRowsPerRegime), static_cast<Eigen::Index>(2 + k));
  m.targets.resize(static_cast<Eigen::Index>(k * kRowsPerRegime), 2);
  m.inputs.setZero();
  double noise_i = 0.0, noise_b = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const auto& p = market.regimes[r].params;
    noise_i += p[1] * p[1] / static_cast<double>(k);
    noise_b += p[3] * p[3] / static_cast<double>(k);
    for (std::size_t i = 0; i < kRowsPerRegime; ++i) {
      const auto row = static_cast<Eigen::Index>(r * kRowsPerRegime + i);
      m.inputs(row, 0) = p[0] + p[1] * z(rng);
      m.inputs(row, 1) = p[2] + p[3] * z(rng);
      m.inputs(row, static_cast<Eigen::Index>(2 + r)) = 1.0;
      m.targets(row, 0) = p[0] + p[1] * z(rng);
      m.targets(row, 1) = p[2] + p[3] * z(rng);
    }
  }
  m.kernel.length_scales = {0.05, 0.01};
  m.kernel.length_scales.resize(2 + k, 1.0);
  m.kernel.signal_variance = 1e-5;
  m.noise_variance = {noise_i, noise_b};
  m.mean = {m.targets.col(0).mean(), m.targets.col(1).mean()};
  return std::make_shared<GpForecaster>(GaussianProcess(std::move(m), exec), market.regimes);
}

// Environment adapters used by the control loop. Each one owns the real
// trajectory and exposes the planning model for the tree search.

class TradingEnv {
 public:
  using Model = TradingModel;

  TradingEnv(const RunConfig& cfg, std::uint64_t seed)
      : market_model_(two_regime_market(cfg.switch_prob)),
        model_(allocation_grid(cfg.alloc_step)),
        path_(generate_market(market_model_, cfg.T + 1, derive_seed(seed, Stream::market))) {
    state_.value = cfg.initial_value;
    state_.cost_rate = cfg.cost_rate;
    switch (cfg.forecaster) {
      case ForecasterKind::conjugate:
        forecaster_ = std::make_shared<ParametricGaussianForecaster>(std::vector<std::size_t>{0, 2},
                                                                     std::vector<std::size_t>{1, 3});
        break;
      case ForecasterKind::gp:
        forecaster_ = make_trading_gp(market_model_, cfg.exec);
        break;
      case ForecasterKind::persistence:
        forecaster_ = std::make_shared<PersistenceForecaster>(20);
        break;
    }
    history_.push_back({0.0, 0.0});
  }

  std::string name() const { return "trading"; }
  const std::vector<LatentParam>& support() const { return market_model_.regimes; }
  Belief prior() const { return Belief::uniform(market_model_.regimes); }
  std::map<std::string, double> meta() const {
    return {{"initial_value", state_.value}, {"cost_rate", state_.cost_rate}};
  }
  double switch_prob() const { return market_model_.switch_prob; }
  std::vector<double> noise_scale() const {
    double si = 0.0, sb = 0.0;
    for (const auto& r : market_model_.regimes) {
      si += r.params[1];
      sb += r.params[3];
    }
    const double k = static_cast<double>(market_model_.regimes.size());
    return {si / k, sb / k};
  }
  std::size_t episode_length(const RunConfig& cfg) const { return cfg.H; }
  void configure(PlannerConfig& pc, const RunConfig& cfg) const {
    pc.depth_limit = cfg.depth_limit;
    pc.horizon = cfg.H;
  }
  void begin_episode() {}
  const Model& model() const { return model_; }
  const TradingState& state() const { return state_; }
  std::string label(std::size_t a) const { return allocation_label(model_.action(a)); }

  std::vector<PredictiveDist> predictives() const {
    const std::size_t w = std::min<std::size_t>(history_.size(), 60);
    const std::span<const Observation> hist(history_.data() + history_.size() - w, w);
    ForecastInput in{hist, history_.back(), 0};
    std::vector<PredictiveDist> out;
    for (const auto& th : market_model_.regimes) out.push_back(forecaster_->predict(in, th));
    return out;
  }

  Observation execute(std::size_t a, StepRecord& rec) {
    pending_ = predictives();
    const auto& r = path_.log_returns.at(n_);
    auto res = trading_step(state_, model_.action(a), r);
    state_ = res.next;
    ++n_;
    rec.reward = res.reward;
    rec.value = state_.value;
    rec.turnover = res.turnover;
    return {r[0], r[1]};
  }

  // Log-likelihood of x per support entry, then x joins the agent's history.
  std::vector<double> absorb(const Observation& x) {
    std::vector<double> ll;
    for (const auto& p : pending_) ll.push_back(log_likelihood(p, x));
    history_.push_back(x);
    return ll;
  }

 private:
  RegimeModel market_model_;
  TradingModel model_;
  MarketPath path_;
  TradingState state_;
  std::shared_ptr<Forecaster> forecaster_;
  std::vector<Observation> history_;
  std::vector<PredictiveDist> pending_;
  std::size_t n_ = 0;
};

class InventoryEnv {
 public:
  using Model = InventoryModel;

  InventoryEnv(const RunConfig& cfg, std::uint64_t seed)
      : demand_model_(two_regime_demand(cfg.switch_prob)),
        dcfg_{cfg.price, 0.2, cfg.promo_prob, 365.0},
        model_(order_grid(cfg.order_step, cfg.qmax), dcfg_),
        path_(generate_demand(demand_model_, cfg.T, derive_seed(seed, Stream::market), dcfg_)) {
    state_.price = cfg.price;
    state_.unit_cost = cfg.unit_cost;
    state_.holding_cost = cfg.holding_cost;
    state_.stockout_penalty = cfg.stockout_penalty;
  }

  std::string name() const { return "inventory"; }
  const std::vector<LatentParam>& support() const { return demand_model_.regimes; }
  Belief prior() const { return Belief::uniform(demand_model_.regimes); }
  std::map<std::string, double> meta() const {
    return {{"price", dcfg_.base_price}, {"unit_cost", state_.unit_cost}};
  }
  double switch_prob() const { return demand_model_.switch_prob; }
  std::vector<double> noise_scale() const {
    double s = 0.0;
    for (const auto& r : demand_model_.regimes) s += std::sqrt(r.params[0]);
    return {s / static_cast<double>(demand_model_.regimes.size())};
  }
  std::size_t episode_length(const RunConfig& cfg) const { return cfg.H; }
  void configure(PlannerConfig& pc, const RunConfig& cfg) const {
    pc.depth_limit = cfg.depth_limit;
    pc.horizon = cfg.H;
  }
  void begin_episode() {}
  const Model& model() const { return model_; }
  const InventoryState& state() {
    state_.price = path_.price.at(n_);
    return state_;
  }
  std::string label(std::size_t a) const { return "order " + std::to_string(model_.order(a)); }

  std::vector<PredictiveDist> predictives() const {
    std::vector<PredictiveDist> out;
    for (const auto& th : demand_model_.regimes) {
      const double lambda = rate(th);
      out.push_back(PredictiveDist::gaussian({lambda}, {std::max(lambda, kVarianceFloor)}));
    }
    return out;
  }

  Observation execute(std::size_t a, StepRecord& rec) {
    lambdas_.clear();
    for (const auto& th : demand_model_.regimes) lambdas_.push_back(rate(th));
    state_.price = path_.price.at(n_);
    const long d = path_.demand.at(n_);
    auto res = inventory_step(state_, model_.order(a), d);
    state_ = res.next;
    ++n_;
    rec.reward = res.reward;
    rec.value = static_cast<double>(state_.on_hand);
    rec.demand = static_cast<double>(d);
    rec.filled = static_cast<double>(res.sold);
    return {static_cast<double>(d)};
  }

  std::vector<double> absorb(const Observation& x) const {
    const double d = std::max(0.0, std::round(x.at(0)));
    std::vector<double> ll;
    for (double lambda : lambdas_) {
      if (lambda <= 0.0) {
        ll.push_back(d == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
      } else {
        ll.push_back(d * std::log(lambda) - lambda - std::lgamma(d + 1.0));
      }
    }
    return ll;
  }

 private:
  double rate(const LatentParam& th) const {
    return demand_rate(th, n_, path_.promo.at(n_) != 0, dcfg_);
  }

  RegimeModel demand_model_;
  DemandConfig dcfg_;
  InventoryModel model_;
  DemandPath path_;
  InventoryState state_;
  std::vector<double> lambdas_;
  std::size_t n_ = 0;
};

class TinyEnv {
 public:
  using Model = FiniteMdpModel;

  TinyEnv(const RunConfig& cfg, std::uint64_t seed)
      : problem_(load_tiny_bamdp(resolve_resource(cfg.instance))),
        model_(problem_),
        rng_(derive_seed(seed, Stream::environment)) {
    const double u = uniform01(rng_);
    double acc = 0.0;
    theta_star_ = problem_.thetas.size() - 1;
    for (std::size_t k = 0; k < problem_.thetas.size(); ++k) {
      acc += problem_.prior[k];
      if (u < acc) {
        theta_star_ = k;
        break;
      }
    }
  }

  std::string name() const { return "tiny-bamdp"; }
  const std::vector<LatentParam>& support() const { return problem_.thetas; }
  Belief prior() const { return problem_.prior_belief(); }
  std::map<std::string, double> meta() const {
    return {{"theta_star", static_cast<double>(theta_star_)}, {"horizon", static_cast<double>(problem_.horizon)}};
  }
  double switch_prob() const { return 0.0; }
  std::vector<double> noise_scale() const { return {}; }
  std::size_t episode_length(const RunConfig&) const { return problem_.horizon; }
  void configure(PlannerConfig& pc, const RunConfig& cfg) const {
    pc.depth_limit = std::min(cfg.depth_limit, problem_.horizon);
    pc.horizon = problem_.horizon;
  }
  void begin_episode() { state_ = {problem_.s0, 0}; }
  const Model& model() const { return model_; }
  const FiniteMdpModel::State& state() const { return state_; }
  std::string label(std::size_t a) const { return "a" + std::to_string(a); }
  std::vector<PredictiveDist> predictives() const { return {}; }

  Observation execute(std::size_t a, StepRecord& rec) {
    prev_s_ = state_.s;
    prev_a_ = a;
    rec.reward = problem_.r(state_.s, a);
    state_.s = sample_next_state(problem_, theta_star_, state_.s, a, uniform01(rng_));
    state_.t += 1;
    rec.value = static_cast<double>(state_.s);
    return {static_cast<double>(state_.s)};
  }

  std::vector<double> absorb(const Observation& x) const {
    const auto s2 = static_cast<std::size_t>(x.at(0));
    std::vector<double> ll;
    for (std::size_t k = 0; k < problem_.thetas.size(); ++k)
      ll.push_back(std::log(problem_.p(k, prev_s_, prev_a_, s2)));
    return ll;
  }

 private:
  TinyBAMDP problem_;
  FiniteMdpModel model_;
  Rng rng_;
  std::size_t theta_star_ = 0;
  FiniteMdpModel::State state_;
  std::size_t prev_s_ = 0;
  std::size_t prev_a_ = 0;
};

std::vector<double> id_marginal(const Belief& b, const std::vector<LatentParam>& support) {
  std::vector<double> w;
  for (const auto& h : support) w.push_back(mass_of(b, h.id));
  return w;
}

template <class Env>
RunResult run_loop(const RunConfig& cfg, std::uint64_t seed, Env& env) {
  RunResult res;
  const auto& support = env.support();
  res.log.env = env.name();
  res.log.model = model_name(cfg);
  res.log.seed = seed;
  for (const auto& h : support) res.log.support.push_back(h.id);
  res.log.meta = env.meta();

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < support.size(); ++i) position[support[i].id] = i;

  const bool use_particles = cfg.belief == BeliefKind::particle;
  const bool frozen = cfg.has("no-belief");
  Belief exact = env.prior();
  std::optional<ParticleFilter> pf;
  if (use_particles)
    pf.emplace(exact, ParticleFilterConfig{cfg.n_particles, cfg.resample_threshold,
                                           derive_seed(seed, Stream::particles)});
  auto current = [&]() -> const Belief& { return use_particles ? pf->particles() : exact; };

  const auto risk = risk_of(cfg);
  const auto scale = env.noise_scale();
  Rng noise_rng(derive_seed(seed, Stream::noise));
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::size_t n = 0;
  for (std::size_t episode = 0; n < cfg.T; ++episode) {
    env.begin_episode();
    const std::size_t horizon = env.episode_length(cfg);
    const Belief start = current();
    const LatentParam theta = cfg.has("no-thompson")
                                  ? collapse_by_id(start).mode()
                                  : thompson_sample(start, derive_seed(seed, Stream::thompson, episode));
    for (std::size_t t = 0; t < horizon && n < cfg.T; ++t, ++n) {
      PlannerConfig pc;
      env.configure(pc, cfg);
      pc.rollout_budget = cfg.rollout_budget;
      pc.exploration_const = cfg.exploration_const;
      pc.discount = cfg.gamma;
      pc.leaf_samples = cfg.leaf_samples;
      pc.constraint_samples = cfg.constraint_samples;
      pc.rng_seed = derive_seed(seed, Stream::planner, n);
      pc.exec = cfg.exec;

      StepRecord rec;
      rec.t = n;
      rec.episode = episode;
      rec.theta_id = theta.id;
      PlanDiagnostics diag;
      try {
        auto plan_res = plan(env.state(), theta, env.model(), pc, risk);
        rec.action = plan_res.action;
        diag = std::move(plan_res.diagnostics);
      } catch (const NoFeasibleAction& e) {
        rec.action = e.least_violating();
        diag = e.diagnostics();
        rec.infeasible = true;
        ++res.infeasible_events;
      }
      rec.action_label = env.label(rec.action);
      rec.root_values = diag.root_values;
      rec.root_cvar = diag.root_cvar;
      rec.visits = diag.visits;
      rec.excluded = static_cast<std::size_t>(std::count(diag.excluded.begin(), diag.excluded.end(), true));

      const auto preds = env.predictives();
      if (!preds.empty()) mixture_moments(preds, id_marginal(current(), support), rec.forecast_mean, rec.forecast_var);

      Observation x = env.execute(rec.action, rec);
      rec.observation = x;
      if (!scale.empty()) {
        for (std::size_t j = 0; j < x.size() && j < scale.size(); ++j) {
          const double u = uniform01(noise_rng);
          const double e = gauss(noise_rng);
          if (u < cfg.noise_frac) x[j] += cfg.noise_sigma * scale[j] * e;
        }
      }
      const auto ll_support = env.absorb(x);

      if (!frozen) {
        try {
          if (use_particles) {
            pf->propagate(support, env.switch_prob());
            std::vector<double> ll;
            for (const auto& h : pf->particles().hypotheses()) ll.push_back(ll_support[position.at(h.id)]);
            pf->update_log(ll, cfg.exec);
          } else {
            const Belief predicted = markov_mix(exact, env.switch_prob());
            std::vector<double> ll;
            for (const auto& h : predicted.hypotheses()) ll.push_back(ll_support[position.at(h.id)]);
            exact = bayes_update_log(predicted, ll, cfg.exec);
          }
        } catch (const AllZeroLikelihood&) {
          if (use_particles) {
            pf->reset(start);
          } else {
            exact = start;
          }
          rec.belief_reset = true;
          ++res.belief_resets;
        }
      }
      rec.belief = id_marginal(current(), support);
      rec.entropy = entropy(collapse_by_id(current()));
      res.log.steps.push_back(std::move(rec));
    }
  }
  res.metrics = compute_log_metrics(res.log);
  return res;
}

std::string demo_label(double before, double after) {
  if (after > before) return "buy";
  if (after < before) return "sell";
  return "hold";
}

struct DemoPath {
  std::vector<std::size_t> actions;
  std::vector<TradingStepResult> steps;
};

DemoPath demo_path(const DemoScript& s, double cost_rate, const std::vector<std::size_t>* fixed,
                   Exec exec) {
  std::vector<Allocation> grid;
  for (double e : s.equity_levels) grid.push_back({1.0 - e, e, 0.0});
  const TradingModel model(grid);
  TradingState st;
  st.value = s.initial_value;
  st.cost_rate = cost_rate;
  st.weights = {1.0 - s.initial_equity, s.initial_equity, 0.0};
  st.target = st.weights;
  st.prices = {s.prices.front(), 100.0};
  RiskConfig risk;
  risk.alpha = s.alpha;
  risk.eta = s.eta;
  PlannerConfig pc;
  pc.depth_limit = 1;
  pc.horizon = 1;
  pc.rollout_budget = 16;
  pc.leaf_samples = 4;
  pc.exec = exec;
  DemoPath out;
  const std::size_t steps = std::min(s.draws.size(), s.prices.size() - 1);
  for (std::size_t t = 0; t < steps; ++t) {
    std::size_t a;
    if (fixed) {
      a = fixed->at(t);
    } else {
      const LatentParam theta{"scenario", {s.draws[t], 0.0, 0.0, 0.0}};
      pc.rng_seed = derive_seed(0, Stream::planner, t);
      a = plan(st, theta, model, pc, risk).action;
    }
    const double r = std::log(s.prices[t + 1] / s.prices[t]);
    auto res = trading_step(st, grid[a], {r, 0.0});
    st = res.next;
    out.actions.push_back(a);
    out.steps.push_back(res);
  }
  return out;
}

}  // namespace

DemoResult run_demo(const DemoScript& s, Exec exec) {
  if (s.prices.size() < 2) throw ConfigError("demo needs at least two prices");
  DemoResult out;
  const auto net = demo_path(s, s.cost_rate, nullptr, exec);
  const auto gross = demo_path(s, 0.0, &net.actions, exec);

  ScalarGaussianBelief belief{s.mu0, s.var0, s.noise_var};
  out.rows.push_back({0, s.prices[0], kNan, belief.mu, belief.var, "sample", s.initial_equity, s.initial_value});
  out.log.env = "demo";
  out.log.support = {"scenario"};
  out.log.meta = {{"initial_value", s.initial_value}, {"cost_rate", s.cost_rate}};
  double equity = s.initial_equity;
  for (std::size_t t = 0; t < net.actions.size(); ++t) {
    const double r = std::log(s.prices[t + 1] / s.prices[t]);
    const auto pred = conjugate_predictive(belief);
    belief = conjugate_update(belief, r);
    const double target = s.equity_levels[net.actions[t]];
    out.rows.push_back({t + 1, s.prices[t + 1], r, belief.mu, belief.var, demo_label(equity, target), target,
                        net.steps[t].next.value});
    equity = target;

    StepRecord rec;
    rec.t = t;
    rec.episode = t;
    rec.theta_id = "scenario";
    rec.action = net.actions[t];
    rec.action_label = out.rows.back().action;
    rec.reward = net.steps[t].reward;
    rec.value = net.steps[t].next.value;
    rec.turnover = net.steps[t].turnover;
    rec.belief = {1.0};
    rec.forecast_mean = pred.means();
    rec.forecast_var = pred.variances();
    rec.observation = {r};
    out.log.steps.push_back(std::move(rec));
  }
  out.final_value = net.steps.empty() ? s.initial_value : net.steps.back().next.value;
  out.final_value_gross = gross.steps.empty() ? s.initial_value : gross.steps.back().next.value;
  const double last = s.prices[net.actions.size()];
  out.buy_and_hold_value =
      s.initial_value * (s.initial_equity * last / s.prices[0] + (1.0 - s.initial_equity));
  return out;
}

void write_demo_trace_csv(const DemoResult& demo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write file", path);
  out.precision(17);
  out << "t,price,log_return,mu,var,action,equity_weight,value\n";
  for (const auto& r : demo.rows) {
    out << r.t << ',' << r.price << ',';
    if (std::isfinite(r.log_return)) out << r.log_return;
    out << ',' << r.mu << ',' << r.var << ',' << r.action << ',' << r.equity_weight << ',' << r.value << '\n';
  }
  if (!out) throw IoFailure("write failed", path);
}

RunResult run_uamdp(const RunConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  switch (cfg.env) {
    case EnvKind::demo: {
      DemoScript s;
      s.cost_rate = cfg.cost_rate;
      s.alpha = cfg.alpha;
      s.eta = cfg.has("no-cvar") ? 0.0 : cfg.eta;
      s.initial_value = cfg.initial_value;
      auto demo = run_demo(s, cfg.exec);
      RunResult res;
      res.log = std::move(demo.log);
      res.log.model = model_name(cfg);
      res.log.seed = seed;
      res.metrics = compute_log_metrics(res.log);
      return res;
    }
    case EnvKind::trading: {
      TradingEnv env(cfg, seed);
      return run_loop(cfg, seed, env);
    }
    case EnvKind::inventory: {
      InventoryEnv env(cfg, seed);
      return run_loop(cfg, seed, env);
    }
    case EnvKind::tiny_bamdp: {
      TinyEnv env(cfg, seed);
      return run_loop(cfg, seed, env);
    }
  }
  throw ConfigError("unknown environment");
}

std::vector<RunResult> run_seeds(const RunConfig& cfg) {
  cfg.validate();
  RunConfig inner = cfg;
  if (cfg.exec == Exec::parallel && cfg.seeds.size() > 1) inner.exec = Exec::serial;
  return kernels::map_index<RunResult>(cfg.seeds.size(), cfg.exec,
                                       [&](std::size_t i) { return run_uamdp(inner, cfg.seeds[i]); });
}

AblationReport run_ablation(const RunConfig& cfg, const std::string& which) {
  static const std::set<std::string> known{"none", "no-thompson", "no-cvar", "no-belief"};
  if (!known.count(which)) throw ConfigError("unknown ablation: " + which);
  AblationReport rep;
  rep.which = which;
  rep.seeds = cfg.seeds;
  RunConfig ablated = cfg;
  if (which != "none") ablated.ablations.insert(which);
  rep.full_runs = run_seeds(cfg);
  rep.ablated_runs = run_seeds(ablated);
  std::vector<double> d_mean, d_cvar;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    rep.full_mean_reward.push_back(mean_reward(rep.full_runs[i].log));
    rep.ablated_mean_reward.push_back(mean_reward(rep.ablated_runs[i].log));
    rep.full_cvar.push_back(rep.full_runs[i].log.steps.empty() ? 0.0 : realized_cvar(rep.full_runs[i].log, 0.05));
    rep.ablated_cvar.push_back(rep.ablated_runs[i].log.steps.empty() ? 0.0
                                                                       : realized_cvar(rep.ablated_runs[i].log, 0.05));
    d_mean.push_back(rep.full_mean_reward.back() - rep.ablated_mean_reward.back());
    d_cvar.push_back(rep.full_cvar.back() - rep.ablated_cvar.back());
  }
  rep.mean_reward_test = wilcoxon_signed_rank_greater(d_mean);
  rep.cvar_test = wilcoxon_signed_rank_greater(d_cvar);
  return rep;
}

void write_ablation_csv(const AblationReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write file", path);
  out.precision(17);
  out << "ablation,seed,full_mean_reward,ablated_mean_reward,full_cvar_05,ablated_cvar_05\n";
  for (std::size_t i = 0; i < rep.seeds.size(); ++i)
    out << rep.which << ',' << rep.seeds[i] << ',' << rep.full_mean_reward[i] << ',' << rep.ablated_mean_reward[i]
        << ',' << rep.full_cvar[i] << ',' << rep.ablated_cvar[i] << '\n';
  if (!out) throw IoFailure("write failed", path);
}

const std::vector<std::string>& shipped_instances() {
  static const std::vector<std::string> paths{
      "data/instances/two_armed.json", "data/instances/deferred.json", "data/instances/three_theta.json",
      "data/instances/dense_random.json", "data/instances/probe_then_exploit.json"};
  return paths;
}

std::vector<TinyBAMDP> load_instances(const std::vector<std::string>& paths) {
  std::vector<TinyBAMDP> out;
  for (const auto& p : paths) out.push_back(load_tiny_bamdp(resolve_resource(p)));
  return out;
}

void write_regret_csv(const std::vector<RegretCell>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write file", path);
  out.precision(17);
  out << "instance,agent,n_particles,lookahead,episodes,v_star,mean_return,mean_regret,sd,ci_lo,ci_hi,"
         "eps_f_max,eps_f_mean,eps_p,delta0,delta0_method,bound,bound_ok\n";
  for (const auto& c : cells) {
    out << c.instance << ',' << c.agent << ',' << c.n_particles << ',' << c.lookahead << ',' << c.stats.episodes
        << ',' << c.stats.v_star << ',' << c.stats.mean_return << ',' << c.stats.mean << ',' << c.stats.sd << ','
        << c.stats.ci_lo << ',' << c.stats.ci_hi << ',' << c.stats.eps_f_max << ',' << c.stats.eps_f_mean << ','
        << c.eps_p << ',' << c.delta0 << ',' << c.delta0_method << ',';
    if (std::isfinite(c.bound)) out << c.bound;
    out << ',' << (c.bound_ok ? 1 : 0) << '\n';
  }
  if (!out) throw IoFailure("write failed", path);
}

std::vector<RobustnessRow> run_noise_robustness(const RunConfig& cfg, const std::vector<double>& noise_fracs,
                                                double sigma) {
  RunConfig clean = cfg;
  clean.noise_frac = 0.0;
  clean.noise_sigma = sigma;
  const auto base = run_seeds(clean);
  std::vector<RobustnessRow> rows;
  for (double frac : noise_fracs) {
    if (!(frac >= 0.0 && frac <= 1.0)) throw ConfigError("noise fraction must lie in [0,1]");
    RunConfig noisy = clean;
    noisy.noise_frac = frac;
    const auto runs = frac == 0.0 ? base : run_seeds(noisy);
    RobustnessRow row;
    row.noise_frac = frac;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const double b = mean_reward(base[i].log);
      row.ratios.push_back(b == 0.0 ? 1.0 : mean_reward(runs[i].log) / b);
    }
    auto sorted = row.ratios;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    row.median_ratio = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    const auto s = summarize(row.ratios);
    row.mean_ratio = s.mean;
    row.ci_lo = s.ci_lo;
    row.ci_hi = s.ci_hi;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_robustness_csv(const std::vector<RobustnessRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write file", path);
  out.precision(17);
  out << "noise_frac,median_ratio,mean_ratio,ci_lo,ci_hi\n";
  for (const auto& r : rows)
    out << r.noise_frac << ',' << r.median_ratio << ',' << r.mean_ratio << ',' << r.ci_lo << ',' << r.ci_hi << '\n';
  if (!out) throw IoFailure("write failed", path);
}

}  // namespace uamdp
