#pragma once

// The online control loop (Thompson draw per episode, receding-horizon
// planning, Bayes update) over the shipped environments, plus the experiment
// runners built on it.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uamdp/config.hpp"
#include "uamdp/export.hpp"
#include "uamdp/oracle.hpp"
#include "uamdp/stats.hpp"

namespace uamdp {

struct RunResult {
  EpisodeLog log;
  std::vector<MetricRow> metrics;
  std::size_t infeasible_events = 0;
  std::size_t belief_resets = 0;
};

// One full run for a single seed. Throws ConfigError for invalid configs.
RunResult run_uamdp(const RunConfig& cfg, std::uint64_t seed);

// One run per cfg.seeds entry, in seed order (seeds run concurrently under
// Exec::parallel).
std::vector<RunResult> run_seeds(const RunConfig& cfg);

// Scripted two-step portfolio demonstration.
struct DemoScript {
  std::vector<double> prices{100.0, 102.0, 101.5};  // index; cash stays flat
  std::vector<double> draws{0.009, 0.005};          // scripted Thompson draws of the next return
  double mu0 = 0.0;
  double var0 = 5e-4;
  double noise_var = 2.5e-4;
  double initial_value = 100.0;
  double initial_equity = 0.5;
  std::vector<double> equity_levels{0.2, 0.5, 0.8};
  double cost_rate = 0.0002;
  double alpha = 0.05;
  double eta = 0.7;
};

struct DemoRow {
  std::size_t t = 0;
  double price = 0.0;
  double log_return = 0.0;  // NaN at t = 0
  double mu = 0.0;
  double var = 0.0;
  std::string action;  // sample | buy | sell | hold
  double equity_weight = 0.0;
  double value = 0.0;
};

struct DemoResult {
  std::vector<DemoRow> rows;
  double final_value = 0.0;        // net of transaction costs
  double final_value_gross = 0.0;  // same actions with costs disabled
  double buy_and_hold_value = 0.0; // initial allocation held throughout
  EpisodeLog log;
};

DemoResult run_demo(const DemoScript& script = {}, Exec exec = Exec::serial);
void write_demo_trace_csv(const DemoResult& demo, const std::string& path);

struct AblationReport {
  std::string which;  // none | no-thompson | no-cvar | no-belief
  std::vector<std::uint64_t> seeds;
  std::vector<double> full_mean_reward;
  std::vector<double> ablated_mean_reward;
  std::vector<double> full_cvar;  // realized CVaR_0.05 of per-step rewards
  std::vector<double> ablated_cvar;
  WilcoxonResult mean_reward_test;  // H1: full > ablated
  WilcoxonResult cvar_test;         // H1: full > ablated
  std::vector<RunResult> full_runs;
  std::vector<RunResult> ablated_runs;
};

AblationReport run_ablation(const RunConfig& cfg, const std::string& which);
void write_ablation_csv(const AblationReport& report, const std::string& path);

// Loads the instance files (resolved via resolve_resource).
std::vector<TinyBAMDP> load_instances(const std::vector<std::string>& paths);
const std::vector<std::string>& shipped_instances();
void write_regret_csv(const std::vector<RegretCell>& cells, const std::string& path);

struct RobustnessRow {
  double noise_frac = 0.0;
  double median_ratio = 0.0;  // median over seeds of noisy / clean mean reward
  double mean_ratio = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::vector<double> ratios;
};

// Observation dimensions are perturbed with probability noise_frac per step by
// N(0, (sigma * scale_j)^2), scale_j the environment's typical spread.
std::vector<RobustnessRow> run_noise_robustness(const RunConfig& cfg,
                                                const std::vector<double>& noise_fracs,
                                                double sigma);
void write_robustness_csv(const std::vector<RobustnessRow>& rows, const std::string& path);

}  // namespace uamdp
