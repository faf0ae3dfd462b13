// Command-line front end: demo, run, ablate, regret, robustness, export.
//
// Exit codes: 0 success, 2 configuration error, 3 the run completed but hit
// chance-constraint infeasibility events.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uamdp/config.hpp"
#include "uamdp/export.hpp"
#include "uamdp/harness.hpp"
#include "uamdp/oracle.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct CommonOptions {
  std::optional<std::string> config;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;  // key=value
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "run configuration file");
  app->add_option("--seed", o.seeds, "run seed (repeatable)")->take_all();
  app->add_option("--set", o.sets, "override key=value (repeatable)");
  for (const auto& key : uamdp::config_keys()) {
    if (key.name == "seeds") continue;
    std::string names = "--" + key.name;
    std::string dashed = key.name;
    for (auto& c : dashed) c = c == '_' ? '-' : c;
    if (dashed != key.name) names += ",--" + dashed;
    app->add_option_function<std::string>(
        names, [&o, name = key.name](const std::string& v) { o.flags[name] = v; }, key.help);
  }
}

uamdp::RunConfig build_config(const CommonOptions& o, std::map<std::string, std::string> defaults = {}) {
  std::map<std::string, std::string> overrides = std::move(defaults);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw uamdp::ConfigError("--set expects key=value, got '" + s + "'");
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  for (const auto& [k, v] : o.flags) overrides[k] = v;
  if (!o.seeds.empty()) {
    std::string list;
    for (std::size_t i = 0; i < o.seeds.size(); ++i) list += (i ? "," : "") + std::to_string(o.seeds[i]);
    overrides["seeds"] = list;
  }
  return uamdp::load_run_config(o.config, overrides);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw uamdp::IoFailure("cannot create directory", dir);
}

int cmd_demo(const std::string& out_dir) {
  const auto demo = uamdp::run_demo();
  ensure_dir(out_dir);
  uamdp::write_demo_trace_csv(demo, out_dir + "/demo_trace.csv");
  uamdp::write_episode_log_jsonl(demo.log, out_dir + "/demo_log.jsonl");
  std::printf("%-3s %-8s %-9s %-9s %-11s %-7s %s\n", "t", "P_t", "r_t", "mu_t", "sigma2_t", "action", "equity");
  for (const auto& r : demo.rows) {
    char ret[32] = "-";
    if (r.t > 0) std::snprintf(ret, sizeof ret, "%.4f", r.log_return);
    std::printf("%-3zu %-8.2f %-9s %-9.5f %-11.4e %-7s %.0f%%\n", r.t, r.price, ret, r.mu, r.var, r.action.c_str(),
                100.0 * r.equity_weight);
  }
  const double v0 = demo.rows.front().value;
  std::printf("final value %.4f net of costs (%.4f gross), %+.2f%%; buy-and-hold %.4f, %+.2f%%\n",
              demo.final_value, demo.final_value_gross, 100.0 * (demo.final_value_gross / v0 - 1.0),
              demo.buy_and_hold_value, 100.0 * (demo.buy_and_hold_value / v0 - 1.0));
  return 0;
}

int cmd_run(const uamdp::RunConfig& cfg) {
  const auto runs = uamdp::run_seeds(cfg);
  std::size_t infeasible = 0;
  for (const auto& r : runs) {
    const std::string dir = cfg.output_dir + "/seed_" + std::to_string(r.log.seed);
    ensure_dir(dir);
    uamdp::write_episode_log_jsonl(r.log, dir + "/episode_log.jsonl");
    uamdp::write_metrics_csv(r.metrics, dir + "/metrics.csv");
    uamdp::write_plot_bundle(r.log, dir + "/plots");
    infeasible += r.infeasible_events;
    std::printf("seed %llu: %zu steps", static_cast<unsigned long long>(r.log.seed), r.log.steps.size());
    for (const auto& m : r.metrics)
      if (m.metric == "mean_reward" || m.metric == "cvar_05" || m.metric == "final_value" ||
          m.metric == "service_level")
        std::printf("  %s=%.6g", m.metric.c_str(), m.value);
    std::printf("\n");
  }
  if (infeasible > 0) {
    std::fprintf(stderr, "%zu chance-constraint infeasibility events\n", infeasible);
    return kExitInfeasible;
  }
  return 0;
}

int cmd_ablate(const uamdp::RunConfig& cfg, const std::vector<std::string>& which) {
  ensure_dir(cfg.output_dir);
  std::size_t infeasible = 0;
  for (const auto& w : which) {
    const auto rep = uamdp::run_ablation(cfg, w);
    uamdp::write_ablation_csv(rep, cfg.output_dir + "/ablation_" + w + ".csv");
    double fm = 0, am = 0, fc = 0, ac = 0;
    const double n = static_cast<double>(rep.seeds.size());
    for (std::size_t i = 0; i < rep.seeds.size(); ++i) {
      fm += rep.full_mean_reward[i] / n;
      am += rep.ablated_mean_reward[i] / n;
      fc += rep.full_cvar[i] / n;
      ac += rep.ablated_cvar[i] / n;
    }
    std::printf("%-12s mean reward full %.6g vs %.6g (p=%.4g)  cvar_05 full %.6g vs %.6g (p=%.4g)\n", w.c_str(), fm,
                am, rep.mean_reward_test.p_value, fc, ac, rep.cvar_test.p_value);
    for (const auto& r : rep.full_runs) infeasible += r.infeasible_events;
    for (const auto& r : rep.ablated_runs) infeasible += r.infeasible_events;
  }
  return infeasible > 0 ? kExitInfeasible : 0;
}

int cmd_regret(std::vector<std::string> instances, const uamdp::RegretSuiteConfig& rc, const std::string& out) {
  if (instances.empty()) instances = uamdp::shipped_instances();
  const auto problems = uamdp::load_instances(instances);
  const auto cells = uamdp::run_regret_suite(problems, rc);
  const auto parent = std::filesystem::path(out).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  uamdp::write_regret_csv(cells, out);
  std::printf("%-20s %-10s %5s %5s %12s %24s %10s\n", "instance", "agent", "N", "L", "regret", "95% CI", "bound");
  for (const auto& c : cells) {
    char ci[64];
    std::snprintf(ci, sizeof ci, "[%.5f, %.5f]", c.stats.ci_lo, c.stats.ci_hi);
    std::printf("%-20s %-10s %5zu %5zu %12.6f %24s %10.4g%s\n", c.instance.c_str(), c.agent.c_str(), c.n_particles,
                c.lookahead, c.stats.mean, ci, c.bound, c.bound_ok ? "" : "  VIOLATED");
  }
  return 0;
}

int cmd_robustness(const uamdp::RunConfig& cfg, const std::vector<double>& fracs, double sigma) {
  ensure_dir(cfg.output_dir);
  const auto rows = uamdp::run_noise_robustness(cfg, fracs, sigma);
  uamdp::write_robustness_csv(rows, cfg.output_dir + "/robustness.csv");
  for (const auto& r : rows)
    std::printf("noise %.2f  median ratio %.4f  mean %.4f [%.4f, %.4f]\n", r.noise_frac, r.median_ratio,
                r.mean_ratio, r.ci_lo, r.ci_hi);
  return 0;
}

int cmd_export(const std::string& log_path, const std::string& out_dir) {
  const auto log = uamdp::read_episode_log_jsonl(log_path);
  ensure_dir(out_dir);
  uamdp::write_metrics_csv(uamdp::compute_log_metrics(log), out_dir + "/metrics.csv");
  uamdp::write_plot_bundle(log, out_dir + "/plots");
  std::printf("exported %zu steps to %s\n", log.steps.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian belief tracking, Thompson episodes and CVaR tree search on synthetic environments"};
  app.require_subcommand(1);

  std::string demo_out = "out/demo";
  auto* demo = app.add_subcommand("demo", "scripted two-step portfolio demonstration");
  demo->add_option("--out", demo_out, "output directory");

  CommonOptions run_opts, ablate_opts, robust_opts;
  auto* run = app.add_subcommand("run", "run the control loop for each seed");
  add_common(run, run_opts);

  std::vector<std::string> which{"no-belief", "no-cvar", "no-thompson"};
  auto* ablate = app.add_subcommand("ablate", "paired-seed ablation study");
  add_common(ablate, ablate_opts);
  ablate->add_option("--which", which, "ablations to compare against the full agent")->delimiter(',');

  std::vector<std::string> instances;
  uamdp::RegretSuiteConfig rc;
  std::string regret_out = "out/regret.csv";
  std::string regret_exec = "serial";
  auto* regret = app.add_subcommand("regret", "Bayes-regret grid on the tiny instances");
  regret->add_option("--instance", instances, "instance JSON file (repeatable; default: shipped set)");
  regret->add_option("--episodes", rc.episodes, "episodes per cell");
  regret->add_option("--particles", rc.particle_counts, "particle counts")->delimiter(',');
  regret->add_option("--lookaheads", rc.lookaheads, "lookahead depths (0 = full horizon)")->delimiter(',');
  regret->add_option("--seed", rc.rng_seed, "base seed");
  regret->add_option("--exec", regret_exec, "serial | parallel");
  regret->add_option("--out", regret_out, "output CSV");

  std::vector<double> fracs{0.0, 0.1, 0.2, 0.3};
  double sigma = 1.0;
  auto* robust = app.add_subcommand("robustness", "mean-reward ratio under observation noise");
  add_common(robust, robust_opts);
  robust->add_option("--fracs", fracs, "noise fractions")->delimiter(',');
  robust->add_option("--sigma", sigma, "noise sd in units of each dimension's scale");

  std::string log_path, export_out = "out/export";
  auto* exp = app.add_subcommand("export", "recompute metrics and plot data from an episode log");
  exp->add_option("--log", log_path, "JSON-lines episode log")->required();
  exp->add_option("--out", export_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*demo) return cmd_demo(demo_out);
    if (*run) return cmd_run(build_config(run_opts));
    if (*ablate) return cmd_ablate(build_config(ablate_opts), which);
    if (*regret) {
      rc.exec = uamdp::parse_exec(regret_exec);
      return cmd_regret(instances, rc, regret_out);
    }
    if (*robust) return cmd_robustness(build_config(robust_opts), fracs, sigma);
    if (*exp) return cmd_export(log_path, export_out);
  } catch (const uamdp::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
