#pragma once

// Run configuration: a flat "key = value" text format with '#' comments.
// Precedence: defaults < config file < UAMDP_<KEY> environment variables <
// command-line overrides.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uamdp/kernels.hpp"

namespace uamdp {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class EnvKind { demo, trading, inventory, tiny_bamdp };
enum class ForecasterKind { gp, conjugate, persistence };
enum class BeliefKind { exact, particle };

struct RunConfig {
  EnvKind env = EnvKind::trading;
  ForecasterKind forecaster = ForecasterKind::conjugate;
  BeliefKind belief = BeliefKind::exact;
  double gamma = 0.99;
  std::size_t T = 250;
  std::size_t H = 5;
  double alpha = 0.05;
  double eta = 0.7;
  double delta = 0.05;
  bool risk_enabled = true;
  std::vector<double> safe_lower;  // empty: chance constraints inactive
  std::vector<double> safe_upper;
  std::size_t n_particles = 256;
  double resample_threshold = 0.5;
  std::size_t depth_limit = 3;
  std::size_t rollout_budget = 128;
  std::size_t leaf_samples = 16;
  std::size_t constraint_samples = 64;
  double exploration_const = 1.4142135623730951;
  std::set<std::string> ablations;  // no-thompson, no-cvar, no-belief
  std::vector<std::uint64_t> seeds{0};
  Exec exec = Exec::serial;
  std::string instance = "data/instances/two_armed.json";
  // trading
  double switch_prob = 0.02;
  double alloc_step = 1.0;
  double cost_rate = 0.0002;
  double initial_value = 100.0;
  // inventory
  long order_step = 5;
  long qmax = 50;
  double price = 10.0;
  double unit_cost = 6.0;
  double holding_cost = 0.1;
  double stockout_penalty = 50.0;
  double promo_prob = 0.15;
  // feature/observation noise injection
  double noise_frac = 0.0;
  double noise_sigma = 1.0;
  std::string output_dir = "out";

  bool has(const std::string& ablation) const { return ablations.count(ablation) > 0; }
  void validate() const;  // throws ConfigError
};

struct ConfigKey {
  std::string name;
  std::string type;  // string | real | integer | boolean | list
  std::string help;
};

const std::vector<ConfigKey>& config_keys();

// Parses "key = value" lines; throws ConfigError on syntax errors or unknown keys.
std::map<std::string, std::string> parse_config_text(const std::string& text);

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Loads defaults, then the file (if any), then environment overrides, then `overrides`.
RunConfig load_run_config(const std::optional<std::string>& path,
                          const std::map<std::string, std::string>& overrides = {},
                          bool use_environment = true);

// Canonical text form (all keys, fixed order) parseable by parse_config_text.
std::string to_text(const RunConfig& cfg);

std::string to_string(EnvKind k);
std::string to_string(ForecasterKind k);
std::string to_string(BeliefKind k);

// Resolves a relative resource path against the working directory first and
// the source tree second.
std::string resolve_resource(const std::string& path);

}  // namespace uamdp
