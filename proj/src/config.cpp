#include "uamdp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace uamdp {

namespace {

const std::set<std::string> kAblations{"no-thompson", "no-cvar", "no-belief"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a real number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  const long long x = parse_int(key, v);
  if (x < 0) throw ConfigError("config key '" + key + "' must be >= 0");
  return static_cast<std::size_t>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(parse_real(key, item));
  return out;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

std::string real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string to_string(EnvKind k) {
  switch (k) {
    case EnvKind::demo: return "demo";
    case EnvKind::trading: return "trading";
    case EnvKind::inventory: return "inventory";
    case EnvKind::tiny_bamdp: return "tiny-bamdp";
  }
  return "?";
}

std::string to_string(ForecasterKind k) {
  switch (k) {
    case ForecasterKind::gp: return "gp";
    case ForecasterKind::conjugate: return "conjugate";
    case ForecasterKind::persistence: return "persistence";
  }
  return "?";
}

std::string to_string(BeliefKind k) { return k == BeliefKind::exact ? "exact" : "particle"; }

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"env", "string", "demo | trading | inventory | tiny-bamdp"},
      {"forecaster", "string", "gp | conjugate | persistence"},
      {"belief", "string", "exact | particle"},
      {"gamma", "real", "discount factor in (0,1)"},
      {"T", "integer", "global step budget"},
      {"H", "integer", "episode length; theta is resampled every H steps"},
      {"alpha", "real", "CVaR tail level in (0,1)"},
      {"eta", "real", "risk weight in [0,1]"},
      {"delta", "real", "chance-constraint violation budget in (0,1)"},
      {"risk_enabled", "boolean", "score leaves with the blended objective"},
      {"safe_lower", "list", "lower corner of the safe observation box (empty: inactive)"},
      {"safe_upper", "list", "upper corner of the safe observation box"},
      {"n_particles", "integer", "particle count for belief = particle"},
      {"resample_threshold", "real", "ESS fraction that triggers resampling"},
      {"depth_limit", "integer", "planner depth L"},
      {"rollout_budget", "integer", "UCT iterations per decision"},
      {"leaf_samples", "integer", "return draws per leaf evaluation"},
      {"constraint_samples", "integer", "sample paths per root action for chance constraints"},
      {"exploration_const", "real", "UCT exploration constant"},
      {"ablations", "list", "subset of no-thompson, no-cvar, no-belief"},
      {"seeds", "list", "run seeds"},
      {"exec", "string", "serial | parallel"},
      {"instance", "string", "tiny-bamdp instance file"},
      {"switch_prob", "real", "regime switch probability per step"},
      {"alloc_step", "real", "allocation grid step (1 = pure cash/index/bond)"},
      {"cost_rate", "real", "transaction cost per unit turnover"},
      {"initial_value", "real", "starting portfolio value"},
      {"order_step", "integer", "order quantity grid step"},
      {"qmax", "integer", "largest order quantity"},
      {"price", "real", "unit sale price"},
      {"unit_cost", "real", "unit purchase cost"},
      {"holding_cost", "real", "cost per unit held at period end"},
      {"stockout_penalty", "real", "penalty per unit of unmet demand"},
      {"promo_prob", "real", "probability of a promotion day"},
      {"noise_frac", "real", "probability that an observation dimension is perturbed each step"},
      {"noise_sigma", "real", "perturbation sd in units of the dimension's scale"},
      {"output_dir", "string", "directory for exported files"},
  };
  return keys;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> known;
  for (const auto& k : config_keys()) known.insert(k.name);
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!known.count(key)) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& v) {
  if (key == "env") {
    if (v == "demo") cfg.env = EnvKind::demo;
    else if (v == "trading") cfg.env = EnvKind::trading;
    else if (v == "inventory") cfg.env = EnvKind::inventory;
    else if (v == "tiny-bamdp") cfg.env = EnvKind::tiny_bamdp;
    else throw ConfigError("config key 'env': unknown environment '" + v + "'");
  } else if (key == "forecaster") {
    if (v == "gp") cfg.forecaster = ForecasterKind::gp;
    else if (v == "conjugate") cfg.forecaster = ForecasterKind::conjugate;
    else if (v == "persistence") cfg.forecaster = ForecasterKind::persistence;
    else throw ConfigError("config key 'forecaster': unknown forecaster '" + v + "'");
  } else if (key == "belief") {
    if (v == "exact") cfg.belief = BeliefKind::exact;
    else if (v == "particle") cfg.belief = BeliefKind::particle;
    else throw ConfigError("config key 'belief': expected exact or particle");
  } else if (key == "gamma") cfg.gamma = parse_real(key, v);
  else if (key == "T") cfg.T = parse_count(key, v);
  else if (key == "H") cfg.H = parse_count(key, v);
  else if (key == "alpha") cfg.alpha = parse_real(key, v);
  else if (key == "eta") cfg.eta = parse_real(key, v);
  else if (key == "delta") cfg.delta = parse_real(key, v);
  else if (key == "risk_enabled") cfg.risk_enabled = parse_bool(key, v);
  else if (key == "safe_lower") cfg.safe_lower = parse_reals(key, v);
  else if (key == "safe_upper") cfg.safe_upper = parse_reals(key, v);
  else if (key == "n_particles") cfg.n_particles = parse_count(key, v);
  else if (key == "resample_threshold") cfg.resample_threshold = parse_real(key, v);
  else if (key == "depth_limit") cfg.depth_limit = parse_count(key, v);
  else if (key == "rollout_budget") cfg.rollout_budget = parse_count(key, v);
  else if (key == "leaf_samples") cfg.leaf_samples = parse_count(key, v);
  else if (key == "constraint_samples") cfg.constraint_samples = parse_count(key, v);
  else if (key == "exploration_const") cfg.exploration_const = parse_real(key, v);
  else if (key == "ablations") {
    cfg.ablations.clear();
    for (const auto& a : split_list(v)) {
      if (a == "none") continue;
      if (!kAblations.count(a)) throw ConfigError("config key 'ablations': unknown ablation '" + a + "'");
      cfg.ablations.insert(a);
    }
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const auto& s : split_list(v)) {
      const long long x = parse_int(key, s);
      if (x < 0) throw ConfigError("config key 'seeds': seeds must be >= 0");
      cfg.seeds.push_back(static_cast<std::uint64_t>(x));
    }
  } else if (key == "exec") {
    try {
      cfg.exec = parse_exec(v);
    } catch (const std::exception&) {
      throw ConfigError("config key 'exec': expected serial or parallel");
    }
  } else if (key == "instance") cfg.instance = v;
  else if (key == "switch_prob") cfg.switch_prob = parse_real(key, v);
  else if (key == "alloc_step") cfg.alloc_step = parse_real(key, v);
  else if (key == "cost_rate") cfg.cost_rate = parse_real(key, v);
  else if (key == "initial_value") cfg.initial_value = parse_real(key, v);
  else if (key == "order_step") cfg.order_step = static_cast<long>(parse_int(key, v));
  else if (key == "qmax") cfg.qmax = static_cast<long>(parse_int(key, v));
  else if (key == "price") cfg.price = parse_real(key, v);
  else if (key == "unit_cost") cfg.unit_cost = parse_real(key, v);
  else if (key == "holding_cost") cfg.holding_cost = parse_real(key, v);
  else if (key == "stockout_penalty") cfg.stockout_penalty = parse_real(key, v);
  else if (key == "promo_prob") cfg.promo_prob = parse_real(key, v);
  else if (key == "noise_frac") cfg.noise_frac = parse_real(key, v);
  else if (key == "noise_sigma") cfg.noise_sigma = parse_real(key, v);
  else if (key == "output_dir") cfg.output_dir = v;
  else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)");
  if (T > 0 && !(H >= 1 && T >= H)) fail("need T >= H >= 1 (or T = 0)");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0,1)");
  if (!(eta >= 0.0 && eta <= 1.0)) fail("eta must lie in [0,1]");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0,1)");
  if (safe_lower.size() != safe_upper.size()) fail("safe_lower and safe_upper must have the same length");
  if (n_particles < 1) fail("n_particles must be >= 1");
  if (!(resample_threshold > 0.0 && resample_threshold <= 1.0)) fail("resample_threshold must lie in (0,1]");
  if (depth_limit < 1) fail("depth_limit must be >= 1");
  if (H >= 1 && depth_limit > H && env != EnvKind::tiny_bamdp) fail("depth_limit must not exceed H");
  if (rollout_budget < 1) fail("rollout_budget must be >= 1");
  if (leaf_samples < 1) fail("leaf_samples must be >= 1");
  if (constraint_samples < 1) fail("constraint_samples must be >= 1");
  if (!(exploration_const > 0.0)) fail("exploration_const must be > 0");
  if (seeds.empty()) fail("at least one seed is required");
  if (!(switch_prob >= 0.0 && switch_prob <= 1.0)) fail("switch_prob must lie in [0,1]");
  if (!(alloc_step > 0.0 && alloc_step <= 1.0)) fail("alloc_step must lie in (0,1]");
  if (cost_rate < 0.0) fail("cost_rate must be >= 0");
  if (!(initial_value > 0.0)) fail("initial_value must be > 0");
  if (order_step < 1 || qmax < 0) fail("order_step must be >= 1 and qmax >= 0");
  if (!(noise_frac >= 0.0 && noise_frac <= 1.0)) fail("noise_frac must lie in [0,1]");
  if (noise_sigma < 0.0) fail("noise_sigma must be >= 0");
  if (!(promo_prob >= 0.0 && promo_prob <= 1.0)) fail("promo_prob must lie in [0,1]");
}

RunConfig load_run_config(const std::optional<std::string>& path,
                          const std::map<std::string, std::string>& overrides, bool use_environment) {
  RunConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file: " + *path);
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(ss.str())) apply_setting(cfg, k, v);
  }
  if (use_environment) {
    for (const auto& key : config_keys()) {
      std::string var = "UAMDP_" + key.name;
      std::transform(var.begin(), var.end(), var.begin(), [](unsigned char c) { return std::toupper(c); });
      if (const char* v = std::getenv(var.c_str())) apply_setting(cfg, key.name, trim(v));
    }
  }
  for (const auto& [k, v] : overrides) apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << "env = " << to_string(c.env) << '\n'
     << "forecaster = " << to_string(c.forecaster) << '\n'
     << "belief = " << to_string(c.belief) << '\n'
     << "gamma = " << real(c.gamma) << '\n'
     << "T = " << c.T << '\n'
     << "H = " << c.H << '\n'
     << "alpha = " << real(c.alpha) << '\n'
     << "eta = " << real(c.eta) << '\n'
     << "delta = " << real(c.delta) << '\n'
     << "risk_enabled = " << (c.risk_enabled ? "true" : "false") << '\n'
     << "safe_lower = " << join(c.safe_lower) << '\n'
     << "safe_upper = " << join(c.safe_upper) << '\n'
     << "n_particles = " << c.n_particles << '\n'
     << "resample_threshold = " << real(c.resample_threshold) << '\n'
     << "depth_limit = " << c.depth_limit << '\n'
     << "rollout_budget = " << c.rollout_budget << '\n'
     << "leaf_samples = " << c.leaf_samples << '\n'
     << "constraint_samples = " << c.constraint_samples << '\n'
     << "exploration_const = " << real(c.exploration_const) << '\n';
  os << "ablations = ";
  bool first = true;
  for (const auto& a : c.ablations) {
    os << (first ? "" : ",") << a;
    first = false;
  }
  os << "\nseeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << "\nexec = " << to_string(c.exec) << '\n'
     << "instance = " << c.instance << '\n'
     << "switch_prob = " << real(c.switch_prob) << '\n'
     << "alloc_step = " << real(c.alloc_step) << '\n'
     << "cost_rate = " << real(c.cost_rate) << '\n'
     << "initial_value = " << real(c.initial_value) << '\n'
     << "order_step = " << c.order_step << '\n'
     << "qmax = " << c.qmax << '\n'
     << "price = " << real(c.price) << '\n'
     << "unit_cost = " << real(c.unit_cost) << '\n'
     << "holding_cost = " << real(c.holding_cost) << '\n'
     << "stockout_penalty = " << real(c.stockout_penalty) << '\n'
     << "promo_prob = " << real(c.promo_prob) << '\n'
     << "noise_frac = " << real(c.noise_frac) << '\n'
     << "noise_sigma = " << real(c.noise_sigma) << '\n'
     << "output_dir = " << c.output_dir << '\n';
  return os.str();
}

std::string resolve_resource(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::path(path).is_absolute() || fs::exists(path)) return path;
  const fs::path alt = fs::path(UAMDP_SOURCE_DIR) / path;
  if (fs::exists(alt)) return alt.string();
  return path;
}

}  // namespace uamdp
