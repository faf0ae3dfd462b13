#include "uamdp/export.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "uamdp/metrics.hpp"
#include "uamdp/risk.hpp"
#include "uamdp/stats.hpp"

namespace uamdp {

namespace {

nlohmann::json reals(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
  return a;
}

std::vector<double> reals_from(const nlohmann::json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write file", path);
  out.precision(17);
  return out;
}

}  // namespace

nlohmann::json to_json(const StepRecord& r) {
  return {{"type", "step"},
          {"t", r.t},
          {"episode", r.episode},
          {"theta", r.theta_id},
          {"action", r.action},
          {"action_label", r.action_label},
          {"reward", r.reward},
          {"value", r.value},
          {"turnover", r.turnover},
          {"demand", r.demand},
          {"filled", r.filled},
          {"entropy", r.entropy},
          {"belief", reals(r.belief)},
          {"root_values", reals(r.root_values)},
          {"root_cvar", reals(r.root_cvar)},
          {"visits", r.visits},
          {"excluded", r.excluded},
          {"infeasible", r.infeasible},
          {"belief_reset", r.belief_reset},
          {"forecast_mean", reals(r.forecast_mean)},
          {"forecast_var", reals(r.forecast_var)},
          {"observation", reals(r.observation)}};
}

StepRecord step_record_from_json(const nlohmann::json& j) {
  StepRecord r;
  r.t = j.at("t").get<std::size_t>();
  r.episode = j.at("episode").get<std::size_t>();
  r.theta_id = j.at("theta").get<std::string>();
  r.action = j.at("action").get<std::size_t>();
  r.action_label = j.at("action_label").get<std::string>();
  r.reward = j.at("reward").get<double>();
  r.value = j.at("value").get<double>();
  r.turnover = j.at("turnover").get<double>();
  r.demand = j.at("demand").get<double>();
  r.filled = j.at("filled").get<double>();
  r.entropy = j.at("entropy").get<double>();
  r.belief = reals_from(j.at("belief"));
  r.root_values = reals_from(j.at("root_values"));
  r.root_cvar = reals_from(j.at("root_cvar"));
  r.visits = j.at("visits").get<std::vector<std::size_t>>();
  r.excluded = j.at("excluded").get<std::size_t>();
  r.infeasible = j.at("infeasible").get<bool>();
  r.belief_reset = j.at("belief_reset").get<bool>();
  r.forecast_mean = reals_from(j.at("forecast_mean"));
  r.forecast_var = reals_from(j.at("forecast_var"));
  r.observation = reals_from(j.at("observation"));
  return r;
}

std::string episode_log_jsonl(const EpisodeLog& log) {
  std::ostringstream os;
  nlohmann::json head{{"type", "run"},  {"env", log.env},         {"model", log.model},
                      {"seed", log.seed}, {"support", log.support}, {"meta", log.meta}};
  os << head.dump() << '\n';
  for (const auto& r : log.steps) os << to_json(r).dump() << '\n';
  return os.str();
}

void write_episode_log_jsonl(const EpisodeLog& log, const std::string& path) {
  auto out = open_out(path);
  out << episode_log_jsonl(log);
  if (!out) throw IoFailure("write failed", path);
}

EpisodeLog parse_episode_log_jsonl(const std::string& text) {
  EpisodeLog log;
  std::istringstream in(text);
  std::string line;
  bool have_head = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "run") {
      log.env = j.at("env").get<std::string>();
      log.model = j.at("model").get<std::string>();
      log.seed = j.at("seed").get<std::uint64_t>();
      log.support = j.at("support").get<std::vector<std::string>>();
      log.meta = j.at("meta").get<std::map<std::string, double>>();
      have_head = true;
    } else if (type == "step") {
      log.steps.push_back(step_record_from_json(j));
    } else {
      throw std::runtime_error("episode log: unknown record type '" + type + "'");
    }
  }
  if (!have_head) throw std::runtime_error("episode log: missing run header");
  return log;
}

EpisodeLog read_episode_log_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open episode log", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_episode_log_jsonl(ss.str());
}

double mean_reward(const EpisodeLog& log) {
  if (log.steps.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : log.steps) s += r.reward;
  return s / static_cast<double>(log.steps.size());
}

double realized_cvar(const EpisodeLog& log, double alpha) {
  std::vector<double> r;
  for (const auto& s : log.steps) r.push_back(s.reward);
  return cvar(r, alpha);
}

std::vector<MetricRow> compute_log_metrics(const EpisodeLog& log) {
  std::vector<MetricRow> rows;
  if (log.steps.empty()) return rows;
  auto add = [&](const std::string& name, double v) { rows.push_back({log.model, 1, name, v}); };
  std::vector<double> rewards;
  double entropy = 0.0;
  std::size_t infeasible = 0, resets = 0;
  for (const auto& s : log.steps) {
    rewards.push_back(s.reward);
    entropy += s.entropy;
    infeasible += s.infeasible ? 1 : 0;
    resets += s.belief_reset ? 1 : 0;
  }
  const double n = static_cast<double>(log.steps.size());
  add("mean_reward", mean_reward(log));
  add("total_reward", std::accumulate(rewards.begin(), rewards.end(), 0.0));
  add("cvar_05", cvar(rewards, 0.05));
  add("mean_entropy", entropy / n);
  add("infeasible_events", static_cast<double>(infeasible));
  add("belief_resets", static_cast<double>(resets));

  std::vector<ForecastRecord> records;
  std::vector<double> pred0, actual0;
  double crps = 0.0;
  std::size_t crps_n = 0;
  for (const auto& s : log.steps) {
    if (s.forecast_mean.empty() || s.forecast_mean.size() != s.observation.size()) continue;
    records.push_back({PredictiveDist::gaussian(s.forecast_mean, s.forecast_var), s.observation, 1});
    for (std::size_t j = 0; j < s.observation.size(); ++j) {
      crps += crps_gaussian(s.forecast_mean[j], std::sqrt(s.forecast_var[j]), s.observation[j]);
      ++crps_n;
    }
    pred0.push_back(s.forecast_mean[0]);
    actual0.push_back(s.observation[0]);
  }
  if (!records.empty()) {
    add("crps", crps / static_cast<double>(crps_n));
    add("coverage_80", coverage(records, 0.8));
    add("rmse", rmse(pred0, actual0));
    add("mae", mae(pred0, actual0));
  }

  if (log.env == "trading" || log.env == "demo") {
    EquityCurve curve;
    const auto it = log.meta.find("initial_value");
    if (it != log.meta.end()) curve.values.push_back(it->second);
    for (const auto& s : log.steps) {
      curve.values.push_back(s.value);
      curve.turnover_per_step.push_back(s.turnover);
    }
    add("final_value", curve.values.back());
    add("max_drawdown", max_drawdown(curve.values));
    add("turnover", turnover(curve));
    add("positive_days", positive_days(rewards));
    try {
      add("sharpe_daily", sharpe_daily(rewards));
    } catch (const DegenerateSeries&) {
      // constant reward series: no Sharpe row
    }
  } else if (log.env == "inventory") {
    InventoryTrace tr;
    tr.price = log.meta.count("price") ? log.meta.at("price") : 1.0;
    tr.unit_cost = log.meta.count("unit_cost") ? log.meta.at("unit_cost") : 1.0;
    for (const auto& s : log.steps) {
      tr.demand.push_back(s.demand);
      tr.filled.push_back(s.filled);
      tr.on_hand.push_back(s.value);
    }
    add("service_level", service_level(tr));
    add("stockout_rate", stockout_rate(tr));
    try {
      add("gmroi", gmroi(tr));
    } catch (const DegenerateSeries&) {
      // no inventory was ever held
    }
  }
  return rows;
}

void write_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path) {
  auto out = open_out(path);
  out << "model,horizon,metric,value\n";
  for (const auto& r : rows) out << r.model << ',' << r.horizon << ',' << r.metric << ',' << r.value << '\n';
  if (!out) throw IoFailure("write failed", path);
}

std::vector<MetricRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open metrics csv", path);
  std::string line;
  if (!std::getline(in, line) || line != "model,horizon,metric,value")
    throw std::runtime_error("metrics csv: bad header in " + path);
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string model, horizon, metric, value;
    std::getline(ss, model, ',');
    std::getline(ss, horizon, ',');
    std::getline(ss, metric, ',');
    std::getline(ss, value, ',');
    rows.push_back({model, std::stoi(horizon), metric, std::stod(value)});
  }
  return rows;
}

void write_plot_bundle(const EpisodeLog& log, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("cannot create directory", dir);
  const std::string base = dir + "/";
  {
    auto out = open_out(base + "fan_chart.csv");
    out << "t,mean,q05,q25,q50,q75,q95,actual\n";
    const double z90 = normal_quantile(0.95), z50 = normal_quantile(0.75);
    for (const auto& s : log.steps) {
      if (s.forecast_mean.empty()) continue;
      const double m = s.forecast_mean[0], sd = std::sqrt(s.forecast_var[0]);
      out << s.t << ',' << m << ',' << m - z90 * sd << ',' << m - z50 * sd << ',' << m << ',' << m + z50 * sd
          << ',' << m + z90 * sd << ',' << (s.observation.empty() ? 0.0 : s.observation[0]) << '\n';
    }
  }
  {
    auto out = open_out(base + "reliability.csv");
    out << "nominal,empirical\n";
    std::vector<ForecastRecord> records;
    for (const auto& s : log.steps)
      if (!s.forecast_mean.empty() && s.forecast_mean.size() == s.observation.size())
        records.push_back({PredictiveDist::gaussian(s.forecast_mean, s.forecast_var), s.observation, 1});
    if (!records.empty())
      for (int k = 1; k <= 9; ++k) {
        const double level = k / 10.0;
        out << level << ',' << coverage(records, level) << '\n';
      }
  }
  {
    auto out = open_out(base + "entropy.csv");
    out << "t,episode,entropy\n";
    for (const auto& s : log.steps) out << s.t << ',' << s.episode << ',' << s.entropy << '\n';
  }
}

}  // namespace uamdp
