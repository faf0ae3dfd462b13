#pragma once

// Episode logs, metric tables and plot-data files.

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace uamdp {

class IoFailure : public std::runtime_error {
 public:
  IoFailure(const std::string& what, const std::string& path)
      : std::runtime_error(what + ": " + path), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct StepRecord {
  std::size_t t = 0;
  std::size_t episode = 0;
  std::string theta_id;  // parameter draw used for this episode
  std::size_t action = 0;
  std::string action_label;
  double reward = 0.0;
  double value = 0.0;     // portfolio value, on-hand units or state index after the step
  double turnover = 0.0;  // trading only
  double demand = 0.0;    // inventory only
  double filled = 0.0;    // inventory only
  double entropy = 0.0;   // belief entropy at decision time
  std::vector<double> belief;  // id-marginal at decision time, support order
  std::vector<double> root_values;
  std::vector<double> root_cvar;
  std::vector<std::size_t> visits;
  std::size_t excluded = 0;  // root actions removed by the chance constraint
  bool infeasible = false;   // every root action was excluded
  bool belief_reset = false;
  std::vector<double> forecast_mean;  // one-step predictive moments at decision time
  std::vector<double> forecast_var;
  std::vector<double> observation;  // x_{t+1}
};

struct EpisodeLog {
  std::string env;
  std::string model = "uamdp";
  std::uint64_t seed = 0;
  std::vector<std::string> support;
  std::map<std::string, double> meta;  // e.g. initial_value, price, unit_cost
  std::vector<StepRecord> steps;
};

struct MetricRow {
  std::string model;
  int horizon = 1;
  std::string metric;
  double value = 0.0;

  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

nlohmann::json to_json(const StepRecord& r);
StepRecord step_record_from_json(const nlohmann::json& j);

// One header line {"type":"run",...} followed by one {"type":"step",...} line per step.
std::string episode_log_jsonl(const EpisodeLog& log);
void write_episode_log_jsonl(const EpisodeLog& log, const std::string& path);
EpisodeLog read_episode_log_jsonl(const std::string& path);
EpisodeLog parse_episode_log_jsonl(const std::string& text);

// Metrics recomputed from a log alone. Empty logs give no rows.
std::vector<MetricRow> compute_log_metrics(const EpisodeLog& log);

// CSV columns: model,horizon,metric,value.
void write_metrics_csv(const std::vector<MetricRow>& rows, const std::string& path);
std::vector<MetricRow> read_metrics_csv(const std::string& path);

// fan_chart.csv, reliability.csv and entropy.csv in `dir`.
void write_plot_bundle(const EpisodeLog& log, const std::string& dir);

// Realized CVaR of per-step rewards at level alpha.
double realized_cvar(const EpisodeLog& log, double alpha);
double mean_reward(const EpisodeLog& log);

}  // namespace uamdp
