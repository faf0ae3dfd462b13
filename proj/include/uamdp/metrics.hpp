#pragma once

// Point, probabilistic, trading and inventory evaluation metrics.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "uamdp/forecaster.hpp"
#include "uamdp/stats.hpp"

namespace uamdp {

class DegenerateSeries : public std::runtime_error {
 public:
  explicit DegenerateSeries(const std::string& what) : std::runtime_error(what) {}
};

double rmse(std::span<const double> pred, std::span<const double> actual);
double mae(std::span<const double> pred, std::span<const double> actual);
// Symmetric 0-200% form; index pairs with both values zero contribute 0.
double smape(std::span<const double> pred, std::span<const double> actual);

double crps_gaussian(double mu, double sigma, double y);
// mean|X - y| - 0.5 mean|X - X'| over all ordered pairs, via the sorted form.
double crps_empirical(std::span<const double> samples, double y);

struct ForecastRecord {
  PredictiveDist predicted;
  Observation actual;
  int horizon = 1;
};

// Fraction of (record, dimension) pairs inside the central Gaussian interval
// mean -/+ z_{(1+level)/2} sd.
double coverage(std::span<const ForecastRecord> records, double level);

// PIT values u = Phi((y - mean) / sd) for every (record, dimension) pair.
std::vector<double> pit_values(std::span<const ForecastRecord> records);
KsResult pit_ks(std::span<const ForecastRecord> records);

struct EquityCurve {
  std::vector<double> values;             // portfolio value per step
  std::vector<double> turnover_per_step;  // L1 weight change / 2 per step

  std::vector<double> returns() const;  // log-returns, length values - 1
};

// mean / sample sd of daily log-returns, zero risk-free rate.
double sharpe_daily(std::span<const double> returns);
double max_drawdown(std::span<const double> values);
double turnover(const EquityCurve& curve);
double positive_days(std::span<const double> returns);

struct InventoryTrace {
  std::vector<double> demand;
  std::vector<double> filled;
  std::vector<double> on_hand;  // end-of-period units
  double unit_cost = 1.0;
  double price = 1.0;
};

double service_level(const InventoryTrace& trace);
double stockout_rate(const InventoryTrace& trace);
// Gross margin over mean end-of-period inventory valued at cost.
double gmroi(const InventoryTrace& trace);

}  // namespace uamdp
