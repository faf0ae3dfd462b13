#include "uamdp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace uamdp {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument(std::string(what) + ": inputs must be non-empty and equal length");
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual, "rmse");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - actual[i]);
  return s / static_cast<double>(pred.size());
}

double smape(std::span<const double> pred, std::span<const double> actual) {
  check_pair(pred, actual, "smape");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double denom = std::abs(pred[i]) + std::abs(actual[i]);
    if (denom > 0.0) s += 2.0 * std::abs(pred[i] - actual[i]) / denom;
  }
  return 100.0 * s / static_cast<double>(pred.size());
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("crps_gaussian: sigma must be > 0");
  const double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
}

double crps_empirical(std::span<const double> samples, double y) {
  if (samples.empty()) throw std::invalid_argument("crps_empirical: empty sample set");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double m = static_cast<double>(s.size());
  double abs_dev = 0.0;
  double spread = 0.0;  // sum over i of (2i - m - 1) x_(i), 1-based
  for (std::size_t i = 0; i < s.size(); ++i) {
    abs_dev += std::abs(s[i] - y);
    spread += (2.0 * static_cast<double>(i + 1) - m - 1.0) * s[i];
  }
  return abs_dev / m - spread / (m * m);
}

double coverage(std::span<const ForecastRecord> records, double level) {
  if (records.empty()) throw std::invalid_argument("coverage: no records");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("coverage: level must lie in (0,1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  std::size_t inside = 0, total = 0;
  for (const auto& r : records) {
    const auto& m = r.predicted.means();
    const auto& v = r.predicted.variances();
    if (r.actual.size() != m.size()) throw std::invalid_argument("coverage: dimension mismatch");
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double half = z * std::sqrt(v[j]);
      if (r.actual[j] >= m[j] - half && r.actual[j] <= m[j] + half) ++inside;
      ++total;
    }
  }
  return static_cast<double>(inside) / static_cast<double>(total);
}

std::vector<double> pit_values(std::span<const ForecastRecord> records) {
  std::vector<double> u;
  for (const auto& r : records) {
    const auto& m = r.predicted.means();
    const auto& v = r.predicted.variances();
    if (r.actual.size() != m.size()) throw std::invalid_argument("pit: dimension mismatch");
    for (std::size_t j = 0; j < m.size(); ++j) u.push_back(normal_cdf((r.actual[j] - m[j]) / std::sqrt(v[j])));
  }
  return u;
}

KsResult pit_ks(std::span<const ForecastRecord> records) {
  if (records.size() < 5) throw std::invalid_argument("pit_ks: needs at least 5 records");
  const auto u = pit_values(records);
  return ks_uniform(u);
}

std::vector<double> EquityCurve::returns() const {
  std::vector<double> r;
  for (std::size_t i = 1; i < values.size(); ++i) r.push_back(std::log(values[i] / values[i - 1]));
  return r;
}

double sharpe_daily(std::span<const double> returns) {
  if (returns.size() < 2) throw DegenerateSeries("sharpe_daily: needs at least 2 returns");
  const Summary s = summarize(returns);
  if (!(s.sd > 0.0)) throw DegenerateSeries("sharpe_daily: zero standard deviation");
  return s.mean / s.sd;
}

double max_drawdown(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("max_drawdown: empty curve");
  double peak = values[0];
  double worst = 0.0;
  for (double v : values) {
    peak = std::max(peak, v);
    worst = std::min(worst, v / peak - 1.0);
  }
  return worst;
}

double turnover(const EquityCurve& curve) {
  if (curve.turnover_per_step.empty()) return 0.0;
  return mean_of(curve.turnover_per_step);
}

double positive_days(std::span<const double> returns) {
  if (returns.empty()) throw std::invalid_argument("positive_days: empty series");
  const auto pos = std::count_if(returns.begin(), returns.end(), [](double r) { return r > 0.0; });
  return static_cast<double>(pos) / static_cast<double>(returns.size());
}

double service_level(const InventoryTrace& trace) {
  if (trace.demand.empty()) throw std::invalid_argument("service_level: empty trace");
  const double d = std::accumulate(trace.demand.begin(), trace.demand.end(), 0.0);
  if (d == 0.0) return 1.0;
  return std::accumulate(trace.filled.begin(), trace.filled.end(), 0.0) / d;
}

double stockout_rate(const InventoryTrace& trace) {
  if (trace.demand.empty()) throw std::invalid_argument("stockout_rate: empty trace");
  double unmet = 0.0;
  for (std::size_t i = 0; i < trace.demand.size(); ++i) unmet += trace.demand[i] - trace.filled[i];
  return unmet / static_cast<double>(trace.demand.size());
}

double gmroi(const InventoryTrace& trace) {
  if (trace.demand.empty()) throw std::invalid_argument("gmroi: empty trace");
  const double margin = (trace.price - trace.unit_cost) *
                        std::accumulate(trace.filled.begin(), trace.filled.end(), 0.0);
  const double avg_cost = trace.unit_cost * mean_of(trace.on_hand);
  if (!(avg_cost > 0.0)) throw DegenerateSeries("gmroi: zero mean inventory");
  return margin / avg_cost;
}

}  // namespace uamdp
