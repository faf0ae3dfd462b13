#include "uamdp/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uamdp {

namespace {

struct WindowStats {
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
};

WindowStats window_stats(std::span<const double> w) {
  WindowStats s;
  const double n = static_cast<double>(w.size());
  for (double v : w) s.mean += v;
  s.mean /= n;
  if (w.size() > 1) {
    double ss = 0.0;
    for (double v : w) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  std::vector<double> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  s.median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  return s;
}

void check_lengths(std::size_t t, std::initializer_list<std::size_t> sizes) {
  for (std::size_t n : sizes)
    if (n <= t) throw std::invalid_argument("feature input shorter than t + 1");
}

}  // namespace

double log_return(double p_prev, double p) { return std::log(p / p_prev); }

double true_range(double high, double low, double p_prev) {
  return std::max(high, p_prev) - std::min(low, p_prev);
}

std::vector<double> ema(std::span<const double> x, std::size_t span) {
  std::vector<double> out;
  if (x.empty()) return out;
  const double alpha = 2.0 / (static_cast<double>(span) + 1.0);
  out.reserve(x.size());
  double e = x[0];
  out.push_back(e);
  for (std::size_t i = 1; i < x.size(); ++i) {
    e += alpha * (x[i] - e);
    out.push_back(e);
  }
  return out;
}

const std::vector<std::string>& trading_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"r", "true_range", "dollar_volume"};
    for (int w : {5, 20, 60}) {
      n.push_back("ret_mean_" + std::to_string(w));
      n.push_back("ret_sd_" + std::to_string(w));
    }
    for (const char* s : {"ema_12", "ema_26", "macd", "macd_signal", "clock_sin", "clock_cos"}) n.push_back(s);
    for (int k = 1; k <= 5; ++k)
      for (const char* s : {"r", "true_range", "dollar_volume"}) n.push_back(std::string(s) + "_lag" + std::to_string(k));
    n.push_back("macd_lag1");
    return n;
  }();
  return names;
}

std::vector<double> features_trading(std::span<const double> prices, std::span<const double> highs,
                                     std::span<const double> lows, std::span<const double> volumes,
                                     std::size_t t) {
  check_lengths(t, {prices.size(), highs.size(), lows.size(), volumes.size()});
  if (t < kTradingWarmup) throw WarmupInsufficient(t, kTradingWarmup);
  auto r = [&](std::size_t i) { return log_return(prices[i - 1], prices[i]); };
  auto tr = [&](std::size_t i) { return true_range(highs[i], lows[i], prices[i - 1]); };
  auto dv = [&](std::size_t i) { return volumes[i] * prices[i]; };

  std::vector<double> f;
  f.reserve(trading_feature_names().size());
  f.push_back(r(t));
  f.push_back(tr(t));
  f.push_back(dv(t));
  for (std::size_t w : {5u, 20u, 60u}) {
    std::vector<double> rets;
    for (std::size_t i = t + 1 - w; i <= t; ++i) rets.push_back(r(i));
    const auto s = window_stats(rets);
    f.push_back(s.mean);
    f.push_back(s.sd);
  }
  const auto head = prices.subspan(0, t + 1);
  const auto e12 = ema(head, 12);
  const auto e26 = ema(head, 26);
  std::vector<double> macd(t + 1);
  for (std::size_t i = 0; i <= t; ++i) macd[i] = e12[i] - e26[i];
  const auto signal = ema(macd, 9);
  f.push_back(e12[t]);
  f.push_back(e26[t]);
  f.push_back(macd[t]);
  f.push_back(signal[t]);
  const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 252.0;
  f.push_back(std::sin(phase));
  f.push_back(std::cos(phase));
  for (std::size_t k = 1; k <= 5; ++k) {
    f.push_back(r(t - k));
    f.push_back(tr(t - k));
    f.push_back(dv(t - k));
  }
  f.push_back(macd[t - 1]);
  return f;
}

const std::vector<std::string>& inventory_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"demand_growth", "price_change", "promo"};
    for (int w : {7, 28}) {
      n.push_back("demand_mean_" + std::to_string(w));
      n.push_back("demand_median_" + std::to_string(w));
      n.push_back("demand_sd_" + std::to_string(w));
    }
    for (const char* s : {"log_demand_ewma_14", "week_sin", "week_cos"}) n.push_back(s);
    for (int k = 1; k <= 4; ++k) n.push_back("demand_lag" + std::to_string(k));
    n.push_back("stockout_yesterday");
    return n;
  }();
  return names;
}

std::vector<double> features_inventory(std::span<const double> demand, std::span<const double> prices,
                                       std::span<const double> backorders, std::size_t t) {
  check_lengths(t, {demand.size(), prices.size(), backorders.size()});
  if (t < kInventoryWarmup) throw WarmupInsufficient(t, kInventoryWarmup);
  std::vector<double> f;
  f.reserve(inventory_feature_names().size());
  f.push_back(std::log(1.0 + demand[t]) - std::log(1.0 + demand[t - 1]));
  f.push_back((prices[t] - prices[t - 1]) / prices[t - 1]);
  const auto p7 = window_stats(prices.subspan(t - 6, 7));
  f.push_back(prices[t] < p7.median ? 1.0 : 0.0);
  for (std::size_t w : {7u, 28u}) {
    const auto s = window_stats(demand.subspan(t + 1 - w, w));
    f.push_back(s.mean);
    f.push_back(s.median);
    f.push_back(s.sd);
  }
  std::vector<double> logd(t + 1);
  for (std::size_t i = 0; i <= t; ++i) logd[i] = std::log(1.0 + demand[i]);
  f.push_back(ema(logd, 14)[t]);
  const double week = static_cast<double>((t / 7) % 52);
  const double phase = 2.0 * std::numbers::pi * week / 52.0;
  f.push_back(std::sin(phase));
  f.push_back(std::cos(phase));
  for (std::size_t k = 1; k <= 4; ++k) f.push_back(demand[t - k]);
  f.push_back(demand[t - 1] == 0.0 && backorders[t - 1] > 0.0 ? 1.0 : 0.0);
  return f;
}

void ZScoreScaler::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("scaler: no training rows");
  const std::size_t d = rows.front().size();
  mean_.assign(d, 0.0);
  scale_.assign(d, 1.0);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("scaler: ragged rows");
    for (std::size_t j = 0; j < d; ++j) mean_[j] += r[j];
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : mean_) m /= n;
  if (rows.size() < 2) return;
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - mean_[j]) * (r[j] - mean_[j]);
    const double sd = std::sqrt(ss / (n - 1.0));
    scale_[j] = sd > 0.0 ? sd : 1.0;
  }
}

std::vector<double> ZScoreScaler::transform(std::span<const double> row) const {
  if (row.size() != mean_.size()) throw std::invalid_argument("scaler: dimension mismatch");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean_[j]) / scale_[j];
  return out;
}

}  // namespace uamdp
