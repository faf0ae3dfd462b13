#include "uamdp/trading.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uamdp {

namespace {

void check_allocation(const Allocation& a) {
  double sum = 0.0;
  for (double w : a) {
    if (!(w >= 0.0)) throw std::invalid_argument("allocation weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("allocation weights must sum to 1");
}

}  // namespace

TradingStepResult trading_step(const TradingState& st, const Allocation& a,
                               const std::array<double, 2>& log_returns) {
  check_allocation(a);
  if (!(st.value > 0.0)) throw std::invalid_argument("portfolio value must be positive");
  TradingStepResult out;
  const bool hold = a == st.target;
  const Allocation& w = hold ? st.weights : a;
  if (!hold) {
    for (std::size_t i = 0; i < 3; ++i) out.turnover += std::abs(a[i] - st.weights[i]);
    out.turnover *= 0.5;
    out.cost = st.cost_rate * out.turnover * st.value;
  }
  const std::array<double, 3> growth{1.0, std::exp(log_returns[0]), std::exp(log_returns[1])};
  double gross = 0.0;
  for (std::size_t i = 0; i < 3; ++i) gross += w[i] * growth[i];
  out.next = st;
  out.next.value = st.value * gross - out.cost;
  out.next.prices = {st.prices[0] * growth[1], st.prices[1] * growth[2]};
  for (std::size_t i = 0; i < 3; ++i) out.next.weights[i] = w[i] * growth[i] / gross;
  out.next.target = a;
  out.next.t = st.t + 1;
  out.reward = std::log(out.next.value / st.value);
  return out;
}

std::vector<Allocation> allocation_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("allocation step must lie in (0,1]");
  const auto k = static_cast<int>(std::lround(1.0 / step));
  if (std::abs(k * step - 1.0) > 1e-9) throw std::invalid_argument("allocation step must divide 1");
  std::vector<Allocation> grid;
  for (int bond = 0; bond <= k; ++bond)
    for (int index = 0; index + bond <= k; ++index) {
      const double wi = static_cast<double>(index) / k;
      const double wb = static_cast<double>(bond) / k;
      grid.push_back({static_cast<double>(k - index - bond) / k, wi, wb});
    }
  return grid;
}

std::string allocation_label(const Allocation& a) {
  if (a[0] == 1.0) return "cash";
  if (a[1] == 1.0) return "index";
  if (a[2] == 1.0) return "bond";
  char buf[64];
  std::snprintf(buf, sizeof buf, "c%.2f/i%.2f/b%.2f", a[0], a[1], a[2]);
  return buf;
}

void RegimeModel::validate(std::size_t n_params) const {
  if (regimes.empty()) throw std::invalid_argument("regime model needs at least one regime");
  if (!(switch_prob >= 0.0 && switch_prob <= 1.0)) throw std::invalid_argument("switch_prob must lie in [0,1]");
  for (const auto& r : regimes)
    if (r.params.size() != n_params) throw std::invalid_argument("regime " + r.id + ": wrong parameter count");
}

RegimeModel two_regime_market(double switch_prob) {
  RegimeModel m;
  m.regimes = {LatentParam{"bull", {0.003, 0.012, 0.0008, 0.001}},
               LatentParam{"bear", {-0.004, 0.02, -0.001, 0.003}}};
  m.switch_prob = switch_prob;
  return m;
}

MarketPath generate_market(const RegimeModel& model, std::size_t length, std::uint64_t rng_seed) {
  model.validate(4);
  for (const auto& r : model.regimes)
    if (r.params[1] < 0.0 || r.params[3] < 0.0) throw std::invalid_argument("volatility must be >= 0");
  MarketPath path;
  if (length == 0) return path;
  Rng rng(rng_seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t n_regimes = model.regimes.size();
  std::size_t regime = std::uniform_int_distribution<std::size_t>(0, n_regimes - 1)(rng);
  path.index_price.push_back(100.0);
  path.bond_price.push_back(100.0);
  path.high.push_back(100.0);
  path.low.push_back(100.0);
  path.volume.push_back(1e6);
  for (std::size_t t = 1; t < length; ++t) {
    if (n_regimes > 1 && uniform01(rng) < model.switch_prob) {
      const std::size_t shift = std::uniform_int_distribution<std::size_t>(1, n_regimes - 1)(rng);
      regime = (regime + shift) % n_regimes;
    }
    const auto& p = model.regimes[regime].params;
    const double ri = p[0] + p[1] * z(rng);
    const double rb = p[2] + p[3] * z(rng);
    const double prev = path.index_price.back();
    const double price = prev * std::exp(ri);
    const double wick_hi = std::exp(0.25 * p[1] * std::abs(z(rng)));
    const double wick_lo = std::exp(-0.25 * p[1] * std::abs(z(rng)));
    path.index_price.push_back(price);
    path.bond_price.push_back(path.bond_price.back() * std::exp(rb));
    path.high.push_back(std::max(prev, price) * wick_hi);
    path.low.push_back(std::min(prev, price) * wick_lo);
    path.volume.push_back(1e6 * std::exp(0.3 * z(rng)));
    path.log_returns.push_back({ri, rb});
    path.regime.push_back(regime);
  }
  return path;
}

void write_market_csv(const MarketPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write market csv: " + file);
  out.precision(17);
  out << "t,price,bond,high,low,volume,regime\n";
  for (std::size_t t = 0; t < path.size(); ++t) {
    out << t << ',' << path.index_price[t] << ',' << path.bond_price[t] << ',' << path.high[t] << ','
        << path.low[t] << ',' << path.volume[t] << ',';
    if (t > 0) out << path.regime[t - 1];
    out << '\n';
  }
}

Step<TradingState> TradingModel::step(const State& st, std::size_t a, const LatentParam& theta,
                                      Rng& rng) const {
  const auto& p = theta.params;
  if (p.size() < 4) throw std::invalid_argument("trading theta needs 4 parameters");
  std::normal_distribution<double> z(0.0, 1.0);
  const double ri = p[1] > 0.0 ? p[0] + p[1] * z(rng) : p[0];
  const double rb = p[3] > 0.0 ? p[2] + p[3] * z(rng) : p[2];
  auto res = trading_step(st, actions_.at(a), {ri, rb});
  return {std::move(res.next), res.reward, false};
}

}  // namespace uamdp
