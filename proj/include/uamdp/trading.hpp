#pragma once

// Synthetic regime-switching market and the portfolio accounting used by the
// trading environment. Assets are (cash, index, bond); cash earns nothing.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uamdp/belief.hpp"
#include "uamdp/planner.hpp"

namespace uamdp {

using Allocation = std::array<double, 3>;  // cash, index, bond

struct TradingState {
  std::array<double, 2> prices{100.0, 100.0};  // index, bond
  Allocation weights{1.0, 0.0, 0.0};           // current (drifted) weights
  Allocation target{1.0, 0.0, 0.0};            // allocation last traded to
  double value = 100.0;
  double cost_rate = 0.0002;
  std::size_t t = 0;
};

struct TradingStepResult {
  TradingState next;
  double reward = 0.0;    // log(V_{t+1} / V_t)
  double turnover = 0.0;  // L1 weight change / 2
  double cost = 0.0;
};

// Choosing the allocation already targeted is a hold: no rebalancing and the
// weights drift with prices. Any other allocation rebalances from the drifted
// weights at cost cost_rate * turnover * V_t.
TradingStepResult trading_step(const TradingState& st, const Allocation& a,
                               const std::array<double, 2>& log_returns);

// All allocations on a grid of `step` (1.0 gives the pure cash/index/bond set).
std::vector<Allocation> allocation_grid(double step);
std::string allocation_label(const Allocation& a);

// Regime hypotheses. Trading regimes carry params
// (index drift, index sd, bond drift, bond sd) of per-step log-returns.
struct RegimeModel {
  std::vector<LatentParam> regimes;
  double switch_prob = 0.0;  // per step; a switch picks another regime uniformly

  void validate(std::size_t n_params) const;
};

RegimeModel two_regime_market(double switch_prob = 0.02);

struct MarketPath {
  std::vector<double> index_price;
  std::vector<double> bond_price;
  std::vector<double> high;
  std::vector<double> low;
  std::vector<double> volume;
  std::vector<std::array<double, 2>> log_returns;  // [t-1] is the move into t
  std::vector<std::size_t> regime;                 // [t-1] regime generating that move
  std::size_t size() const { return index_price.size(); }
};

// Geometric random walk with regime-dependent drift/volatility, starting at
// 100; the initial regime is drawn uniformly. Deterministic given the seed.
MarketPath generate_market(const RegimeModel& model, std::size_t length, std::uint64_t rng_seed);
void write_market_csv(const MarketPath& path, const std::string& file);

// Planning model: per-step returns drawn from the regime in theta.
class TradingModel {
 public:
  using State = TradingState;
  explicit TradingModel(std::vector<Allocation> actions) : actions_(std::move(actions)) {}

  std::size_t num_actions() const { return actions_.size(); }
  const Allocation& action(std::size_t i) const { return actions_.at(i); }
  const std::vector<Allocation>& actions() const { return actions_; }
  Step<State> step(const State& st, std::size_t a, const LatentParam& theta, Rng& rng) const;
  std::vector<double> observe(const State& st) const { return {st.value}; }

 private:
  std::vector<Allocation> actions_;
};

}  // namespace uamdp
