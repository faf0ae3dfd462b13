#pragma once

// Single-item inventory with lost sales and a synthetic seasonal demand process.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uamdp/planner.hpp"
#include "uamdp/trading.hpp"

namespace uamdp {

struct InventoryState {
  long on_hand = 0;
  long backorders = 0;  // demand left unfilled in the last period
  double price = 10.0;
  double unit_cost = 6.0;
  double holding_cost = 0.1;       // per unit held at period end
  double stockout_penalty = 50.0;  // per unit of unmet demand
  std::size_t t = 0;
};

struct InventoryStepResult {
  InventoryState next;
  double reward = 0.0;
  long sold = 0;
  long unmet = 0;
};

InventoryStepResult inventory_step(const InventoryState& st, long order_qty, long demand);

// {0, step, 2 step, ..., qmax}.
std::vector<long> order_grid(long step, long qmax);

// Demand regimes carry params (mean, promo lift, season amplitude).
struct DemandConfig {
  double base_price = 10.0;
  double promo_discount = 0.2;  // promo price = base * (1 - discount)
  double promo_prob = 0.15;
  double season_period = 365.0;
};

// lambda_t = mean * (1 + amplitude sin(2 pi t / period)) * (promo ? lift : 1), floored at 0.
double demand_rate(const LatentParam& theta, std::size_t t, bool promo, const DemandConfig& cfg);

struct DemandPath {
  std::vector<long> demand;
  std::vector<double> price;
  std::vector<int> promo;
  std::vector<std::size_t> regime;
  std::size_t size() const { return demand.size(); }
};

DemandPath generate_demand(const RegimeModel& model, std::size_t length, std::uint64_t rng_seed,
                           const DemandConfig& cfg = {});
void write_demand_csv(const DemandPath& path, const std::string& file);

RegimeModel two_regime_demand(double switch_prob = 0.02);

class InventoryModel {
 public:
  using State = InventoryState;
  InventoryModel(std::vector<long> orders, DemandConfig cfg) : orders_(std::move(orders)), cfg_(cfg) {}

  std::size_t num_actions() const { return orders_.size(); }
  long order(std::size_t i) const { return orders_.at(i); }
  Step<State> step(const State& st, std::size_t a, const LatentParam& theta, Rng& rng) const;
  std::vector<double> observe(const State& st) const { return {static_cast<double>(st.on_hand)}; }

 private:
  std::vector<long> orders_;
  DemandConfig cfg_;
};

}  // namespace uamdp
