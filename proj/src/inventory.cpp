#include "uamdp/inventory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace uamdp {

InventoryStepResult inventory_step(const InventoryState& st, long order_qty, long demand) {
  if (order_qty < 0 || demand < 0) throw std::invalid_argument("order and demand must be >= 0");
  if (st.on_hand < 0) throw std::invalid_argument("on_hand must be >= 0");
  InventoryStepResult out;
  const long available = st.on_hand + order_qty;
  out.sold = std::min(available, demand);
  out.unmet = demand - out.sold;
  out.next = st;
  out.next.on_hand = available - out.sold;
  out.next.backorders = out.unmet;
  out.next.t = st.t + 1;
  out.reward = static_cast<double>(out.sold) * (st.price - st.unit_cost) -
               st.holding_cost * static_cast<double>(out.next.on_hand) -
               st.stockout_penalty * static_cast<double>(out.unmet);
  return out;
}

std::vector<long> order_grid(long step, long qmax) {
  if (step <= 0 || qmax < 0) throw std::invalid_argument("order grid needs step > 0 and qmax >= 0");
  std::vector<long> g;
  for (long q = 0; q <= qmax; q += step) g.push_back(q);
  return g;
}

double demand_rate(const LatentParam& theta, std::size_t t, bool promo, const DemandConfig& cfg) {
  const auto& p = theta.params;
  if (p.size() < 3) throw std::invalid_argument("demand theta needs 3 parameters");
  const double season = 1.0 + p[2] * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / cfg.season_period);
  return std::max(0.0, p[0] * season * (promo ? p[1] : 1.0));
}

DemandPath generate_demand(const RegimeModel& model, std::size_t length, std::uint64_t rng_seed,
                           const DemandConfig& cfg) {
  model.validate(3);
  DemandPath path;
  Rng rng(rng_seed);
  const std::size_t n_regimes = model.regimes.size();
  std::size_t regime = std::uniform_int_distribution<std::size_t>(0, n_regimes - 1)(rng);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0 && n_regimes > 1 && uniform01(rng) < model.switch_prob) {
      const std::size_t shift = std::uniform_int_distribution<std::size_t>(1, n_regimes - 1)(rng);
      regime = (regime + shift) % n_regimes;
    }
    const bool promo = uniform01(rng) < cfg.promo_prob;
    const double lambda = demand_rate(model.regimes[regime], t, promo, cfg);
    const long d = lambda > 0.0 ? std::poisson_distribution<long>(lambda)(rng) : 0;
    path.demand.push_back(d);
    path.price.push_back(promo ? cfg.base_price * (1.0 - cfg.promo_discount) : cfg.base_price);
    path.promo.push_back(promo ? 1 : 0);
    path.regime.push_back(regime);
  }
  return path;
}

void write_demand_csv(const DemandPath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write demand csv: " + file);
  out.precision(17);
  out << "t,demand,price,promo,regime\n";
  for (std::size_t t = 0; t < path.size(); ++t)
    out << t << ',' << path.demand[t] << ',' << path.price[t] << ',' << path.promo[t] << ',' << path.regime[t] << '\n';
}

RegimeModel two_regime_demand(double switch_prob) {
  RegimeModel m;
  m.regimes = {LatentParam{"steady", {12.0, 1.5, 0.2}}, LatentParam{"surge", {25.0, 1.8, 0.3}}};
  m.switch_prob = switch_prob;
  return m;
}

Step<InventoryState> InventoryModel::step(const State& st, std::size_t a, const LatentParam& theta,
                                          Rng& rng) const {
  const bool promo = uniform01(rng) < cfg_.promo_prob;
  const double lambda = demand_rate(theta, st.t, promo, cfg_);
  const long d = lambda > 0.0 ? std::poisson_distribution<long>(lambda)(rng) : 0;
  auto res = inventory_step(st, orders_.at(a), d);
  return {std::move(res.next), res.reward, false};
}

}  // namespace uamdp
