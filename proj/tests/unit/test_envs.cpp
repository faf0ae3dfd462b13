#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "uamdp/finite_mdp.hpp"
#include "uamdp/hyperstate.hpp"
#include "uamdp/inventory.hpp"
#include "uamdp/trading.hpp"

using namespace uamdp;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double standard_error(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1) / v.size());
}

}  // namespace

TEST(TradingStep, NoTradeZeroReturn) {
  TradingState st;
  st.weights = st.target = {0.5, 0.5, 0.0};
  const auto r = trading_step(st, st.target, {0.0, 0.0});
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_EQ(r.next.value, st.value);
  EXPECT_EQ(r.turnover, 0.0);
}

TEST(TradingStep, DemoPathWithoutCosts) {
  TradingState st;
  st.cost_rate = 0.0;
  st.weights = st.target = {0.5, 0.5, 0.0};
  const auto r1 = trading_step(st, {0.2, 0.8, 0.0}, {std::log(102.0 / 100.0), 0.0});
  const auto r2 = trading_step(r1.next, {0.2, 0.8, 0.0}, {std::log(101.5 / 102.0), 0.0});
  // 80 units of value bought at 100 become 80 * 101.5 / 100; cash stays 20.
  EXPECT_NEAR(r2.next.value, 0.8 * 101.5 + 0.2 * 100.0, 1e-12);
  EXPECT_NEAR(r2.next.value, 101.2, 1e-12);
  EXPECT_EQ(r2.turnover, 0.0);
}

TEST(TradingStep, FullSwitchCost) {
  TradingState st;
  const auto r = trading_step(st, {0.0, 1.0, 0.0}, {0.0, 0.0});
  EXPECT_NEAR(r.reward, std::log(1.0 - 0.0002), 1e-15);
  EXPECT_NEAR(r.reward, -2.0002e-4, 1e-8);
  EXPECT_EQ(r.turnover, 1.0);
}

TEST(TradingStepProperty, WeightsStayOnSimplex) {
  Rng rng(2);
  TradingState st;
  const auto grid = allocation_grid(0.1);
  for (int i = 0; i < 500; ++i) {
    const auto& a = grid[static_cast<std::size_t>(uniform01(rng) * grid.size()) % grid.size()];
    st = trading_step(st, a, {0.05 * (uniform01(rng) - 0.5), 0.01 * (uniform01(rng) - 0.5)}).next;
    EXPECT_NEAR(st.weights[0] + st.weights[1] + st.weights[2], 1.0, 1e-12);
    for (double w : st.weights) EXPECT_GE(w, 0.0);
    EXPECT_GT(st.value, 0.0);
  }
}

TEST(AllocationGrid, Sizes) {
  EXPECT_EQ(allocation_grid(1.0).size(), 3u);
  EXPECT_EQ(allocation_grid(0.5).size(), 6u);
  EXPECT_EQ(allocation_grid(0.1).size(), 66u);
}

TEST(InventoryStep, Idle) {
  InventoryState st;
  EXPECT_EQ(inventory_step(st, 0, 0).reward, 0.0);
}

TEST(InventoryStep, StockoutPenalty) {
  InventoryState st;
  st.on_hand = 10;
  const auto r = inventory_step(st, 0, 15);
  EXPECT_NEAR(r.reward, 10 * 4.0 - 0.0 - 50.0 * 5, 1e-12);
  EXPECT_NEAR(r.reward, -210.0, 1e-12);
  EXPECT_EQ(r.next.on_hand, 0);
  EXPECT_EQ(r.unmet, 5);
  EXPECT_EQ(r.next.backorders, 5);
}

TEST(InventoryStep, ExactMatch) {
  InventoryState st;
  st.on_hand = 3;
  const auto r = inventory_step(st, 4, 7);
  EXPECT_NEAR(r.reward, 7 * 4.0, 1e-12);
  EXPECT_EQ(r.next.on_hand, 0);
}

TEST(InventoryStepProperty, Conservation) {
  Rng rng(6);
  InventoryState st;
  for (int i = 0; i < 1000; ++i) {
    const long order = static_cast<long>(uniform01(rng) * 20);
    const long demand = static_cast<long>(uniform01(rng) * 25);
    const long available = st.on_hand + order;
    const auto r = inventory_step(st, order, demand);
    EXPECT_GE(r.next.on_hand, 0);
    EXPECT_LE(r.sold, demand);
    EXPECT_LE(r.sold, available);
    EXPECT_EQ(r.next.on_hand, available - r.sold);
    st = r.next;
  }
}

TEST(OrderGrid, Values) {
  EXPECT_EQ(order_grid(5, 15), (std::vector<long>{0, 5, 10, 15}));
}

TEST(GenerateMarket, ZeroVolatilityConstant) {
  RegimeModel m;
  m.regimes = {LatentParam{"flat", {0.0, 0.0, 0.0, 0.0}}};
  const auto path = generate_market(m, 50, 1);
  for (double p : path.index_price) EXPECT_EQ(p, 100.0);
  for (double p : path.bond_price) EXPECT_EQ(p, 100.0);
}

TEST(GenerateMarket, DriftMoment) {
  RegimeModel m;
  m.regimes = {LatentParam{"one", {0.001, 0.01, 0.0, 0.001}}};
  const auto path = generate_market(m, 100001, 7);
  std::vector<double> r;
  for (const auto& lr : path.log_returns) r.push_back(lr[0]);
  EXPECT_EQ(r.size(), 100000u);
  EXPECT_NEAR(mean_of(r), 0.001, 3.0 * standard_error(r));
}

TEST(GenerateMarket, NoSwitchConstantLabel) {
  auto m = two_regime_market(0.0);
  const auto path = generate_market(m, 300, 3);
  for (auto g : path.regime) EXPECT_EQ(g, path.regime.front());
}

TEST(GenerateMarket, SameSeedSamePath) {
  const auto m = two_regime_market(0.05);
  const auto a = generate_market(m, 200, 11);
  const auto b = generate_market(m, 200, 11);
  EXPECT_EQ(a.index_price, b.index_price);
  EXPECT_EQ(a.regime, b.regime);
  EXPECT_NE(generate_market(m, 200, 12).index_price, a.index_price);
}

TEST(GenerateDemand, PoissonMean) {
  RegimeModel m;
  m.regimes = {LatentParam{"flat", {8.0, 1.0, 0.0}}};
  const auto path = generate_demand(m, 20000, 4);
  std::vector<double> d(path.demand.begin(), path.demand.end());
  EXPECT_NEAR(mean_of(d), 8.0, 3.0 * std::sqrt(8.0 / d.size()));
}

TEST(GenerateDemand, ZeroMean) {
  RegimeModel m;
  m.regimes = {LatentParam{"none", {0.0, 1.5, 0.3}}};
  for (long q : generate_demand(m, 500, 5).demand) EXPECT_EQ(q, 0);
}

TEST(GenerateDemand, PromoAlwaysOnDoublesMean) {
  RegimeModel m;
  m.regimes = {LatentParam{"promo", {6.0, 2.0, 0.0}}};
  DemandConfig cfg;
  cfg.promo_prob = 1.0;
  const auto path = generate_demand(m, 20000, 8, cfg);
  std::vector<double> d(path.demand.begin(), path.demand.end());
  EXPECT_NEAR(mean_of(d), 12.0, 3.0 * std::sqrt(12.0 / d.size()));
  for (double p : path.price) EXPECT_NEAR(p, 8.0, 1e-12);
}

TEST(GenerateDemand, SameSeedSamePath) {
  const auto m = two_regime_demand();
  EXPECT_EQ(generate_demand(m, 100, 1).demand, generate_demand(m, 100, 1).demand);
}

TEST(DemandRate, Formula) {
  const LatentParam th{"x", {10.0, 1.5, 0.2}};
  DemandConfig cfg;
  cfg.season_period = 4.0;
  EXPECT_NEAR(demand_rate(th, 1, false, cfg), 10.0 * 1.2, 1e-12);
  EXPECT_NEAR(demand_rate(th, 1, true, cfg), 10.0 * 1.2 * 1.5, 1e-12);
}

TEST(HyperstateTransition, ExtendsHistory) {
  const HyperState h0(Belief::uniform({{"a", {}}, {"b", {}}}));
  const auto h1 = hyperstate_transition(h0, 1, {0.5}, std::vector<double>{1.0, 1.0});
  EXPECT_EQ(h1.history.size(), 1u);
  EXPECT_EQ(h1.past_actions, (std::vector<std::size_t>{1}));
  EXPECT_EQ(h1.t, 1u);
  EXPECT_NEAR(h1.belief.weights()[0], 0.5, 1e-15);
}

TEST(HyperstateTransition, SequentialEqualsBatched) {
  const HyperState h0(Belief({{"a", {}}, {"b", {}}, {"c", {}}}, {0.2, 0.3, 0.5}));
  const std::vector<double> l1{0.1, 0.5, 0.9}, l2{0.7, 0.2, 0.4};
  const auto h2 = hyperstate_transition(hyperstate_transition(h0, 0, {1.0}, l1), 1, {2.0}, l2);
  std::vector<double> w{0.2 * 0.1 * 0.7, 0.3 * 0.5 * 0.2, 0.5 * 0.9 * 0.4};
  const double z = w[0] + w[1] + w[2];
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(h2.belief.weights()[i], w[i] / z, 1e-10);
}

TEST(HyperstateTransition, MarkovInHyperState) {
  // Two different histories that lead to the same (belief, t) transition identically.
  const Belief prior({{"a", {}}, {"b", {}}}, {0.5, 0.5});
  auto ha = hyperstate_transition(HyperState(prior), 0, {1.0}, std::vector<double>{0.2, 0.8});
  auto hb = hyperstate_transition(HyperState(prior), 1, {-3.0}, std::vector<double>{0.1, 0.4});
  ASSERT_NEAR(ha.belief.weights()[0], hb.belief.weights()[0], 1e-15);
  const auto na = hyperstate_transition(ha, 1, {0.0}, std::vector<double>{0.6, 0.3});
  const auto nb = hyperstate_transition(hb, 1, {0.0}, std::vector<double>{0.6, 0.3});
  EXPECT_EQ(na.t, nb.t);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(na.belief.weights()[i], nb.belief.weights()[i], 1e-15);
}

TEST(HyperstateTransition, AllZeroPropagates) {
  const HyperState h0(Belief::uniform({{"a", {}}, {"b", {}}}));
  EXPECT_THROW(hyperstate_transition(h0, 0, {0.0}, std::vector<double>{0.0, 0.0}), AllZeroLikelihood);
}

TEST(TinyBamdp, ShippedInstancesValidate) {
  for (const char* name : {"two_armed", "deferred", "three_theta", "dense_random", "probe_then_exploit"}) {
    const auto p = load_tiny_bamdp(std::string(UAMDP_SOURCE_DIR) + "/data/instances/" + name + ".json");
    EXPECT_NO_THROW(p.validate()) << name;
    EXPECT_LE(p.n_states, 3u);
    EXPECT_EQ(p.n_actions, 2u);
    EXPECT_LE(p.horizon, 3u);
    const auto back = tiny_bamdp_from_json(to_json(p));
    EXPECT_EQ(back.transitions, p.transitions);
    EXPECT_EQ(back.reward, p.reward);
  }
}

TEST(TinyBamdp, RejectsBadRows) {
  auto p = deferred_reward_toy();
  p.transitions[0][0] += 0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(TinyBamdp, InverseCdfSampling) {
  const auto p = deferred_reward_toy();
  EXPECT_EQ(sample_next_state(p, 0, 0, 1, 0.5), 2u);  // action 1 from the start goes to the paying state
}

TEST(FiniteMdpModel, DeferredRewardsAndHorizon) {
  const auto p = deferred_reward_toy();
  const FiniteMdpModel m(p);
  Rng rng(0);
  auto s1 = m.step({p.s0, 0}, 1, p.thetas[0], rng);
  EXPECT_EQ(s1.reward, 0.0);
  EXPECT_FALSE(s1.terminal);
  auto s2 = m.step(s1.next, 0, p.thetas[0], rng);
  EXPECT_EQ(s2.reward, 2.0);
  EXPECT_TRUE(s2.terminal);
}
