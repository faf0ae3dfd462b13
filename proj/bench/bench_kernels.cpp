#include <benchmark/benchmark.h>

#include <vector>

#include "uamdp/belief.hpp"
#include "uamdp/finite_mdp.hpp"
#include "uamdp/kernels.hpp"
#include "uamdp/planner.hpp"
#include "uamdp/rng.hpp"

namespace {

uamdp::Exec exec_of(const benchmark::State& st) {
  return st.range(0) ? uamdp::Exec::parallel : uamdp::Exec::serial;
}

void BM_SeGram(benchmark::State& st) {
  const std::size_t n = 256, dim = 4;
  uamdp::Rng rng(1);
  std::vector<double> x(n * dim), out(n * n), ls(dim, 0.7);
  for (auto& v : x) v = uamdp::uniform01(rng);
  for (auto _ : st) {
    uamdp::kernels::se_gram(x, n, dim, ls, 1.0, out, exec_of(st));
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_SeGram)->Arg(0)->Arg(1);

void BM_BayesUpdateLog(benchmark::State& st) {
  const std::size_t n = 4096;
  std::vector<uamdp::LatentParam> h;
  std::vector<double> ll(n);
  uamdp::Rng rng(2);
  for (std::size_t i = 0; i < n; ++i) {
    h.push_back({"h" + std::to_string(i), {}});
    ll[i] = -10.0 * uamdp::uniform01(rng);
  }
  const auto b = uamdp::Belief::uniform(h);
  for (auto _ : st) benchmark::DoNotOptimize(uamdp::bayes_update_log(b, ll, exec_of(st)));
}
BENCHMARK(BM_BayesUpdateLog)->Arg(0)->Arg(1);

void BM_PlanDeferredToy(benchmark::State& st) {
  const auto toy = uamdp::deferred_reward_toy(1.0);
  const uamdp::FiniteMdpModel model(toy);
  uamdp::PlannerConfig cfg;
  cfg.depth_limit = 2;
  cfg.rollout_budget = 128;
  cfg.leaf_samples = 64;
  cfg.discount = 1.0;
  cfg.exec = exec_of(st);
  const uamdp::RiskConfig risk;
  for (auto _ : st)
    benchmark::DoNotOptimize(uamdp::plan(uamdp::FiniteMdpModel::State{}, toy.thetas[0], model, cfg, risk));
}
BENCHMARK(BM_PlanDeferredToy)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
