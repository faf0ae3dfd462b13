#include "uamdp/finite_mdp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace uamdp {

namespace {

constexpr std::size_t kMaxProblemSize = 1000;  // |S|·|A|·|Θ|

}  // namespace

double TinyBAMDP::r_max() const {
  double m = 0.0;
  for (double v : reward) m = std::max(m, std::abs(v));
  return m;
}

std::size_t TinyBAMDP::theta_index(const std::string& id) const {
  for (std::size_t i = 0; i < thetas.size(); ++i)
    if (thetas[i].id == id) return i;
  throw std::invalid_argument("unknown theta id: " + id);
}

void TinyBAMDP::validate() const {
  if (n_states == 0 || n_actions == 0) throw std::invalid_argument(name + ": empty state or action set");
  if (thetas.empty()) throw std::invalid_argument(name + ": no thetas");
  if (n_states * n_actions * thetas.size() > kMaxProblemSize)
    throw std::invalid_argument(name + ": problem exceeds desk-scale cap");
  if (transitions.size() != thetas.size()) throw std::invalid_argument(name + ": one transition tensor per theta");
  if (reward.size() != n_states * n_actions) throw std::invalid_argument(name + ": reward table shape");
  if (prior.size() != thetas.size()) throw std::invalid_argument(name + ": prior length");
  if (s0 >= n_states) throw std::invalid_argument(name + ": s0 out of range");
  if (!(discount > 0.0 && discount <= 1.0)) throw std::invalid_argument(name + ": discount must lie in (0,1]");
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    if (transitions[k].size() != n_states * n_actions * n_states)
      throw std::invalid_argument(name + ": transition tensor shape");
    for (std::size_t s = 0; s < n_states; ++s)
      for (std::size_t a = 0; a < n_actions; ++a) {
        double sum = 0.0;
        for (std::size_t s2 = 0; s2 < n_states; ++s2) {
          const double v = p(k, s, a, s2);
          if (!(v >= 0.0)) throw std::invalid_argument(name + ": negative transition probability");
          sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument(name + ": transition row does not sum to 1");
      }
  }
  Belief(thetas, prior);  // validates the prior
}

TinyBAMDP tiny_bamdp_from_json(const nlohmann::json& j) {
  TinyBAMDP p;
  p.name = j.value("name", std::string("unnamed"));
  p.n_states = j.at("n_states").get<std::size_t>();
  p.n_actions = j.at("n_actions").get<std::size_t>();
  p.s0 = j.value("s0", std::size_t{0});
  p.horizon = j.at("horizon").get<std::size_t>();
  p.discount = j.at("discount").get<double>();
  const auto& r = j.at("reward");  // [s][a]
  for (const auto& row : r)
    for (const auto& v : row) p.reward.push_back(v.get<double>());
  for (const auto& th : j.at("thetas")) {
    p.thetas.push_back(LatentParam{th.at("id").get<std::string>(), {}});
    std::vector<double> flat;
    for (const auto& s_row : th.at("P"))
      for (const auto& a_row : s_row)
        for (const auto& v : a_row) flat.push_back(v.get<double>());
    p.transitions.push_back(std::move(flat));
  }
  p.prior = j.at("prior").get<std::vector<double>>();
  p.validate();
  return p;
}

nlohmann::json to_json(const TinyBAMDP& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["n_states"] = p.n_states;
  j["n_actions"] = p.n_actions;
  j["s0"] = p.s0;
  j["horizon"] = p.horizon;
  j["discount"] = p.discount;
  nlohmann::json r = nlohmann::json::array();
  for (std::size_t s = 0; s < p.n_states; ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t a = 0; a < p.n_actions; ++a) row.push_back(p.r(s, a));
    r.push_back(row);
  }
  j["reward"] = r;
  nlohmann::json thetas = nlohmann::json::array();
  for (std::size_t k = 0; k < p.thetas.size(); ++k) {
    nlohmann::json P = nlohmann::json::array();
    for (std::size_t s = 0; s < p.n_states; ++s) {
      nlohmann::json s_row = nlohmann::json::array();
      for (std::size_t a = 0; a < p.n_actions; ++a) {
        nlohmann::json a_row = nlohmann::json::array();
        for (std::size_t s2 = 0; s2 < p.n_states; ++s2) a_row.push_back(p.p(k, s, a, s2));
        s_row.push_back(a_row);
      }
      P.push_back(s_row);
    }
    thetas.push_back({{"id", p.thetas[k].id}, {"P", P}});
  }
  j["thetas"] = thetas;
  j["prior"] = p.prior;
  return j;
}

TinyBAMDP load_tiny_bamdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance: " + path);
  return tiny_bamdp_from_json(nlohmann::json::parse(in));
}

std::size_t sample_next_state(const TinyBAMDP& p, std::size_t theta, std::size_t s,
                              std::size_t a, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t s2 = 0; s2 < p.n_states; ++s2) {
    const double v = p.p(theta, s, a, s2);
    if (v <= 0.0) continue;
    last_positive = s2;
    acc += v;
    if (u < acc) return s2;
  }
  return last_positive;
}

FiniteMdpModel::FiniteMdpModel(const TinyBAMDP& problem, double reward_noise_sd)
    : problem_(&problem), reward_noise_sd_(reward_noise_sd) {
  if (reward_noise_sd < 0.0) throw std::invalid_argument("reward noise sd must be >= 0");
}

Step<FiniteMdpModel::State> FiniteMdpModel::step(const State& st, std::size_t a,
                                                 const LatentParam& theta, Rng& rng) const {
  const TinyBAMDP& p = *problem_;
  const std::size_t k = p.thetas.size() == 1 ? 0 : p.theta_index(theta.id);
  Step<State> out;
  out.reward = p.r(st.s, a);
  if (reward_noise_sd_ > 0.0) out.reward += std::normal_distribution<double>(0.0, reward_noise_sd_)(rng);
  out.next.s = sample_next_state(p, k, st.s, a, uniform01(rng));
  out.next.t = st.t + 1;
  out.terminal = out.next.t >= p.horizon;
  return out;
}

TinyBAMDP deferred_reward_toy(double discount) {
  TinyBAMDP p;
  p.name = "deferred-reward";
  p.n_states = 3;
  p.n_actions = 2;
  p.horizon = 2;
  p.discount = discount;
  p.thetas = {LatentParam{"known", {}}};
  p.prior = {1.0};
  p.reward = {1.0, 0.0,   // start
              0.0, 0.0,   // after the greedy action
              2.0, 2.0};  // after the deferred action
  std::vector<double> P(3 * 2 * 3, 0.0);
  auto set = [&](std::size_t s, std::size_t a, std::size_t s2) { P[(s * 2 + a) * 3 + s2] = 1.0; };
  set(0, 0, 1);
  set(0, 1, 2);
  set(1, 0, 1);
  set(1, 1, 1);
  set(2, 0, 2);
  set(2, 1, 2);
  p.transitions = {P};
  p.validate();
  return p;
}

}  // namespace uamdp
