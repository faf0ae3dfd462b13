#include "uamdp/hyperstate.hpp"

namespace uamdp {

namespace {

HyperState advance(const HyperState& h, std::size_t a, const Observation& x_next, Belief b) {
  HyperState out(std::move(b));
  out.history = h.history;
  out.history.push_back(x_next);
  out.past_actions = h.past_actions;
  out.past_actions.push_back(a);
  out.t = h.t + 1;
  return out;
}

}  // namespace

HyperState hyperstate_transition(const HyperState& h, std::size_t a, const Observation& x_next,
                                 std::span<const double> likelihoods) {
  return advance(h, a, x_next, bayes_update(h.belief, likelihoods));
}

HyperState hyperstate_transition_log(const HyperState& h, std::size_t a, const Observation& x_next,
                                     std::span<const double> log_likelihoods) {
  return advance(h, a, x_next, bayes_update_log(h.belief, log_likelihoods));
}

}  // namespace uamdp
