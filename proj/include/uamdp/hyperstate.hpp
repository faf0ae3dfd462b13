#pragma once

// The (history, belief) pair on which the Bayes value is defined.

#include <cstddef>
#include <span>
#include <vector>

#include "uamdp/belief.hpp"
#include "uamdp/forecaster.hpp"

namespace uamdp {

struct HyperState {
  std::vector<Observation> history;   // x_1..x_t
  std::vector<std::size_t> past_actions;  // a_0..a_{t-1}
  Belief belief;
  std::size_t t = 0;

  explicit HyperState(Belief b) : belief(std::move(b)) {}
};

// Appends (a, x_next), applies the Bayes update and advances t.
// Propagates AllZeroLikelihood.
HyperState hyperstate_transition(const HyperState& h, std::size_t a, const Observation& x_next,
                                 std::span<const double> likelihoods);
HyperState hyperstate_transition_log(const HyperState& h, std::size_t a, const Observation& x_next,
                                     std::span<const double> log_likelihoods);

}  // namespace uamdp
