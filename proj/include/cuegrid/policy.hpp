#pragma once

#include <array>

#include "cuegrid/learning.hpp"
#include "cuegrid/rng.hpp"
#include "cuegrid/schedule.hpp"

namespace cuegrid {

struct PolicyConfig {
  DecaySchedule temperature{1.0, 0.999, 0.08};
  double pav_weight = 1.0;
};

using ActionVector = std::array<double, kNumActions>;

// Instrumental values plus the action-dependent Pavlovian bias. A purely
// state-dependent bias would cancel in the softmax.
ActionVector action_scores(const ActionVector& q_hybrid,
                           const PavlovianTable& pav, int s, double pav_weight,
                           bool pav_enabled);

// Max-stabilized Boltzmann distribution over the five actions.
ActionVector softmax_probs(const ActionVector& scores, double temperature);

// Inverse-CDF sample in fixed action order.
Action sample_action(const ActionVector& probs, Rng& rng);

}  // namespace cuegrid
