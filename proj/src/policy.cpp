#include "cuegrid/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace cuegrid {

ActionVector action_scores(const ActionVector& q_hybrid,
                           const PavlovianTable& pav, int s, double pav_weight,
                           bool pav_enabled) {
  ActionVector out = q_hybrid;
  if (pav_enabled) {
    const auto bias = pav.q.row(s);
    for (int a = 0; a < kNumActions; ++a) out[a] += pav_weight * bias[a];
  }
  return out;
}

ActionVector softmax_probs(const ActionVector& scores, double temperature) {
  if (!(temperature > 0.0))
    throw std::invalid_argument("softmax temperature must be positive");
  double max_score = scores[0];
  for (double v : scores) {
    if (!std::isfinite(v))
      throw std::invalid_argument("softmax received a non-finite score");
    max_score = std::max(max_score, v);
  }
  ActionVector probs;
  double sum = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    probs[a] = std::exp((scores[a] - max_score) / temperature);
    sum += probs[a];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

Action sample_action(const ActionVector& probs, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    cum += probs[a];
    if (u < cum) return static_cast<Action>(a);
  }
  return static_cast<Action>(kNumActions - 1);  // guards rounding at u ~ 1
}

}  // namespace cuegrid
