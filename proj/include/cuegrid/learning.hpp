#pragma once

#include <array>
#include <span>
#include <vector>

#include "cuegrid/grid.hpp"
#include "cuegrid/rng.hpp"
#include "cuegrid/schedule.hpp"

namespace cuegrid {

struct Hyper {
  DecaySchedule alpha{0.55, 0.999, 0.08};
  double gamma = 0.99;
  double trace_lambda = 0.4;
  int planning_steps = 4;  // Dyna-Q replays per real transition
};

// Dense tabular action values, zero-initialized. Ties in max/argmax break
// toward the lowest action index everywhere.
class QTable {
 public:
  explicit QTable(int num_states)
      : num_states_(num_states),
        values_(static_cast<size_t>(num_states) * kNumActions, 0.0) {}

  double operator()(int s, int a) const {
    return values_[static_cast<size_t>(s) * kNumActions + a];
  }
  double& operator()(int s, int a) {
    return values_[static_cast<size_t>(s) * kNumActions + a];
  }
  std::span<const double> row(int s) const {
    return {values_.data() + static_cast<size_t>(s) * kNumActions, kNumActions};
  }

  double max_value(int s) const;
  int argmax(int s) const;

  int num_states() const { return num_states_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int num_states_;
  std::vector<double> values_;
};

class ValueTable {
 public:
  explicit ValueTable(int num_states) : values_(num_states, 0.0) {}
  double operator()(int s) const { return values_[s]; }
  double& operator()(int s) { return values_[s]; }
  int num_states() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Cue critic. v_pav(s) mirrors max_a q_pav(s, a) after every update and is
// the shaping potential in the post-cue phase.
struct PavlovianTable {
  explicit PavlovianTable(int num_states)
      : q(num_states), v(num_states, 0.0) {}
  QTable q;
  std::vector<double> v;
};

// Replacing traces. The dense array is the contract; a nonzero index list
// keeps decay and application O(active entries).
class EligibilityTraces {
 public:
  explicit EligibilityTraces(int num_states)
      : e_(static_cast<size_t>(num_states) * kNumActions, 0.0) {}

  bool active() const { return active_; }
  void activate() { active_ = true; }
  void reset();  // zero all entries and deactivate

  double value(int s, int a) const {
    return e_[static_cast<size_t>(s) * kNumActions + a];
  }
  int nonzero_count() const { return static_cast<int>(nonzero_.size()); }

  void set_replacing(int s, int a);  // e(s, a) := 1
  void apply_and_decay(QTable& q, double step, double decay);

 private:
  std::vector<double> e_;
  std::vector<int> nonzero_;  // flat (s * kNumActions + a) indices
  bool active_ = false;
};

// --- TD updates (return the prediction error) ---

double td_v_update(ValueTable& v, int s, double r, int s_next, double alpha,
                   double gamma);

double q_learning_update(QTable& q, int s, int a, double r, int s_next,
                         double alpha, double gamma);

double sarsa_update(QTable& q, EligibilityTraces& traces, int s, int a,
                    double r, int s_next, int a_next, double alpha,
                    double gamma, double lambda);

double advantage(const QTable& q, const ValueTable& v, int s, int a);

void pavlovian_update(PavlovianTable& p, int s, int a, double r_pav,
                      int s_next, double alpha, double gamma);

// --- Dyna model ---

// Last-observation deterministic memory plus visit counts; the counts only
// feed the state prediction error.
class DynaModel {
 public:
  explicit DynaModel(int num_states);

  void observe(int s, int a, double r, int s_next);

  // 1 - count(s, a, s_observed) / count(s, a), using counts prior to the
  // observation; 1 for an unseen pair.
  double prediction_error(int s, int a, int s_observed) const;

  bool seen(int s, int a) const;
  int seen_count() const { return static_cast<int>(seen_pairs_.size()); }
  int visit_count(int s, int a) const { return counts_[pair_index(s, a)]; }
  int transition_count(int s, int a, int s_next) const;
  double stored_reward(int s, int a) const { return reward_[pair_index(s, a)]; }
  int stored_next(int s, int a) const { return next_[pair_index(s, a)]; }

  friend void dyna_plan(DynaModel& model, QTable& q, int k, double alpha,
                        double gamma, Rng& rng);

 private:
  size_t pair_index(int s, int a) const {
    return static_cast<size_t>(s) * kNumActions + a;
  }

  std::vector<int> next_;      // last observed successor, -1 if unseen
  std::vector<double> reward_;  // last observed reward
  std::vector<int> counts_;
  std::vector<std::vector<std::pair<int, int>>> successor_counts_;
  std::vector<int> seen_pairs_;  // insertion order, for uniform replay
};

// K replays of remembered transitions through the Q-learning update.
// No-op when the model is empty or k == 0.
void dyna_plan(DynaModel& model, QTable& q, int k, double alpha, double gamma,
               Rng& rng);

// --- Arbitration ---

struct ArbitrationState {
  double rel_mf = 0.0;  // EMA of |RPE|
  double rel_mb = 0.0;  // EMA of SPE
  double max_rel_mf = 0.0;
  double max_rel_mb = 0.0;
  double p_mb = 0.5;
  double ema_decay = 0.02;
  double sharpness = 5.0;
};

// Lower running error => more reliable system => more weight. Errors are
// normalized by their running maxima before the sigmoid since |RPE| is
// reward-scaled while SPE lives in [0, 1].
void arbitration_update(ArbitrationState& arb, double rpe, double spe);

std::array<double, kNumActions> hybrid_q(const QTable& q_mf,
                                         const QTable& q_mb, double p_mb,
                                         int s);

}  // namespace cuegrid
