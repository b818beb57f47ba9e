#include "cuegrid/learning.hpp"

#include <algorithm>
#include <cmath>

namespace cuegrid {

namespace {
// Trace entries below this are dropped from the active list; they could not
// move a Q entry by more than ~1e-12 per step.
constexpr double kTraceCutoff = 1e-12;
}  // namespace

double QTable::max_value(int s) const {
  const auto r = row(s);
  double best = r[0];
  for (int a = 1; a < kNumActions; ++a) best = std::max(best, r[a]);
  return best;
}

int QTable::argmax(int s) const {
  const auto r = row(s);
  int best = 0;
  for (int a = 1; a < kNumActions; ++a)
    if (r[a] > r[best]) best = a;
  return best;
}

void EligibilityTraces::reset() {
  for (int idx : nonzero_) e_[idx] = 0.0;
  nonzero_.clear();
  active_ = false;
}

void EligibilityTraces::set_replacing(int s, int a) {
  const int idx = s * kNumActions + a;
  if (e_[idx] == 0.0) nonzero_.push_back(idx);
  e_[idx] = 1.0;
}

void EligibilityTraces::apply_and_decay(QTable& q, double step, double decay) {
  size_t kept = 0;
  for (size_t i = 0; i < nonzero_.size(); ++i) {
    const int idx = nonzero_[i];
    q(idx / kNumActions, idx % kNumActions) += step * e_[idx];
    const double decayed = e_[idx] * decay;
    if (decayed >= kTraceCutoff) {
      e_[idx] = decayed;
      nonzero_[kept++] = idx;
    } else {
      e_[idx] = 0.0;
    }
  }
  nonzero_.resize(kept);
}

double td_v_update(ValueTable& v, int s, double r, int s_next, double alpha,
                   double gamma) {
  const double delta = r + gamma * v(s_next) - v(s);
  v(s) += alpha * delta;
  return delta;
}

double q_learning_update(QTable& q, int s, int a, double r, int s_next,
                         double alpha, double gamma) {
  const double rpe = r + gamma * q.max_value(s_next) - q(s, a);
  q(s, a) += alpha * rpe;
  return rpe;
}

double sarsa_update(QTable& q, EligibilityTraces& traces, int s, int a,
                    double r, int s_next, int a_next, double alpha,
                    double gamma, double lambda) {
  const double rpe = r + gamma * q(s_next, a_next) - q(s, a);
  if (!traces.active()) {
    q(s, a) += alpha * rpe;
  } else {
    traces.set_replacing(s, a);
    traces.apply_and_decay(q, alpha * rpe, gamma * lambda);
  }
  return rpe;
}

double advantage(const QTable& q, const ValueTable& v, int s, int a) {
  return q(s, a) - v(s);
}

void pavlovian_update(PavlovianTable& p, int s, int a, double r_pav,
                      int s_next, double alpha, double gamma) {
  const double delta = r_pav + gamma * p.q.max_value(s_next) - p.q(s, a);
  p.q(s, a) += alpha * delta;
  p.v[s] = p.q.max_value(s);
}

// --- DynaModel ---

DynaModel::DynaModel(int num_states)
    : next_(static_cast<size_t>(num_states) * kNumActions, -1),
      reward_(static_cast<size_t>(num_states) * kNumActions, 0.0),
      counts_(static_cast<size_t>(num_states) * kNumActions, 0),
      successor_counts_(static_cast<size_t>(num_states) * kNumActions) {}

void DynaModel::observe(int s, int a, double r, int s_next) {
  const size_t idx = pair_index(s, a);
  if (next_[idx] < 0) seen_pairs_.push_back(static_cast<int>(idx));
  next_[idx] = s_next;
  reward_[idx] = r;
  ++counts_[idx];
  auto& succ = successor_counts_[idx];
  for (auto& [state, count] : succ) {
    if (state == s_next) {
      ++count;
      return;
    }
  }
  succ.emplace_back(s_next, 1);
}

double DynaModel::prediction_error(int s, int a, int s_observed) const {
  const size_t idx = pair_index(s, a);
  if (counts_[idx] == 0) return 1.0;
  int match = 0;
  for (const auto& [state, count] : successor_counts_[idx])
    if (state == s_observed) match = count;
  return 1.0 - static_cast<double>(match) / counts_[idx];
}

bool DynaModel::seen(int s, int a) const { return next_[pair_index(s, a)] >= 0; }

int DynaModel::transition_count(int s, int a, int s_next) const {
  for (const auto& [state, count] : successor_counts_[pair_index(s, a)])
    if (state == s_next) return count;
  return 0;
}

void dyna_plan(DynaModel& model, QTable& q, int k, double alpha, double gamma,
               Rng& rng) {
  if (model.seen_pairs_.empty()) return;
  for (int i = 0; i < k; ++i) {
    const int idx = model.seen_pairs_[uniform_int(
        rng, static_cast<int>(model.seen_pairs_.size()))];
    const int s = idx / kNumActions;
    const int a = idx % kNumActions;
    q_learning_update(q, s, a, model.reward_[idx], model.next_[idx], alpha,
                      gamma);
  }
}

// --- Arbitration ---

void arbitration_update(ArbitrationState& arb, double rpe, double spe) {
  const double d = arb.ema_decay;
  arb.rel_mf = (1.0 - d) * arb.rel_mf + d * std::fabs(rpe);
  arb.rel_mb = (1.0 - d) * arb.rel_mb + d * spe;
  arb.max_rel_mf = std::max(arb.max_rel_mf, arb.rel_mf);
  arb.max_rel_mb = std::max(arb.max_rel_mb, arb.rel_mb);
  const double norm_mf = arb.max_rel_mf > 0.0 ? arb.rel_mf / arb.max_rel_mf : 0.0;
  const double norm_mb = arb.max_rel_mb > 0.0 ? arb.rel_mb / arb.max_rel_mb : 0.0;
  arb.p_mb = 1.0 / (1.0 + std::exp(arb.sharpness * (norm_mb - norm_mf)));
}

std::array<double, kNumActions> hybrid_q(const QTable& q_mf,
                                         const QTable& q_mb, double p_mb,
                                         int s) {
  std::array<double, kNumActions> out;
  const auto mf = q_mf.row(s);
  const auto mb = q_mb.row(s);
  for (int a = 0; a < kNumActions; ++a)
    out[a] = p_mb * mb[a] + (1.0 - p_mb) * mf[a];
  return out;
}

}  // namespace cuegrid
