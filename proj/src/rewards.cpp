#include "cuegrid/rewards.hpp"

namespace cuegrid {

double instrumental_reward(const RewardConfig& cfg, double rss_dbm,
                           bool collided, bool mission_done) {
  double r = cfg.rss_scale * (rss_dbm - cfg.rss_reference_dbm);
  if (collided) r -= cfg.collision_penalty;
  if (mission_done) r += cfg.terminal_bonus;
  return r;
}

double pavlovian_reward(const RewardConfig& cfg, CellKind entered,
                        bool los_to_target) {
  double r = 0.0;
  if (entered == CellKind::Gate) r += cfg.gate_reward;
  if (entered == CellKind::GpsDenied) r += cfg.gps_denied_penalty;
  if (!los_to_target) r += cfg.nlos_penalty;
  return r;
}

double shaping_reward(std::span<const double> phi, int s, int s_next,
                      double gamma) {
  return gamma * phi[s_next] - phi[s];
}

CuePhase cue_phase_step(CuePhase phase, bool entered_cue, int step) {
  if (phase.phase == CuePhaseKind::PreCue && entered_cue) {
    phase.phase = CuePhaseKind::PostCue;
    phase.switch_step = step;
  }
  return phase;
}

}  // namespace cuegrid
