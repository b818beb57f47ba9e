#pragma once

#include <optional>
#include <span>

#include "cuegrid/grid.hpp"

namespace cuegrid {

struct RewardConfig {
  double collision_penalty = 2.0;      // subtracted on collision
  double gate_reward = 5.0;            // entering a gate region
  double gps_denied_penalty = -5.0;    // entering a GPS-denied region
  double nlos_penalty = -2.0;          // every step spent without LOS
  double rss_scale = 0.01;             // reward units per dB above reference
  // Referenced to the peak RSS (1 m LOS under the default link budget), so
  // the per-step term is a cost that vanishes at the target. Anchoring it
  // at the noise floor instead turns it into a positive income stream that
  // rewards never finishing the mission.
  double rss_reference_dbm = -46.05;
  double terminal_bonus = 20.0;        // mission accomplished
};

struct RewardBreakdown {
  double instrumental = 0.0;
  double pavlovian = 0.0;
  double shaping = 0.0;
  double total = 0.0;  // always the exact sum of the three components
};

inline RewardBreakdown make_breakdown(double instrumental, double pavlovian,
                                      double shaping) {
  return {instrumental, pavlovian, shaping,
          instrumental + pavlovian + shaping};
}

double instrumental_reward(const RewardConfig& cfg, double rss_dbm,
                           bool collided, bool mission_done);

// Cue reward for the cell kind just entered plus the per-step NLOS penalty.
// Callers pass CellKind::Free when no region boundary was crossed.
double pavlovian_reward(const RewardConfig& cfg, CellKind entered,
                        bool los_to_target);

// Potential-based shaping gamma * phi(s') - phi(s); phi is v_pav.
double shaping_reward(std::span<const double> phi, int s, int s_next,
                      double gamma);

enum class CuePhaseKind : std::uint8_t { PreCue, PostCue };

// Pre-cue: off-policy Q-learning on environment rewards only. Post-cue
// (entered on the first validated cue): shaping applies to all remaining
// transitions and updates switch to SARSA with replacing traces.
struct CuePhase {
  CuePhaseKind phase = CuePhaseKind::PreCue;
  std::optional<int> switch_step;
};

CuePhase cue_phase_step(CuePhase phase, bool entered_cue, int step);

}  // namespace cuegrid
