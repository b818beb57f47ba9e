#pragma once

#include <algorithm>
#include <cmath>

namespace cuegrid {

// Geometric decay with a floor: value(n) = max(floor, start * factor^n).
// Advanced once per episode; constant within an episode.
struct DecaySchedule {
  double start = 1.0;
  double factor = 0.999;
  double floor = 0.08;
};

inline double schedule_value(const DecaySchedule& sched, int episode_index) {
  return std::max(sched.floor,
                  sched.start * std::pow(sched.factor, episode_index));
}

}  // namespace cuegrid
