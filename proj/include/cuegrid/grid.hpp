#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cuegrid {

enum class CellKind : std::uint8_t { Free, Obstacle, Gate, GpsDenied };

// Action order is load-bearing: ties in argmax break toward the lowest
// index, and inverse-CDF sampling walks this order.
enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3, Hover = 4 };
inline constexpr int kNumActions = 5;

struct Cell {
  int x = 0;
  int y = 0;
  friend constexpr bool operator==(const Cell&, const Cell&) = default;
};

struct MapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Occupancy grid with (x, y) coordinates, x rightward, y upward.
// State indices are row-major: s = y * width + x.
class GridMap {
 public:
  GridMap(int width, int height, std::vector<CellKind> cells,
          std::vector<Cell> agent_starts, Cell target);

  int width() const { return width_; }
  int height() const { return height_; }
  int num_states() const { return width_ * height_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  CellKind kind(Cell c) const { return cells_[index(c)]; }
  bool traversable(Cell c) const {
    return in_bounds(c) && kind(c) != CellKind::Obstacle;
  }

  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int state_index) const {
    return Cell{state_index % width_, state_index / width_};
  }

  const std::vector<CellKind>& cells() const { return cells_; }
  const std::vector<Cell>& agent_starts() const { return agent_starts_; }
  Cell target() const { return target_; }

 private:
  int width_;
  int height_;
  std::vector<CellKind> cells_;
  std::vector<Cell> agent_starts_;
  Cell target_;
};

// Map file alphabet: '#' obstacle, '.' free, 'G' gate, 'D' GPS-denied,
// 'T' target, digits '1'-'9' agent starts. One row per line, top line is
// the highest y, LF endings, no trailing whitespace.
GridMap load_map(std::string_view text);
std::string save_map(const GridMap& map);

// Destination of `action` from `from`, or `from` itself when the move is
// blocked by the boundary or an obstacle.
Cell attempted_cell(const GridMap& map, Cell from, Action action);

struct EnvState {
  std::vector<Cell> agent_cells;
  int step_index = 0;
};

enum class TerminationCause : std::uint8_t { None, MissionAccomplished, StepLimit };

struct StepOutcome {
  EnvState next_state;
  std::vector<bool> collided;
  bool terminal = false;
  TerminationCause cause = TerminationCause::None;
};

// Simultaneous move resolution. An agent stays put (collided = true) when
// its move is blocked by the boundary/an obstacle, when several agents
// attempt one cell, or when a pair tries to swap. Freezing propagates to a
// fixed point: an agent whose destination is vacated only by a frozen agent
// freezes too. Cycles of length >= 3 rotate freely.
StepOutcome apply_joint_action(const GridMap& map, const EnvState& state,
                               const std::vector<Action>& actions);

enum class MissionMode : std::uint8_t { Peb, Proximity };

struct TerminationConfig {
  MissionMode mode = MissionMode::Peb;
  double peb_threshold_m = 1.0;
  double rss_noise_sigma_db = 6.0;  // RSS noise feeding the PEB bound
  int min_agents = 2;               // Proximity mode only
  int range_cells = 6;              // Chebyshev radius, Proximity mode only
  int max_steps = 800;
};

using LosPredicate = std::function<bool(Cell)>;

// `peb_value_m` comes from the radio model and is ignored in Proximity
// mode; `los_to_target` is only consulted in Proximity mode.
std::pair<bool, TerminationCause> is_terminal(const GridMap& map,
                                              const EnvState& state,
                                              const TerminationConfig& crit,
                                              double peb_value_m,
                                              const LosPredicate& los_to_target = {});

}  // namespace cuegrid
