#include "cuegrid/grid.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

namespace cuegrid {

namespace {

constexpr std::array<Cell, kNumActions> kActionDelta = {{
    {0, 1},   // Up
    {0, -1},  // Down
    {-1, 0},  // Left
    {1, 0},   // Right
    {0, 0},   // Hover
}};

char cell_char(CellKind k) {
  switch (k) {
    case CellKind::Free: return '.';
    case CellKind::Obstacle: return '#';
    case CellKind::Gate: return 'G';
    case CellKind::GpsDenied: return 'D';
  }
  return '?';
}

}  // namespace

GridMap::GridMap(int width, int height, std::vector<CellKind> cells,
                 std::vector<Cell> agent_starts, Cell target)
    : width_(width),
      height_(height),
      cells_(std::move(cells)),
      agent_starts_(std::move(agent_starts)),
      target_(target) {
  if (width_ < 3 || height_ < 3)
    throw MapError("map must be at least 3x3, got " + std::to_string(width_) +
                   "x" + std::to_string(height_));
  if (cells_.size() != static_cast<size_t>(width_) * height_)
    throw MapError("cell array size does not match map dimensions");
  for (int x = 0; x < width_; ++x) {
    if (kind({x, 0}) != CellKind::Obstacle ||
        kind({x, height_ - 1}) != CellKind::Obstacle)
      throw MapError("boundary ring must be obstacle");
  }
  for (int y = 0; y < height_; ++y) {
    if (kind({0, y}) != CellKind::Obstacle ||
        kind({width_ - 1, y}) != CellKind::Obstacle)
      throw MapError("boundary ring must be obstacle");
  }
  if (!in_bounds(target_) || kind(target_) != CellKind::Free)
    throw MapError("target must be on a free cell");
  if (agent_starts_.empty()) throw MapError("map has no agent starts");
  for (size_t i = 0; i < agent_starts_.size(); ++i) {
    Cell c = agent_starts_[i];
    if (!traversable(c)) throw MapError("agent start on obstacle");
    if (c == target_) throw MapError("agent start on target cell");
    for (size_t j = i + 1; j < agent_starts_.size(); ++j)
      if (c == agent_starts_[j]) throw MapError("duplicate agent start");
  }
}

GridMap load_map(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && body.back() == '\n') body.remove_suffix(1);

  std::vector<std::string_view> lines;
  size_t pos = 0;
  while (pos <= body.size()) {
    size_t nl = body.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(body.substr(pos));
      break;
    }
    lines.push_back(body.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty() || (lines.size() == 1 && lines[0].empty()))
    throw MapError("empty map document");

  const int height = static_cast<int>(lines.size());
  const int width = static_cast<int>(lines[0].size());
  for (const auto& line : lines)
    if (static_cast<int>(line.size()) != width)
      throw MapError("non-rectangular map: row lengths differ");

  std::vector<CellKind> cells(static_cast<size_t>(width) * height,
                              CellKind::Free);
  std::map<char, Cell> agents;  // ordered by digit label
  Cell target{-1, -1};
  bool have_target = false;

  for (int row = 0; row < height; ++row) {
    const int y = height - 1 - row;  // top line = highest y
    for (int x = 0; x < width; ++x) {
      const char ch = lines[row][x];
      CellKind k = CellKind::Free;
      switch (ch) {
        case '#': k = CellKind::Obstacle; break;
        case '.': k = CellKind::Free; break;
        case 'G': k = CellKind::Gate; break;
        case 'D': k = CellKind::GpsDenied; break;
        case 'T':
          if (have_target) throw MapError("multiple target cells");
          target = {x, y};
          have_target = true;
          break;
        default:
          if (ch >= '1' && ch <= '9') {
            if (agents.count(ch))
              throw MapError(std::string("duplicate agent digit '") + ch + "'");
            agents[ch] = {x, y};
          } else {
            throw MapError(std::string("unknown character '") + ch +
                           "' at row " + std::to_string(row) + ", column " +
                           std::to_string(x));
          }
          break;
      }
      cells[static_cast<size_t>(y) * width + x] = k;
    }
  }
  if (!have_target) throw MapError("missing target cell 'T'");

  std::vector<Cell> starts;
  starts.reserve(agents.size());
  for (const auto& [digit, cell] : agents) starts.push_back(cell);

  return GridMap(width, height, std::move(cells), std::move(starts), target);
}

std::string save_map(const GridMap& map) {
  std::string out;
  out.reserve(static_cast<size_t>(map.height()) * (map.width() + 1));
  for (int y = map.height() - 1; y >= 0; --y) {
    for (int x = 0; x < map.width(); ++x) {
      Cell c{x, y};
      char ch = cell_char(map.kind(c));
      if (c == map.target()) ch = 'T';
      const auto& starts = map.agent_starts();
      for (size_t i = 0; i < starts.size(); ++i)
        if (starts[i] == c) ch = static_cast<char>('1' + i);
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

Cell attempted_cell(const GridMap& map, Cell from, Action action) {
  const Cell d = kActionDelta[static_cast<int>(action)];
  const Cell to{from.x + d.x, from.y + d.y};
  return map.traversable(to) ? to : from;
}

StepOutcome apply_joint_action(const GridMap& map, const EnvState& state,
                               const std::vector<Action>& actions) {
  const size_t n = state.agent_cells.size();
  if (actions.size() != n)
    throw std::invalid_argument("expected " + std::to_string(n) +
                                " actions, got " +
                                std::to_string(actions.size()));

  std::vector<Cell> att(n);
  std::vector<bool> frozen(n, false), collided(n, false);
  for (size_t i = 0; i < n; ++i) {
    const Cell cur = state.agent_cells[i];
    att[i] = attempted_cell(map, cur, actions[i]);
    if (att[i] == cur) {
      frozen[i] = true;  // hover or wall-blocked; occupies its cell
      if (actions[i] != Action::Hover) collided[i] = true;
    }
  }

  // Same-cell conflicts: everyone targeting a contested cell stays.
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (att[i] == att[j]) {
        frozen[i] = frozen[j] = true;
        collided[i] = collided[j] = true;
      }
    }
  }

  // Swaps cross paths mid-edge; both stay.
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (att[i] == state.agent_cells[j] && att[j] == state.agent_cells[i] &&
          !(state.agent_cells[i] == att[i])) {
        frozen[i] = frozen[j] = true;
        collided[i] = collided[j] = true;
      }
    }
  }

  // Freeze-and-propagate: a mover whose destination stays occupied by a
  // frozen agent freezes as well. Unfrozen cycles (length >= 3) rotate.
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      for (size_t j = 0; j < n; ++j) {
        if (j == i || !frozen[j]) continue;
        if (att[i] == state.agent_cells[j]) {
          frozen[i] = true;
          collided[i] = true;
          changed = true;
          break;
        }
      }
    }
  }

  StepOutcome out;
  out.next_state.agent_cells.resize(n);
  for (size_t i = 0; i < n; ++i)
    out.next_state.agent_cells[i] = frozen[i] ? state.agent_cells[i] : att[i];
  out.next_state.step_index = state.step_index + 1;
  out.collided = std::move(collided);
  return out;
}

std::pair<bool, TerminationCause> is_terminal(const GridMap& map,
                                              const EnvState& state,
                                              const TerminationConfig& crit,
                                              double peb_value_m,
                                              const LosPredicate& los_to_target) {
  bool done = false;
  if (crit.mode == MissionMode::Peb) {
    done = peb_value_m <= crit.peb_threshold_m;
  } else {
    int close = 0;
    for (const Cell& c : state.agent_cells) {
      const int cheb = std::max(std::abs(c.x - map.target().x),
                                std::abs(c.y - map.target().y));
      if (cheb <= crit.range_cells && (!los_to_target || los_to_target(c)))
        ++close;
    }
    done = close >= crit.min_agents;
  }
  if (done) return {true, TerminationCause::MissionAccomplished};
  if (state.step_index >= crit.max_steps)
    return {true, TerminationCause::StepLimit};
  return {false, TerminationCause::None};
}

}  // namespace cuegrid
