#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cuegrid/grid.hpp"
#include "cuegrid/scenario.hpp"
#include "oracles.hpp"

using namespace cuegrid;

namespace {

const char* kFiveByFive =
    "#####\n"
    "#...#\n"
    "#.T.#\n"
    "#.1.#\n"
    "#####\n";

}  // namespace

TEST_CASE("load_map parses the 5x5 document") {
  const GridMap map = load_map(kFiveByFive);
  CHECK(map.width() == 5);
  CHECK(map.height() == 5);
  CHECK(map.target() == Cell{2, 2});
  REQUIRE(map.agent_starts().size() == 1);
  CHECK(map.agent_starts()[0] == Cell{2, 1});
  CHECK(map.kind({0, 0}) == CellKind::Obstacle);
  CHECK(map.kind({1, 1}) == CellKind::Free);
}

TEST_CASE("load_map rejects a 3x3 map without a target") {
  CHECK_THROWS_WITH_AS(load_map("###\n#.#\n###\n"), doctest::Contains("target"),
                       MapError);
}

TEST_CASE("load_map rejects malformed documents") {
  CHECK_THROWS_AS(load_map("####\n#.#\n####\n"), MapError);  // ragged rows
  CHECK_THROWS_AS(load_map("#####\n#?T1#\n#####\n"), MapError);  // bad char
  CHECK_THROWS_WITH_AS(load_map("#####\n#1T1#\n#...#\n#####\n"),
                       doctest::Contains("duplicate"), MapError);
  CHECK_THROWS_AS(load_map("#####\n#.T.#\n#...#\n#####\n"), MapError);  // no agent
  // boundary ring must be all obstacle
  CHECK_THROWS_AS(load_map(".####\n#.T.#\n#.1.#\n#####\n"), MapError);
}

TEST_CASE("load_map then save_map round-trips bit-exactly") {
  CHECK(save_map(load_map(kFiveByFive)) == kFiveByFive);
  const std::string paper(paper_scenario_text());
  CHECK(save_map(load_map(paper)) == paper);
}

TEST_CASE("bundled scenario matches the published layout") {
  const GridMap map = paper_scenario();
  CHECK(map.width() == 36);
  CHECK(map.height() == 24);
  CHECK(map.num_states() == 864);
  CHECK(map.target() == Cell{30, 12});
  REQUIRE(map.agent_starts().size() == 4);
  CHECK(map.agent_starts()[0] == Cell{10, 20});
  CHECK(map.agent_starts()[1] == Cell{2, 16});
  CHECK(map.agent_starts()[2] == Cell{4, 6});
  CHECK(map.agent_starts()[3] == Cell{12, 2});
  std::vector<Cell> gates;
  for (int s = 0; s < map.num_states(); ++s)
    if (map.kind(map.cell(s)) == CellKind::Gate) gates.push_back(map.cell(s));
  REQUIRE(gates.size() == 4);
  for (Cell g : gates) CHECK(g.x == 26);
}

TEST_CASE("attempted_cell handles hover, blocked and open moves") {
  const GridMap map = load_map(kFiveByFive);
  CHECK(attempted_cell(map, {2, 2}, Action::Hover) == Cell{2, 2});
  CHECK(attempted_cell(map, {2, 3}, Action::Up) == Cell{2, 3});  // wall above
  CHECK(attempted_cell(map, {2, 2}, Action::Right) == Cell{3, 2});
}

TEST_CASE("joint action: two agents contesting one cell both stay") {
  const GridMap map = load_map("#####\n#...#\n#.T.#\n#1.2#\n#####\n");
  EnvState state{{{1, 1}, {3, 1}}, 0};
  const StepOutcome out =
      apply_joint_action(map, state, {Action::Right, Action::Left});
  CHECK(out.next_state.agent_cells[0] == Cell{1, 1});
  CHECK(out.next_state.agent_cells[1] == Cell{3, 1});
  CHECK(out.collided[0]);
  CHECK(out.collided[1]);
}

TEST_CASE("joint action: swapping agents both stay") {
  const GridMap map = load_map("#####\n#...#\n#.T.#\n#12.#\n#####\n");
  EnvState state{{{1, 1}, {2, 1}}, 0};
  const StepOutcome out =
      apply_joint_action(map, state, {Action::Right, Action::Left});
  CHECK(out.next_state.agent_cells[0] == Cell{1, 1});
  CHECK(out.next_state.agent_cells[1] == Cell{2, 1});
  CHECK(out.collided[0]);
  CHECK(out.collided[1]);
}

TEST_CASE("joint action: all hover leaves the state unchanged") {
  const GridMap map = paper_scenario();
  EnvState state{map.agent_starts(), 3};
  const StepOutcome out = apply_joint_action(
      map, state, std::vector<Action>(4, Action::Hover));
  CHECK(out.next_state.agent_cells == state.agent_cells);
  CHECK(out.next_state.step_index == 4);
  for (bool c : out.collided) CHECK_FALSE(c);
}

TEST_CASE("joint action: freeze propagates down a blocked convoy") {
  // Leader hits a wall; the follower heading into the leader's cell freezes.
  const GridMap map = load_map("######\n#.T..#\n#12..#\n######\n");
  EnvState state{{{1, 1}, {2, 1}}, 0};
  const StepOutcome out =
      apply_joint_action(map, state, {Action::Left, Action::Left});
  CHECK(out.collided[0]);  // wall
  CHECK(out.collided[1]);  // frozen leader
  CHECK(out.next_state.agent_cells[0] == Cell{1, 1});
  CHECK(out.next_state.agent_cells[1] == Cell{2, 1});
}

TEST_CASE("joint action: a moving convoy advances together") {
  const GridMap map = load_map("######\n#.T..#\n#12..#\n######\n");
  EnvState state{{{1, 1}, {2, 1}}, 0};
  const StepOutcome out =
      apply_joint_action(map, state, {Action::Up, Action::Left});
  CHECK_FALSE(out.collided[0]);
  CHECK_FALSE(out.collided[1]);
  CHECK(out.next_state.agent_cells[0] == Cell{1, 2});
  CHECK(out.next_state.agent_cells[1] == Cell{1, 1});
}

TEST_CASE("joint action: a four-cycle rotates without collisions") {
  // Grid adjacency is bipartite, so the smallest rotation is a 2x2 block:
  // 1:(1,1)->(2,1), 2:(2,1)->(2,2), 3:(2,2)->(1,2), 4:(1,2)->(1,1).
  const GridMap map = load_map("#####\n#12.#\n#43.#\n#.T.#\n#####\n");
  EnvState state{{{1, 1}, {2, 1}, {2, 2}, {1, 2}}, 0};
  const StepOutcome out = apply_joint_action(
      map, state, {Action::Right, Action::Up, Action::Left, Action::Down});
  for (bool c : out.collided) CHECK_FALSE(c);
  CHECK(out.next_state.agent_cells[0] == Cell{2, 1});
  CHECK(out.next_state.agent_cells[1] == Cell{2, 2});
  CHECK(out.next_state.agent_cells[2] == Cell{1, 2});
  CHECK(out.next_state.agent_cells[3] == Cell{1, 1});
}

TEST_CASE("joint action rejects a mismatched action list") {
  const GridMap map = paper_scenario();
  EnvState state{map.agent_starts(), 0};
  CHECK_THROWS_AS(apply_joint_action(map, state, {Action::Up}),
                  std::invalid_argument);
}

TEST_CASE("fuzz: reachable states stay distinct and traversable") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  for (int trial = 0; trial < 20; ++trial) {
    const GridMap map = trial % 2 == 0
                            ? paper_scenario()
                            : oracle::random_map(rng, 9, 7, 0.25, 3);
    EnvState state{map.agent_starts(), 0};
    for (int step = 0; step < 200; ++step) {
      std::vector<Action> actions;
      for (size_t i = 0; i < state.agent_cells.size(); ++i)
        actions.push_back(static_cast<Action>(pick(rng)));
      const StepOutcome out = apply_joint_action(map, state, actions);
      for (size_t i = 0; i < out.next_state.agent_cells.size(); ++i) {
        const Cell c = out.next_state.agent_cells[i];
        REQUIRE(map.traversable(c));
        if (out.collided[i]) REQUIRE(c == state.agent_cells[i]);
        for (size_t j = i + 1; j < out.next_state.agent_cells.size(); ++j)
          REQUIRE_FALSE(c == out.next_state.agent_cells[j]);
      }
      state = out.next_state;
    }
  }
}

TEST_CASE("apply_joint_action is permutation-equivariant") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pick(0, kNumActions - 1);
  const GridMap map = paper_scenario();
  std::vector<size_t> perm{2, 0, 3, 1};
  for (int trial = 0; trial < 200; ++trial) {
    // scatter agents over random traversable cells
    std::vector<Cell> cells;
    while (cells.size() < 4) {
      Cell c{int(rng() % map.width()), int(rng() % map.height())};
      if (!map.traversable(c)) continue;
      if (std::find(cells.begin(), cells.end(), c) != cells.end()) continue;
      cells.push_back(c);
    }
    std::vector<Action> actions;
    for (int i = 0; i < 4; ++i) actions.push_back(static_cast<Action>(pick(rng)));

    const StepOutcome base = apply_joint_action(map, {cells, 0}, actions);

    std::vector<Cell> p_cells(4);
    std::vector<Action> p_actions(4);
    for (size_t i = 0; i < 4; ++i) {
      p_cells[i] = cells[perm[i]];
      p_actions[i] = actions[perm[i]];
    }
    const StepOutcome permuted = apply_joint_action(map, {p_cells, 0}, p_actions);
    for (size_t i = 0; i < 4; ++i) {
      CHECK(permuted.next_state.agent_cells[i] ==
            base.next_state.agent_cells[perm[i]]);
      CHECK(permuted.collided[i] == base.collided[perm[i]]);
    }
  }
}

TEST_CASE("is_terminal covers peb, step limit and proximity modes") {
  const GridMap map = paper_scenario();
  TerminationConfig crit;
  crit.mode = MissionMode::Peb;
  crit.peb_threshold_m = 1.0;
  crit.max_steps = 800;

  EnvState state{map.agent_starts(), 10};
  auto [done, cause] = is_terminal(map, state, crit, 0.5);
  CHECK(done);
  CHECK(cause == TerminationCause::MissionAccomplished);

  state.step_index = 800;
  auto [done2, cause2] = is_terminal(map, state, crit, 99.0);
  CHECK(done2);
  CHECK(cause2 == TerminationCause::StepLimit);

  crit.mode = MissionMode::Proximity;
  crit.min_agents = 4;
  crit.range_cells = 2;
  EnvState near{{{29, 12}, {31, 12}, {30, 11}, {2, 2}}, 5};
  auto los = [](Cell) { return true; };
  auto [done3, cause3] = is_terminal(map, near, crit, 0.0, los);
  CHECK_FALSE(done3);  // only 3 of 4 in range
  CHECK(cause3 == TerminationCause::None);

  crit.min_agents = 3;
  auto [done4, cause4] = is_terminal(map, near, crit, 0.0, los);
  CHECK(done4);
  CHECK(cause4 == TerminationCause::MissionAccomplished);
}
