#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cuegrid/experiment.hpp"
#include "cuegrid/scenario.hpp"

using namespace cuegrid;

namespace {

RunConfig quick_config(Condition cond, int episodes, int max_steps) {
  RunConfig cfg;
  cfg.condition = cond;
  cfg.episodes = episodes;
  cfg.max_steps = max_steps;
  cfg.monte_carlo_runs = 1;
  cfg.termination.mode = MissionMode::Proximity;
  cfg.snapshot_episodes = {1};
  cfg.normalize();
  return cfg;
}

bool table_is_zero(const QTable& q) {
  for (double v : q.values())
    if (v != 0.0) return false;
  return true;
}

bool metrics_equal(const EpisodeMetrics& a, const EpisodeMetrics& b) {
  return a.episode_index == b.episode_index && a.steps_taken == b.steps_taken &&
         a.cause == b.cause && a.collisions == b.collisions &&
         a.instrumental_return == b.instrumental_return &&
         a.pavlovian_return == b.pavlovian_return && a.p_mb_mean == b.p_mb_mean;
}

}  // namespace

TEST_CASE("zero step budget terminates immediately with no updates") {
  RunConfig cfg = quick_config(Condition::FullHybrid, 1, 1);
  cfg.max_steps = 0;
  cfg.normalize();
  const Simulator sim(paper_scenario(), cfg);
  auto agents = sim.make_learners(1);
  const EpisodeMetrics m = sim.run_episode(agents, 0);
  CHECK(m.steps_taken == 0);
  CHECK(m.cause == TerminationCause::StepLimit);
  for (const auto& agent : agents) {
    CHECK(table_is_zero(agent.q_mf));
    CHECK(table_is_zero(agent.q_mb));
    CHECK(agent.model.seen_count() == 0);
  }
}

TEST_CASE("same seed and config reproduce metrics and artifacts bit-exactly") {
  const RunConfig cfg = quick_config(Condition::FullHybrid, 4, 80);
  const Simulator sim(paper_scenario(), cfg);
  const TrainingResult a = sim.run_training(42, true);
  const TrainingResult b = sim.run_training(42, true);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (size_t i = 0; i < a.episodes.size(); ++i)
    CHECK(metrics_equal(a.episodes[i], b.episodes[i]));
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (size_t i = 0; i < a.snapshots.size(); ++i)
    CHECK(a.snapshots[i].v_pav == b.snapshots[i].v_pav);
  CHECK(a.trajectories == b.trajectories);
}

TEST_CASE("different seeds diverge") {
  const RunConfig cfg = quick_config(Condition::InstrumentalOnly, 3, 120);
  const Simulator sim(paper_scenario(), cfg);
  const TrainingResult a = sim.run_training(1, false);
  const TrainingResult b = sim.run_training(2, false);
  bool any_diff = false;
  for (size_t i = 0; i < a.episodes.size(); ++i)
    any_diff |= !metrics_equal(a.episodes[i], b.episodes[i]);
  CHECK(any_diff);
}

TEST_CASE("conditions share the first decision under a shared seed") {
  // With zero tables the hybrid and bias terms vanish, so the first joint
  // action (and its one-step returns) cannot depend on the condition.
  const GridMap map = paper_scenario();
  std::vector<EpisodeMetrics> firsts;
  for (Condition c : {Condition::InstrumentalOnly, Condition::FullHybrid}) {
    RunConfig cfg = quick_config(c, 1, 1);
    const Simulator sim(map, cfg);
    auto agents = sim.make_learners(7);
    firsts.push_back(sim.run_episode(agents, 0));
  }
  CHECK(firsts[0].instrumental_return == firsts[1].instrumental_return);
  CHECK(firsts[0].collisions == firsts[1].collisions);
}

TEST_CASE("instrumental-only runs never touch pavlovian or model state") {
  const RunConfig cfg = quick_config(Condition::InstrumentalOnly, 3, 150);
  const Simulator sim(paper_scenario(), cfg);
  auto agents = sim.make_learners(5);
  for (int e = 0; e < 3; ++e) sim.run_episode(agents, e);
  for (const auto& agent : agents) {
    CHECK(table_is_zero(agent.pav.q));
    CHECK(table_is_zero(agent.q_mb));
    CHECK(agent.model.seen_count() == 0);
    CHECK_FALSE(table_is_zero(agent.q_mf));  // learning did happen
  }
}

TEST_CASE("p_mb is logged only for arbitration conditions") {
  const GridMap map = paper_scenario();
  for (Condition c : {Condition::InstrumentalOnly, Condition::PavlovianInstrumental}) {
    const Simulator sim(map, quick_config(c, 1, 30));
    auto agents = sim.make_learners(3);
    CHECK_FALSE(sim.run_episode(agents, 0).p_mb_mean.has_value());
  }
  for (Condition c : {Condition::InstrumentalModelBased, Condition::FullHybrid}) {
    const Simulator sim(map, quick_config(c, 1, 30));
    auto agents = sim.make_learners(3);
    const auto m = sim.run_episode(agents, 0);
    REQUIRE(m.p_mb_mean.has_value());
    CHECK(*m.p_mb_mean >= 0.0);
    CHECK(*m.p_mb_mean <= 1.0);
  }
}

TEST_CASE("greedy trajectories from zero tables climb via the tie-break") {
  // argmax of an all-zero row is Up; agents rise until the wall blocks them
  // and the path fills to the cap.
  RunConfig cfg = quick_config(Condition::InstrumentalOnly, 1, 12);
  cfg.termination.mode = MissionMode::Peb;  // never satisfied here
  const Simulator sim(paper_scenario(), cfg);
  const auto agents = sim.make_learners(1);
  const auto paths = sim.greedy_trajectories(agents);
  REQUIRE(paths.size() == 4);
  for (const auto& path : paths) {
    CHECK(path.size() <= 12);
    for (size_t i = 1; i < path.size(); ++i) {
      CHECK(path[i].x == path[i - 1].x);
      CHECK(path[i].y >= path[i - 1].y);
    }
  }
}

TEST_CASE("pavlovian field snapshot has map dimensions and NaN walls") {
  const GridMap map = paper_scenario();
  PavlovianTable pav(map.num_states());
  const auto field = pavlovian_field_snapshot(map, pav.v);
  REQUIRE(field.size() == size_t(map.num_states()));
  int nan_count = 0;
  for (int s = 0; s < map.num_states(); ++s) {
    if (std::isnan(field[s])) {
      ++nan_count;
      CHECK(map.kind(map.cell(s)) == CellKind::Obstacle);
    } else {
      CHECK(field[s] == 0.0);  // untrained table
    }
  }
  CHECK(nan_count == 221);
}

TEST_CASE("monte carlo: one run has zero std and mirrors the run series") {
  RunConfig cfg = quick_config(Condition::InstrumentalOnly, 3, 60);
  cfg.monte_carlo_runs = 1;
  const MonteCarloResult result = run_monte_carlo(paper_scenario(), cfg, 1);
  REQUIRE(result.aggregate.mean_steps.size() == 3);
  for (int e = 0; e < 3; ++e) {
    CHECK(result.aggregate.std_steps[e] == 0.0);
    CHECK(result.aggregate.mean_steps[e] ==
          double(result.aggregate.per_run_steps[0][e]));
    CHECK(result.aggregate.per_run_steps[0][e] ==
          result.exemplar.episodes[e].steps_taken);
  }
}

TEST_CASE("monte carlo aggregation is independent of thread scheduling") {
  RunConfig cfg = quick_config(Condition::FullHybrid, 2, 60);
  cfg.monte_carlo_runs = 4;
  const GridMap map = paper_scenario();
  const MonteCarloResult serial = run_monte_carlo(map, cfg, 1);
  const MonteCarloResult threaded = run_monte_carlo(map, cfg, 4);
  CHECK(serial.aggregate.mean_steps == threaded.aggregate.mean_steps);
  CHECK(serial.aggregate.std_steps == threaded.aggregate.std_steps);
  CHECK(serial.aggregate.per_run_steps == threaded.aggregate.per_run_steps);
  CHECK(serial.aggregate.mean_p_mb == threaded.aggregate.mean_p_mb);
}

TEST_CASE("episode metrics respect the step-limit contract") {
  RunConfig cfg = quick_config(Condition::InstrumentalOnly, 2, 25);
  const Simulator sim(paper_scenario(), cfg);
  auto agents = sim.make_learners(9);
  for (int e = 0; e < 2; ++e) {
    const EpisodeMetrics m = sim.run_episode(agents, e);
    CHECK(m.steps_taken <= 25);
    if (m.cause == TerminationCause::StepLimit) CHECK(m.steps_taken == 25);
    if (m.cause == TerminationCause::MissionAccomplished)
      CHECK(m.steps_taken <= 25);
  }
}

TEST_CASE("schedules advance per episode inside run_training") {
  // with factor 0 the temperature collapses to the floor after episode 0;
  // verify via schedule_value directly (the training loop consumes it)
  const DecaySchedule tau{1.0, 0.5, 0.1};
  CHECK(schedule_value(tau, 0) == 1.0);
  CHECK(schedule_value(tau, 1) == 0.5);
  CHECK(schedule_value(tau, 4) == 0.1);
}

TEST_CASE("condition names round-trip") {
  for (Condition c : {Condition::InstrumentalOnly, Condition::PavlovianInstrumental,
                      Condition::InstrumentalModelBased, Condition::FullHybrid}) {
    const auto parsed = condition_from_name(condition_name(c));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == c);
  }
  CHECK_FALSE(condition_from_name("bogus").has_value());
}
