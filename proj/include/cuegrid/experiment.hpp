#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cuegrid/channel.hpp"
#include "cuegrid/grid.hpp"
#include "cuegrid/learning.hpp"
#include "cuegrid/policy.hpp"
#include "cuegrid/rewards.hpp"

namespace cuegrid {

enum class Condition : std::uint8_t {
  InstrumentalOnly,
  PavlovianInstrumental,
  InstrumentalModelBased,
  FullHybrid,
};

inline bool pavlovian_active(Condition c) {
  return c == Condition::PavlovianInstrumental || c == Condition::FullHybrid;
}
inline bool model_based_active(Condition c) {
  return c == Condition::InstrumentalModelBased || c == Condition::FullHybrid;
}

const char* condition_name(Condition c);
std::optional<Condition> condition_from_name(const std::string& name);

struct ArbitrationConfig {
  double ema_decay = 0.02;
  double sharpness = 5.0;
};

struct RunConfig {
  std::string map = "paper";  // "paper" selects the bundled scenario
  Condition condition = Condition::FullHybrid;
  int episodes = 2400;
  int max_steps = 800;
  int monte_carlo_runs = 60;
  std::uint64_t base_seed = 1;
  std::vector<int> snapshot_episodes;  // empty = default {1, 400} clamped
  int moving_average_window = 1;       // >1 adds a smoothed curve output
  bool shaping_from_pavlovian = true;  // v_pav doubles as the potential
  bool cue_phase_across_episodes = false;

  Hyper hyper;
  PolicyConfig policy;
  RewardConfig rewards;
  LinkBudget link;
  TerminationConfig termination;
  ArbitrationConfig arbitration;
  GpsNoiseModel gps;

  // Copies max_steps into the termination block and fills the default
  // snapshot list. Call after construction or mutation.
  void normalize();
  std::vector<int> resolved_snapshots() const;
};

struct EpisodeMetrics {
  int episode_index = 0;  // 1-based
  int steps_taken = 0;
  TerminationCause cause = TerminationCause::None;
  std::vector<double> instrumental_return;  // per agent
  std::vector<double> pavlovian_return;     // per agent, raw cue rewards
  int collisions = 0;
  std::optional<double> p_mb_mean;  // present only when arbitration is active
};

// Everything one agent learns plus its private random stream.
struct AgentLearner {
  AgentLearner(int num_states, const ArbitrationConfig& arb_cfg,
               std::uint64_t run_seed, int agent_index);

  QTable q_mf;
  QTable q_mb;
  PavlovianTable pav;
  DynaModel model;
  EligibilityTraces traces;
  ArbitrationState arb;
  CuePhase phase;
  bool gate_consumed = false;  // episode-scoped: first gate entry happened
  Rng rng;
};

struct FieldSnapshot {
  int episode = 0;  // 1-based
  int agent = 0;    // 0-based
  std::vector<double> v_pav;  // by state index
};

struct TrainingResult {
  std::vector<EpisodeMetrics> episodes;
  std::vector<FieldSnapshot> snapshots;
  std::vector<std::vector<Cell>> trajectories;  // final greedy, per agent
};

// Immutable per-run machinery: the map, the condition gating, and the
// precomputed radio geometry (per-cell LOS, RSS, and PEB terms). Safe to
// share read-only across Monte Carlo threads.
class Simulator {
 public:
  Simulator(GridMap map, RunConfig cfg);

  const GridMap& map() const { return map_; }
  const RunConfig& config() const { return cfg_; }

  std::vector<AgentLearner> make_learners(std::uint64_t run_seed) const;

  EpisodeMetrics run_episode(std::vector<AgentLearner>& agents,
                             int episode_index0) const;

  TrainingResult run_training(std::uint64_t run_seed,
                              bool capture_artifacts = true) const;

  // Joint argmax rollout from the agent starts with the trained tables;
  // ties break to the lowest action index. Path length capped at max_steps.
  std::vector<std::vector<Cell>> greedy_trajectories(
      const std::vector<AgentLearner>& agents) const;

  // height x width value field (row-major by state index); obstacles are NaN.
  std::vector<double> pavlovian_field(const PavlovianTable& pav) const;
  std::vector<double> pavlovian_field(std::span<const double> v_pav) const;

  double current_peb(const EnvState& state) const;
  bool cell_los_to_target(Cell c) const { return los_[map_.index(c)] != 0; }
  double cell_rss_dbm(Cell c) const { return rss_[map_.index(c)]; }

 private:
  std::vector<Action> select_actions(const EnvState& state,
                                     std::vector<AgentLearner>& agents,
                                     double temperature) const;
  ActionVector policy_scores(const AgentLearner& agent, int s) const;
  CellKind entered_kind(Cell prev, Cell cur) const;

  GridMap map_;
  RunConfig cfg_;
  std::vector<std::uint8_t> los_;                    // per state
  std::vector<double> rss_;                          // per state
  std::vector<detail::RangeObservation> peb_terms_;  // per state
  LosPredicate los_pred_;
};

struct AggregateMetrics {
  std::vector<double> mean_steps;  // per episode, across runs
  std::vector<double> std_steps;   // population std
  std::vector<double> mean_p_mb;   // empty unless arbitration is active
  std::vector<std::vector<int>> per_run_steps;  // [run][episode]
};

struct MonteCarloResult {
  AggregateMetrics aggregate;
  TrainingResult exemplar;  // artifacts from run 0 (seed = base_seed)
};

// Independent trainings with seeds base_seed + run_index, executed on up to
// `num_threads` threads (0 = hardware concurrency). Aggregation happens in
// run-index order, so results do not depend on scheduling.
MonteCarloResult run_monte_carlo(const GridMap& map, const RunConfig& cfg,
                                 int num_threads = 0);

GridMap load_config_map(const RunConfig& cfg);

// Dense height x width matrix of v_pav by (x, y), row-major by state index;
// obstacle cells carry a NaN sentinel (rendered as an empty CSV field).
std::vector<double> pavlovian_field_snapshot(const GridMap& map,
                                             std::span<const double> v_pav);

}  // namespace cuegrid
