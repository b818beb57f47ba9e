#include "cuegrid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "cuegrid/scenario.hpp"

namespace cuegrid {

const char* condition_name(Condition c) {
  switch (c) {
    case Condition::InstrumentalOnly: return "instrumental_only";
    case Condition::PavlovianInstrumental: return "pavlovian_instrumental";
    case Condition::InstrumentalModelBased: return "instrumental_model_based";
    case Condition::FullHybrid: return "full_hybrid";
  }
  return "unknown";
}

std::optional<Condition> condition_from_name(const std::string& name) {
  for (Condition c : {Condition::InstrumentalOnly,
                      Condition::PavlovianInstrumental,
                      Condition::InstrumentalModelBased,
                      Condition::FullHybrid}) {
    if (name == condition_name(c)) return c;
  }
  return std::nullopt;
}

void RunConfig::normalize() {
  termination.max_steps = max_steps;
  snapshot_episodes = resolved_snapshots();
}

std::vector<int> RunConfig::resolved_snapshots() const {
  if (!snapshot_episodes.empty()) return snapshot_episodes;
  std::vector<int> out{1};
  if (episodes >= 400)
    out.push_back(400);
  else if (episodes > 1)
    out.push_back(episodes);
  return out;
}

AgentLearner::AgentLearner(int num_states, const ArbitrationConfig& arb_cfg,
                           std::uint64_t run_seed, int agent_index)
    : q_mf(num_states),
      q_mb(num_states),
      pav(num_states),
      model(num_states),
      traces(num_states),
      rng(make_agent_rng(run_seed, agent_index)) {
  arb.ema_decay = arb_cfg.ema_decay;
  arb.sharpness = arb_cfg.sharpness;
}

// --- Simulator ---

Simulator::Simulator(GridMap map, RunConfig cfg)
    : map_(std::move(map)), cfg_(std::move(cfg)) {
  cfg_.normalize();
  const int n = map_.num_states();
  los_.resize(n);
  rss_.resize(n);
  peb_terms_.resize(n);
  const Cell target = map_.target();
  for (int s = 0; s < n; ++s) {
    const Cell c = map_.cell(s);
    const bool los = line_of_sight(map_, c, target);
    los_[s] = los ? 1 : 0;
    rss_[s] = rss_dbm(cfg_.link, cell_distance_m(c, target), los);
    peb_terms_[s] = {static_cast<double>(c.x - target.x),
                     static_cast<double>(c.y - target.y),
                     los ? cfg_.link.beta_los : cfg_.link.beta_nlos};
  }
  los_pred_ = [this](Cell c) { return cell_los_to_target(c); };
}

double Simulator::current_peb(const EnvState& state) const {
  std::array<detail::RangeObservation, 16> obs;
  const size_t n = std::min(state.agent_cells.size(), obs.size());
  for (size_t i = 0; i < n; ++i)
    obs[i] = peb_terms_[map_.index(state.agent_cells[i])];
  return detail::peb_from_geometry({obs.data(), n},
                                   cfg_.termination.rss_noise_sigma_db);
}

ActionVector Simulator::policy_scores(const AgentLearner& agent, int s) const {
  ActionVector base;
  if (model_based_active(cfg_.condition)) {
    base = hybrid_q(agent.q_mf, agent.q_mb, agent.arb.p_mb, s);
  } else {
    const auto row = agent.q_mf.row(s);
    std::copy(row.begin(), row.end(), base.begin());
  }
  // The raw approach/avoidance bias steers exploration while the approach
  // cue is still ahead. Once the gate is consumed the Pavlovian channel is
  // the potential-based shaping, which cannot distort the optimum; keeping
  // the bias active after consumption makes agents orbit the cue instead
  // of finishing the mission.
  const bool bias_on =
      pavlovian_active(cfg_.condition) && !agent.gate_consumed;
  return action_scores(base, agent.pav, s, cfg_.policy.pav_weight, bias_on);
}

std::vector<Action> Simulator::select_actions(const EnvState& state,
                                              std::vector<AgentLearner>& agents,
                                              double temperature) const {
  std::vector<Action> actions(agents.size());
  for (size_t i = 0; i < agents.size(); ++i) {
    const int s = map_.index(state.agent_cells[i]);
    const ActionVector probs =
        softmax_probs(policy_scores(agents[i], s), temperature);
    actions[i] = sample_action(probs, agents[i].rng);
  }
  return actions;
}

CellKind Simulator::entered_kind(Cell prev, Cell cur) const {
  if (prev == cur) return CellKind::Free;
  const CellKind k = map_.kind(cur);
  return k == map_.kind(prev) ? CellKind::Free : k;
}

std::vector<AgentLearner> Simulator::make_learners(
    std::uint64_t run_seed) const {
  std::vector<AgentLearner> agents;
  const int n_agents = static_cast<int>(map_.agent_starts().size());
  agents.reserve(n_agents);
  for (int i = 0; i < n_agents; ++i)
    agents.emplace_back(map_.num_states(), cfg_.arbitration, run_seed, i);
  return agents;
}

EpisodeMetrics Simulator::run_episode(std::vector<AgentLearner>& agents,
                                      int episode_index0) const {
  const int n_agents = static_cast<int>(agents.size());
  const double alpha = schedule_value(cfg_.hyper.alpha, episode_index0);
  const double tau = schedule_value(cfg_.policy.temperature, episode_index0);
  const double gamma = cfg_.hyper.gamma;
  const bool pav_on = pavlovian_active(cfg_.condition);
  const bool mb_on = model_based_active(cfg_.condition);

  EpisodeMetrics metrics;
  metrics.instrumental_return.assign(n_agents, 0.0);
  metrics.pavlovian_return.assign(n_agents, 0.0);

  for (AgentLearner& agent : agents) {
    agent.traces.reset();
    agent.gate_consumed = false;
    if (!cfg_.cue_phase_across_episodes) {
      agent.phase = CuePhase{};
    } else if (agent.phase.phase == CuePhaseKind::PostCue) {
      agent.traces.activate();
    }
  }

  EnvState state{map_.agent_starts(), 0};
  double p_mb_sum = 0.0;
  std::int64_t p_mb_samples = 0;
  // The positive cue pays out on its first encounter in an episode; later
  // re-entries are not reinforced, otherwise shuttling across a gate
  // boundary farms the +5 and re-entry loops dominate the critic's field.
  // The aversive cue is assessed per step of occupancy: a penalty cannot
  // be farmed, and exposure while inside the area is what carves the
  // field minima into the denied region itself.

  auto finish = [&](TerminationCause cause) {
    metrics.steps_taken = state.step_index;
    metrics.cause = cause;
    if (mb_on && p_mb_samples > 0)
      metrics.p_mb_mean = p_mb_sum / static_cast<double>(p_mb_samples);
    return metrics;
  };

  {
    const double peb0 = cfg_.termination.mode == MissionMode::Peb
                            ? current_peb(state)
                            : 0.0;
    auto [term0, cause0] =
        is_terminal(map_, state, cfg_.termination, peb0, los_pred_);
    if (term0) return finish(cause0);
  }

  std::vector<Action> actions = select_actions(state, agents, tau);
  while (true) {
    StepOutcome outcome = apply_joint_action(map_, state, actions);
    const EnvState& next = outcome.next_state;
    const int executed_step = state.step_index;  // 0-based

    const double peb_v = cfg_.termination.mode == MissionMode::Peb
                             ? current_peb(next)
                             : 0.0;
    auto [term, cause] =
        is_terminal(map_, next, cfg_.termination, peb_v, los_pred_);
    const bool mission = term && cause == TerminationCause::MissionAccomplished;

    // SARSA consumes the action actually taken next, so the next joint
    // action is chosen before any table changes.
    std::vector<Action> next_actions = select_actions(next, agents, tau);

    for (int i = 0; i < n_agents; ++i) {
      AgentLearner& agent = agents[i];
      const Cell prev_cell = state.agent_cells[i];
      const Cell next_cell = next.agent_cells[i];
      const int s = map_.index(prev_cell);
      const int s2 = map_.index(next_cell);
      const int a = static_cast<int>(actions[i]);
      const bool collided = outcome.collided[i];
      const bool los2 = cell_los_to_target(next_cell);

      const double r_instr =
          instrumental_reward(cfg_.rewards, rss_[s2], collided, mission);
      metrics.instrumental_return[i] += r_instr;
      if (collided) ++metrics.collisions;

      double r_learn = r_instr;
      double rpe = 0.0;
      if (pav_on) {
        CellKind entered = entered_kind(prev_cell, next_cell);
        if (entered == CellKind::Gate) {
          if (agent.gate_consumed) entered = CellKind::Free;
          agent.gate_consumed = true;
        }
        if (map_.kind(next_cell) == CellKind::GpsDenied)
          entered = CellKind::GpsDenied;
        // Cue events only: gate/denied features with their LOS context.
        // Charging the NLOS term on every ordinary cell instead turns the
        // critic's field into a visit-frequency map and erases the
        // gate/denied structure.
        const double r_pav = entered != CellKind::Free
                                 ? pavlovian_reward(cfg_.rewards, entered, los2)
                                 : 0.0;
        metrics.pavlovian_return[i] += r_pav;

        const bool in_post = agent.phase.phase == CuePhaseKind::PostCue;
        if (in_post) {
          if (cfg_.shaping_from_pavlovian)
            r_learn += shaping_reward(agent.pav.v, s, s2, gamma);
          rpe = sarsa_update(agent.q_mf, agent.traces, s, a, r_learn, s2,
                             static_cast<int>(next_actions[i]), alpha, gamma,
                             cfg_.hyper.trace_lambda);
        } else {
          rpe = q_learning_update(agent.q_mf, s, a, r_learn, s2, alpha, gamma);
        }

        // The triggering transition itself still updates with pre-cue
        // rules; shaping and traces start on the next one.
        const bool cue_entered =
            entered == CellKind::Gate || entered == CellKind::GpsDenied;
        const CuePhase stepped =
            cue_phase_step(agent.phase, cue_entered, executed_step);
        if (!in_post && stepped.phase == CuePhaseKind::PostCue) {
          agent.traces.reset();
          agent.traces.activate();
        }
        agent.phase = stepped;

        pavlovian_update(agent.pav, s, a, r_pav, s2, alpha, gamma);
      } else {
        rpe = q_learning_update(agent.q_mf, s, a, r_learn, s2, alpha, gamma);
      }

      if (mb_on) {
        // The model memorizes raw environment rewards. Storing shaped
        // rewards instead leaves stale potential terms in rarely-revisited
        // pairs, and planning keeps re-injecting them.
        const double spe = agent.model.prediction_error(s, a, s2);
        agent.model.observe(s, a, r_instr, s2);
        q_learning_update(agent.q_mb, s, a, r_instr, s2, alpha, gamma);
        dyna_plan(agent.model, agent.q_mb, cfg_.hyper.planning_steps, alpha,
                  gamma, agent.rng);
        arbitration_update(agent.arb, rpe, spe);
        p_mb_sum += agent.arb.p_mb;
        ++p_mb_samples;
      }
    }

    state = std::move(outcome.next_state);
    actions = std::move(next_actions);
    if (term) return finish(cause);
  }
}

TrainingResult Simulator::run_training(std::uint64_t run_seed,
                                       bool capture_artifacts) const {
  TrainingResult result;
  std::vector<AgentLearner> agents = make_learners(run_seed);
  const std::vector<int>& snaps = cfg_.snapshot_episodes;

  result.episodes.reserve(cfg_.episodes);
  for (int ep = 1; ep <= cfg_.episodes; ++ep) {
    EpisodeMetrics m = run_episode(agents, ep - 1);
    m.episode_index = ep;
    result.episodes.push_back(std::move(m));
    if (capture_artifacts && pavlovian_active(cfg_.condition) &&
        std::find(snaps.begin(), snaps.end(), ep) != snaps.end()) {
      for (size_t i = 0; i < agents.size(); ++i)
        result.snapshots.push_back(
            {ep, static_cast<int>(i), agents[i].pav.v});
    }
  }
  if (capture_artifacts)
    result.trajectories = greedy_trajectories(agents);
  return result;
}

namespace {
int argmax_lowest(const ActionVector& v) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a)
    if (v[a] > v[best]) best = a;
  return best;
}
}  // namespace

std::vector<std::vector<Cell>> Simulator::greedy_trajectories(
    const std::vector<AgentLearner>& agents) const {
  const int n_agents = static_cast<int>(agents.size());
  std::vector<std::vector<Cell>> paths(n_agents);
  EnvState state{map_.agent_starts(), 0};
  for (int i = 0; i < n_agents; ++i) paths[i].push_back(state.agent_cells[i]);

  while (static_cast<int>(paths[0].size()) < cfg_.max_steps) {
    const double peb_v = cfg_.termination.mode == MissionMode::Peb
                             ? current_peb(state)
                             : 0.0;
    auto [term, cause] =
        is_terminal(map_, state, cfg_.termination, peb_v, los_pred_);
    (void)cause;
    if (term) break;

    std::vector<Action> actions(n_agents);
    for (int i = 0; i < n_agents; ++i) {
      const int s = map_.index(state.agent_cells[i]);
      actions[i] = static_cast<Action>(argmax_lowest(policy_scores(agents[i], s)));
    }
    StepOutcome outcome = apply_joint_action(map_, state, actions);
    state = std::move(outcome.next_state);
    for (int i = 0; i < n_agents; ++i) paths[i].push_back(state.agent_cells[i]);
  }
  return paths;
}

std::vector<double> Simulator::pavlovian_field(
    const PavlovianTable& pav) const {
  return pavlovian_field_snapshot(map_, pav.v);
}

std::vector<double> Simulator::pavlovian_field(
    std::span<const double> v_pav) const {
  return pavlovian_field_snapshot(map_, v_pav);
}

std::vector<double> pavlovian_field_snapshot(const GridMap& map,
                                             std::span<const double> v_pav) {
  std::vector<double> field(map.num_states());
  for (int s = 0; s < map.num_states(); ++s) {
    field[s] = map.kind(map.cell(s)) == CellKind::Obstacle
                   ? std::numeric_limits<double>::quiet_NaN()
                   : v_pav[s];
  }
  return field;
}

// --- Monte Carlo ---

MonteCarloResult run_monte_carlo(const GridMap& map, const RunConfig& cfg,
                                 int num_threads) {
  RunConfig local = cfg;
  local.normalize();
  const Simulator sim(map, local);
  const int runs = local.monte_carlo_runs;

  std::vector<TrainingResult> results(runs);
  int threads = num_threads > 0
                    ? num_threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, runs));

  std::atomic<int> next_run{0};
  auto worker = [&]() {
    while (true) {
      const int r = next_run.fetch_add(1);
      if (r >= runs) break;
      results[r] = sim.run_training(local.base_seed + r, r == 0);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  MonteCarloResult out;
  AggregateMetrics& agg = out.aggregate;
  const int episodes = local.episodes;
  agg.mean_steps.assign(episodes, 0.0);
  agg.std_steps.assign(episodes, 0.0);
  agg.per_run_steps.assign(runs, std::vector<int>(episodes, 0));
  const bool mb_on = model_based_active(local.condition);
  if (mb_on) agg.mean_p_mb.assign(episodes, 0.0);

  for (int r = 0; r < runs; ++r)
    for (int e = 0; e < episodes; ++e)
      agg.per_run_steps[r][e] = results[r].episodes[e].steps_taken;

  for (int e = 0; e < episodes; ++e) {
    double sum = 0.0, sum_sq = 0.0, p_sum = 0.0;
    int p_count = 0;
    for (int r = 0; r < runs; ++r) {
      const double steps = agg.per_run_steps[r][e];
      sum += steps;
      sum_sq += steps * steps;
      if (mb_on && results[r].episodes[e].p_mb_mean) {
        p_sum += *results[r].episodes[e].p_mb_mean;
        ++p_count;
      }
    }
    const double mean = sum / runs;
    agg.mean_steps[e] = mean;
    const double var = std::max(0.0, sum_sq / runs - mean * mean);
    agg.std_steps[e] = std::sqrt(var);
    if (mb_on) agg.mean_p_mb[e] = p_count > 0 ? p_sum / p_count : 0.0;
  }

  out.exemplar = std::move(results[0]);
  return out;
}

GridMap load_config_map(const RunConfig& cfg) {
  if (cfg.map == "paper") return paper_scenario();
  std::ifstream in(cfg.map, std::ios::binary);
  if (!in)
    throw MapError("cannot open map file: " + cfg.map);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_map(buf.str());
}

}  // namespace cuegrid
