#include "cuegrid/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <set>

namespace cuegrid {

using json = nlohmann::ordered_json;

namespace {

// Tracks which keys were consumed so leftovers can be reported by name.
class Section {
 public:
  Section(const json& obj, std::string prefix)
      : obj_(obj), prefix_(std::move(prefix)) {
    if (!obj_.is_object())
      throw ConfigError("config section \"" + display_name() +
                        "\" must be a JSON object");
  }

  std::string display_name() const {
    return prefix_.empty() ? std::string("<root>")
                           : prefix_.substr(0, prefix_.size() - 1);
  }

  std::string qualify(const std::string& key) const { return prefix_ + key; }

  bool has(const std::string& key) {
    if (obj_.contains(key)) {
      seen_.insert(key);
      return true;
    }
    return false;
  }

  const json& raw(const std::string& key) const { return obj_.at(key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number())
      throw ConfigError("\"" + qualify(key) + "\" must be a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer())
      throw ConfigError("\"" + qualify(key) + "\" must be an integer");
    return v.get<int>();
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0))
      throw ConfigError("\"" + qualify(key) + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean())
      throw ConfigError("\"" + qualify(key) + "\" must be a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::string fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string())
      throw ConfigError("\"" + qualify(key) + "\" must be a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key()))
        throw ConfigError("unknown config key \"" + qualify(it.key()) + "\"");
    }
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("\"" + key + "\" " + what);
}

DecaySchedule parse_schedule(Section& sec, const std::string& stem,
                             DecaySchedule defaults) {
  DecaySchedule s;
  s.start = sec.number(stem + "_start", defaults.start);
  s.factor = sec.number(stem + "_factor", defaults.factor);
  s.floor = sec.number(stem + "_floor", defaults.floor);
  require(s.factor > 0.0 && s.factor <= 1.0, sec.qualify(stem + "_factor"),
          "must be in (0, 1]");
  require(s.floor <= s.start, sec.qualify(stem + "_floor"),
          "must not exceed the start value");
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config document: ") + e.what());
  }
  if (!doc.is_object())
    throw ConfigError("config document must be a JSON object");

  RunConfig cfg;
  Section root(doc, "");

  cfg.map = root.string("map", cfg.map);
  require(!cfg.map.empty(), "map", "must not be empty");

  if (root.has("condition")) {
    const json& v = root.raw("condition");
    if (!v.is_string())
      throw ConfigError("\"condition\" must be a string");
    auto c = condition_from_name(v.get<std::string>());
    if (!c)
      throw ConfigError(
          "\"condition\" must be one of instrumental_only, "
          "pavlovian_instrumental, instrumental_model_based, full_hybrid");
    cfg.condition = *c;
  }

  cfg.episodes = root.integer("episodes", cfg.episodes);
  require(cfg.episodes >= 1, "episodes", "must be >= 1");
  cfg.max_steps = root.integer("max_steps", cfg.max_steps);
  require(cfg.max_steps >= 1, "max_steps", "must be >= 1");
  cfg.monte_carlo_runs = root.integer("monte_carlo_runs", cfg.monte_carlo_runs);
  require(cfg.monte_carlo_runs >= 1, "monte_carlo_runs", "must be >= 1");
  cfg.base_seed = root.unsigned64("base_seed", cfg.base_seed);
  cfg.moving_average_window =
      root.integer("moving_average_window", cfg.moving_average_window);
  require(cfg.moving_average_window >= 1, "moving_average_window",
          "must be >= 1");
  cfg.shaping_from_pavlovian =
      root.boolean("shaping_from_pavlovian", cfg.shaping_from_pavlovian);
  cfg.cue_phase_across_episodes = root.boolean("cue_phase_across_episodes",
                                               cfg.cue_phase_across_episodes);

  if (root.has("snapshot_episodes")) {
    const json& v = root.raw("snapshot_episodes");
    if (!v.is_array())
      throw ConfigError("\"snapshot_episodes\" must be an array of integers");
    cfg.snapshot_episodes.clear();
    for (const json& e : v) {
      if (!e.is_number_integer())
        throw ConfigError("\"snapshot_episodes\" must be an array of integers");
      const int ep = e.get<int>();
      require(ep >= 1 && ep <= cfg.episodes, "snapshot_episodes",
              "entries must lie in [1, episodes]");
      cfg.snapshot_episodes.push_back(ep);
    }
  }

  if (root.has("hyper")) {
    Section sec(root.raw("hyper"), "hyper.");
    cfg.hyper.alpha = parse_schedule(sec, "alpha", cfg.hyper.alpha);
    require(cfg.hyper.alpha.start <= 1.0 && cfg.hyper.alpha.floor > 0.0,
            "hyper.alpha_start", "learning rate must stay in (0, 1]");
    cfg.hyper.gamma = sec.number("gamma", cfg.hyper.gamma);
    require(cfg.hyper.gamma > 0.0 && cfg.hyper.gamma < 1.0, "hyper.gamma",
            "must be in (0, 1)");
    cfg.hyper.trace_lambda = sec.number("trace_lambda", cfg.hyper.trace_lambda);
    require(cfg.hyper.trace_lambda >= 0.0 && cfg.hyper.trace_lambda <= 1.0,
            "hyper.trace_lambda", "must be in [0, 1]");
    cfg.hyper.planning_steps =
        sec.integer("planning_steps", cfg.hyper.planning_steps);
    require(cfg.hyper.planning_steps >= 0, "hyper.planning_steps",
            "must be >= 0");
    sec.finish();
  }

  if (root.has("policy")) {
    Section sec(root.raw("policy"), "policy.");
    cfg.policy.temperature =
        parse_schedule(sec, "temperature", cfg.policy.temperature);
    require(cfg.policy.temperature.floor > 0.0, "policy.temperature_floor",
            "must be positive");
    cfg.policy.pav_weight = sec.number("pav_weight", cfg.policy.pav_weight);
    require(cfg.policy.pav_weight >= 0.0, "policy.pav_weight",
            "must be >= 0");
    sec.finish();
  }

  if (root.has("rewards")) {
    Section sec(root.raw("rewards"), "rewards.");
    RewardConfig& rw = cfg.rewards;
    rw.collision_penalty = sec.number("collision_penalty", rw.collision_penalty);
    require(rw.collision_penalty >= 0.0, "rewards.collision_penalty",
            "is subtracted and must be >= 0");
    rw.gate_reward = sec.number("gate_reward", rw.gate_reward);
    rw.gps_denied_penalty =
        sec.number("gps_denied_penalty", rw.gps_denied_penalty);
    rw.nlos_penalty = sec.number("nlos_penalty", rw.nlos_penalty);
    rw.rss_scale = sec.number("rss_scale", rw.rss_scale);
    require(rw.rss_scale >= 0.0, "rewards.rss_scale", "must be >= 0");
    rw.rss_reference_dbm = sec.number("rss_reference_dbm", rw.rss_reference_dbm);
    rw.terminal_bonus = sec.number("terminal_bonus", rw.terminal_bonus);
    sec.finish();
  }

  if (root.has("link")) {
    Section sec(root.raw("link"), "link.");
    LinkBudget& lb = cfg.link;
    lb.tx_power_dbm = sec.number("tx_power_dbm", lb.tx_power_dbm);
    lb.tx_gain_dbi = sec.number("tx_gain_dbi", lb.tx_gain_dbi);
    lb.rx_gain_dbi = sec.number("rx_gain_dbi", lb.rx_gain_dbi);
    lb.bandwidth_hz = sec.number("bandwidth_hz", lb.bandwidth_hz);
    require(lb.bandwidth_hz > 0.0, "link.bandwidth_hz", "must be positive");
    lb.carrier_hz = sec.number("carrier_hz", lb.carrier_hz);
    require(lb.carrier_hz > 0.0, "link.carrier_hz", "must be positive");
    lb.noise_figure_db = sec.number("noise_figure_db", lb.noise_figure_db);
    require(lb.noise_figure_db >= 0.0, "link.noise_figure_db",
            "must be >= 0");
    lb.beta_los = sec.number("beta_los", lb.beta_los);
    lb.beta_nlos = sec.number("beta_nlos", lb.beta_nlos);
    require(lb.beta_los > 0.0, "link.beta_los", "must be positive");
    require(lb.beta_nlos >= lb.beta_los, "link.beta_nlos",
            "must be >= beta_los");
    sec.finish();
  }

  if (root.has("termination")) {
    Section sec(root.raw("termination"), "termination.");
    TerminationConfig& tc = cfg.termination;
    if (sec.has("mode")) {
      const json& v = sec.raw("mode");
      if (!v.is_string() ||
          (v.get<std::string>() != "peb" && v.get<std::string>() != "proximity"))
        throw ConfigError("\"termination.mode\" must be \"peb\" or \"proximity\"");
      tc.mode = v.get<std::string>() == "peb" ? MissionMode::Peb
                                              : MissionMode::Proximity;
    }
    tc.peb_threshold_m = sec.number("peb_threshold_m", tc.peb_threshold_m);
    require(tc.peb_threshold_m > 0.0, "termination.peb_threshold_m",
            "must be positive");
    tc.rss_noise_sigma_db =
        sec.number("rss_noise_sigma_db", tc.rss_noise_sigma_db);
    require(tc.rss_noise_sigma_db > 0.0, "termination.rss_noise_sigma_db",
            "must be positive");
    tc.min_agents = sec.integer("min_agents", tc.min_agents);
    require(tc.min_agents >= 1, "termination.min_agents", "must be >= 1");
    tc.range_cells = sec.integer("range_cells", tc.range_cells);
    require(tc.range_cells >= 0, "termination.range_cells", "must be >= 0");
    sec.finish();
  }

  if (root.has("arbitration")) {
    Section sec(root.raw("arbitration"), "arbitration.");
    cfg.arbitration.ema_decay =
        sec.number("ema_decay", cfg.arbitration.ema_decay);
    require(cfg.arbitration.ema_decay > 0.0 && cfg.arbitration.ema_decay < 1.0,
            "arbitration.ema_decay", "must be in (0, 1)");
    cfg.arbitration.sharpness =
        sec.number("sharpness", cfg.arbitration.sharpness);
    require(cfg.arbitration.sharpness > 0.0, "arbitration.sharpness",
            "must be positive");
    sec.finish();
  }

  if (root.has("gps")) {
    Section sec(root.raw("gps"), "gps.");
    cfg.gps.variance_per_axis_m2 =
        sec.number("variance_per_axis_m2", cfg.gps.variance_per_axis_m2);
    require(cfg.gps.variance_per_axis_m2 >= 0.0, "gps.variance_per_axis_m2",
            "must be >= 0");
    sec.finish();
  }

  root.finish();
  cfg.normalize();
  return cfg;
}

nlohmann::ordered_json config_to_json(const RunConfig& input) {
  RunConfig cfg = input;
  cfg.normalize();
  json doc;
  doc["map"] = cfg.map;
  doc["condition"] = condition_name(cfg.condition);
  doc["episodes"] = cfg.episodes;
  doc["max_steps"] = cfg.max_steps;
  doc["monte_carlo_runs"] = cfg.monte_carlo_runs;
  doc["base_seed"] = cfg.base_seed;
  doc["snapshot_episodes"] = cfg.snapshot_episodes;
  doc["moving_average_window"] = cfg.moving_average_window;
  doc["shaping_from_pavlovian"] = cfg.shaping_from_pavlovian;
  doc["cue_phase_across_episodes"] = cfg.cue_phase_across_episodes;
  doc["hyper"] = {{"alpha_start", cfg.hyper.alpha.start},
                  {"alpha_factor", cfg.hyper.alpha.factor},
                  {"alpha_floor", cfg.hyper.alpha.floor},
                  {"gamma", cfg.hyper.gamma},
                  {"trace_lambda", cfg.hyper.trace_lambda},
                  {"planning_steps", cfg.hyper.planning_steps}};
  doc["policy"] = {{"temperature_start", cfg.policy.temperature.start},
                   {"temperature_factor", cfg.policy.temperature.factor},
                   {"temperature_floor", cfg.policy.temperature.floor},
                   {"pav_weight", cfg.policy.pav_weight}};
  doc["rewards"] = {{"collision_penalty", cfg.rewards.collision_penalty},
                    {"gate_reward", cfg.rewards.gate_reward},
                    {"gps_denied_penalty", cfg.rewards.gps_denied_penalty},
                    {"nlos_penalty", cfg.rewards.nlos_penalty},
                    {"rss_scale", cfg.rewards.rss_scale},
                    {"rss_reference_dbm", cfg.rewards.rss_reference_dbm},
                    {"terminal_bonus", cfg.rewards.terminal_bonus}};
  doc["link"] = {{"tx_power_dbm", cfg.link.tx_power_dbm},
                 {"tx_gain_dbi", cfg.link.tx_gain_dbi},
                 {"rx_gain_dbi", cfg.link.rx_gain_dbi},
                 {"bandwidth_hz", cfg.link.bandwidth_hz},
                 {"carrier_hz", cfg.link.carrier_hz},
                 {"noise_figure_db", cfg.link.noise_figure_db},
                 {"beta_los", cfg.link.beta_los},
                 {"beta_nlos", cfg.link.beta_nlos}};
  doc["termination"] = {
      {"mode", cfg.termination.mode == MissionMode::Peb ? "peb" : "proximity"},
      {"peb_threshold_m", cfg.termination.peb_threshold_m},
      {"rss_noise_sigma_db", cfg.termination.rss_noise_sigma_db},
      {"min_agents", cfg.termination.min_agents},
      {"range_cells", cfg.termination.range_cells}};
  doc["arbitration"] = {{"ema_decay", cfg.arbitration.ema_decay},
                        {"sharpness", cfg.arbitration.sharpness}};
  doc["gps"] = {{"variance_per_axis_m2", cfg.gps.variance_per_axis_m2}};
  return doc;
}

std::string serialize_config(const RunConfig& cfg) {
  return config_to_json(cfg).dump(2) + "\n";
}

void apply_override(nlohmann::ordered_json& doc, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must have the form key=value, got \"" +
                      assignment + "\"");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // bare words become strings
  }

  json* node = &doc;
  size_t pos = 0;
  while (true) {
    const size_t dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (key.empty())
      throw ConfigError("override key \"" + path + "\" is malformed");
    if (dot == std::string::npos) {
      (*node)[key] = parsed;
      return;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

}  // namespace cuegrid
