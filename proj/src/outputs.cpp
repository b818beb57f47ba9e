#include "cuegrid/outputs.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cuegrid/config.hpp"
#include "cuegrid/version.hpp"

namespace cuegrid {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string format_db(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<double> moving_average(const std::vector<double>& series,
                                   int window) {
  std::vector<double> out(series.size());
  double acc = 0.0;
  for (size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<size_t>(window)) acc -= series[i - window];
    const int n = std::min<int>(window, static_cast<int>(i) + 1);
    out[i] = acc / n;
  }
  return out;
}

// --- native SVG rendering ---

std::string svg_line_chart(const std::vector<std::string>& labels,
                           const std::vector<const std::vector<double>*>& series,
                           const std::string& y_label) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const int w = 760, h = 480, ml = 60, mr = 16, mt = 20, mb = 44;
  double y_max = 1.0;
  size_t n = 0;
  for (const auto* s : series) {
    n = std::max(n, s->size());
    for (double v : *s) y_max = std::max(y_max, v);
  }
  const double px = (w - ml - mr) / std::max<double>(1.0, double(n) - 1);
  const double py = (h - mt - mb) / y_max;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + std::to_string(mt) +
         "\" x2=\"" + std::to_string(ml) + "\" y2=\"" +
         std::to_string(h - mb) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" +
         std::to_string(h - mb) + "\" x2=\"" + std::to_string(w - mr) +
         "\" y2=\"" + std::to_string(h - mb) + "\" stroke=\"black\"/>\n";
  out += "<text x=\"14\" y=\"" + std::to_string(h / 2) +
         "\" transform=\"rotate(-90 14 " + std::to_string(h / 2) +
         ")\" font-size=\"12\" text-anchor=\"middle\">" + y_label +
         "</text>\n";
  out += "<text x=\"" + std::to_string((w + ml) / 2) + "\" y=\"" +
         std::to_string(h - 10) +
         "\" font-size=\"12\" text-anchor=\"middle\">episode</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = *series[k];
    std::string pts;
    for (size_t i = 0; i < s.size(); ++i) {
      pts += format_double(ml + px * double(i)) + "," +
             format_double(h - mb - py * s[i]) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(kColors[k % 4]) +
           "\" stroke-width=\"1.2\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + std::to_string(ml + 10) + "\" y=\"" +
           std::to_string(mt + 16 + 16 * int(k)) + "\" font-size=\"12\" fill=\"" +
           kColors[k % 4] + "\">" + labels[k] + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string heat_color(double t) {
  // blue (low) -> white (mid) -> red (high)
  t = std::clamp(t, 0.0, 1.0);
  int r, g, b;
  if (t < 0.5) {
    const double u = t * 2.0;
    r = static_cast<int>(255 * u);
    g = static_cast<int>(255 * u);
    b = 255;
  } else {
    const double u = (t - 0.5) * 2.0;
    r = 255;
    g = static_cast<int>(255 * (1.0 - u));
    b = static_cast<int>(255 * (1.0 - u));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

std::string svg_heatmap(const GridMap& map, const std::vector<double>& field) {
  const int cell = 18;
  const int w = map.width() * cell, h = map.height() * cell;
  double lo = 0.0, hi = 0.0;
  for (double v : field) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = std::max(hi - lo, 1e-12);
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(w) + "\" height=\"" + std::to_string(h) + "\">\n";
  for (int s = 0; s < map.num_states(); ++s) {
    const Cell c = map.cell(s);
    const int px = c.x * cell;
    const int py = (map.height() - 1 - c.y) * cell;  // y axis points up
    std::string fill =
        std::isnan(field[s]) ? "#000000" : heat_color((field[s] - lo) / span);
    out += "<rect x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(py) +
           "\" width=\"" + std::to_string(cell) + "\" height=\"" +
           std::to_string(cell) + "\" fill=\"" + fill + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

// --- CSV assembly ---

std::string condition_curve_csv(const RunConfig& cfg,
                                const AggregateMetrics& agg) {
  std::string body = "episode,mean_steps,std_steps";
  const bool with_pmb = !agg.mean_p_mb.empty();
  if (with_pmb) body += ",mean_p_mb";
  body += "\n";
  for (size_t e = 0; e < agg.mean_steps.size(); ++e) {
    body += std::to_string(e + 1) + "," + format_double(agg.mean_steps[e]) +
            "," + format_double(agg.std_steps[e]);
    if (with_pmb) body += "," + format_double(agg.mean_p_mb[e]);
    body += "\n";
  }
  (void)cfg;
  return body;
}

std::string field_csv(const GridMap& map, const std::vector<double>& field) {
  std::string body = "x,y,v_pav\n";
  for (int s = 0; s < map.num_states(); ++s) {
    const Cell c = map.cell(s);
    body += std::to_string(c.x) + "," + std::to_string(c.y) + "," +
            format_double(field[s]) + "\n";
  }
  return body;
}

std::string trajectory_csv(const std::vector<Cell>& path) {
  std::string body = "step,x,y\n";
  for (size_t i = 0; i < path.size(); ++i) {
    body += std::to_string(i) + "," + std::to_string(path[i].x) + "," +
            std::to_string(path[i].y) + "\n";
  }
  return body;
}

struct Emitter {
  std::filesystem::path dir;
  std::vector<std::string> files;

  void emit(const std::string& name, const std::string& body) {
    write_file(dir / name, body);
    files.push_back(name);
  }
};

void emit_condition_artifacts(Emitter& em, const RunConfig& cfg,
                              const GridMap& map,
                              const MonteCarloResult& result,
                              const std::string& field_prefix,
                              const EmitOptions& opts) {
  const std::string cond = condition_name(cfg.condition);

  em.emit("learning_curve_" + cond + ".csv",
          condition_curve_csv(cfg, result.aggregate));
  if (cfg.moving_average_window > 1) {
    AggregateMetrics smoothed = result.aggregate;
    smoothed.mean_steps =
        moving_average(result.aggregate.mean_steps, cfg.moving_average_window);
    smoothed.std_steps =
        moving_average(result.aggregate.std_steps, cfg.moving_average_window);
    if (!smoothed.mean_p_mb.empty())
      smoothed.mean_p_mb = moving_average(result.aggregate.mean_p_mb,
                                          cfg.moving_average_window);
    em.emit("learning_curve_" + cond + "_smoothed.csv",
            condition_curve_csv(cfg, smoothed));
  }

  for (const FieldSnapshot& snap : result.exemplar.snapshots) {
    const std::vector<double> field = pavlovian_field_snapshot(map, snap.v_pav);
    const std::string stem = field_prefix + "ep" + std::to_string(snap.episode) +
                             "_agent" + std::to_string(snap.agent + 1);
    em.emit(stem + ".csv", field_csv(map, field));
    if (opts.svg) em.emit(stem + ".svg", svg_heatmap(map, field));
  }

  for (size_t i = 0; i < result.exemplar.trajectories.size(); ++i) {
    em.emit("trajectory_" + cond + "_agent" + std::to_string(i + 1) + ".csv",
            trajectory_csv(result.exemplar.trajectories[i]));
  }
}

json manifest_skeleton(const RunConfig& cfg, const std::string& command) {
  json m;
  m["tool"] = "cuegrid";
  m["version"] = kVersion;
  m["format"] = 1;
  m["command"] = command;
  m["config"] = config_to_json(cfg);
  json seeds;
  seeds["base"] = cfg.base_seed;
  json run_seeds = json::array();
  for (int r = 0; r < cfg.monte_carlo_runs; ++r)
    run_seeds.push_back(cfg.base_seed + r);
  seeds["runs"] = run_seeds;
  seeds["artifact_run"] = cfg.base_seed;  // fields/trajectories come from run 0
  m["seeds"] = seeds;
  json derived;
  derived["noise_floor_dbm"] = format_db(noise_floor_dbm(cfg.link));
  derived["rss_at_1m_los_dbm"] = format_db(rss_dbm(cfg.link, 1.0, true));
  derived["rss_at_10m_nlos_dbm"] = format_db(rss_dbm(cfg.link, 10.0, false));
  m["derived"] = derived;
  return m;
}

}  // namespace

std::vector<std::string> emit_run_outputs(const std::filesystem::path& dir,
                                          const RunConfig& input_cfg,
                                          const MonteCarloResult& result,
                                          const EmitOptions& opts) {
  RunConfig cfg = input_cfg;
  cfg.normalize();
  std::filesystem::create_directories(dir);
  Emitter em{dir, {}};
  const GridMap map = load_config_map(cfg);

  em.emit("learning_curve.csv", condition_curve_csv(cfg, result.aggregate));
  if (opts.svg) {
    em.emit("learning_curve.svg",
            svg_line_chart({condition_name(cfg.condition)},
                           {&result.aggregate.mean_steps}, "steps"));
  }
  emit_condition_artifacts(em, cfg, map, result, "pav_field_", opts);

  json manifest = manifest_skeleton(cfg, "run");
  manifest["outputs"] = em.files;
  em.emit("run_manifest.json", manifest.dump(2) + "\n");
  return em.files;
}

std::vector<std::string> emit_compare_outputs(
    const std::filesystem::path& dir, const RunConfig& base_cfg,
    const std::vector<std::pair<Condition, MonteCarloResult>>& results,
    const EmitOptions& opts) {
  std::filesystem::create_directories(dir);
  Emitter em{dir, {}};
  RunConfig cfg = base_cfg;
  cfg.normalize();
  const GridMap map = load_config_map(cfg);

  // Combined curve: episode plus one mean-steps column per condition.
  std::string body = "episode";
  for (const auto& [cond, _] : results) body += "," + std::string(condition_name(cond));
  body += "\n";
  const size_t episodes = results.front().second.aggregate.mean_steps.size();
  for (size_t e = 0; e < episodes; ++e) {
    body += std::to_string(e + 1);
    for (const auto& [_, res] : results)
      body += "," + format_double(res.aggregate.mean_steps[e]);
    body += "\n";
  }
  em.emit("learning_curve.csv", body);
  if (opts.svg) {
    std::vector<std::string> labels;
    std::vector<const std::vector<double>*> series;
    for (const auto& [cond, res] : results) {
      labels.push_back(condition_name(cond));
      series.push_back(&res.aggregate.mean_steps);
    }
    em.emit("learning_curve.svg", svg_line_chart(labels, series, "steps"));
  }

  for (const auto& [cond, res] : results) {
    RunConfig cond_cfg = cfg;
    cond_cfg.condition = cond;
    const std::string prefix =
        "pav_field_" + std::string(condition_name(cond)) + "_";
    emit_condition_artifacts(em, cond_cfg, map, res, prefix, opts);
  }

  json manifest = manifest_skeleton(cfg, "compare");
  manifest["outputs"] = em.files;
  em.emit("run_manifest.json", manifest.dump(2) + "\n");
  return em.files;
}

std::vector<std::string> emit_snapshot_outputs(const std::string& manifest_text,
                                               const std::filesystem::path& dir) {
  json manifest;
  try {
    manifest = json::parse(manifest_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.contains("config") || !manifest.contains("command"))
    throw ConfigError("manifest lacks config/command fields");
  const RunConfig cfg = parse_config(manifest["config"].dump());
  const std::string command = manifest["command"].get<std::string>();
  const GridMap map = load_config_map(cfg);

  std::vector<Condition> conditions;
  if (command == "compare") {
    conditions = {Condition::InstrumentalOnly, Condition::PavlovianInstrumental,
                  Condition::InstrumentalModelBased, Condition::FullHybrid};
  } else {
    conditions = {cfg.condition};
  }

  std::filesystem::create_directories(dir);
  Emitter em{dir, {}};
  for (Condition c : conditions) {
    RunConfig cond_cfg = cfg;
    cond_cfg.condition = c;
    const Simulator sim(map, cond_cfg);
    const TrainingResult training = sim.run_training(cfg.base_seed, true);
    const std::string cond = condition_name(c);
    const std::string field_prefix =
        command == "compare" ? "pav_field_" + cond + "_" : "pav_field_";
    for (const FieldSnapshot& snap : training.snapshots) {
      const auto field = pavlovian_field_snapshot(map, snap.v_pav);
      em.emit(field_prefix + "ep" + std::to_string(snap.episode) + "_agent" +
                  std::to_string(snap.agent + 1) + ".csv",
              field_csv(map, field));
    }
    for (size_t i = 0; i < training.trajectories.size(); ++i) {
      em.emit("trajectory_" + cond + "_agent" + std::to_string(i + 1) + ".csv",
              trajectory_csv(training.trajectories[i]));
    }
  }
  return em.files;
}

}  // namespace cuegrid
