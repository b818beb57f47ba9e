#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cuegrid/config.hpp"
#include "cuegrid/experiment.hpp"
#include "cuegrid/outputs.hpp"
#include "cuegrid/scenario.hpp"
#include "cuegrid/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cuegrid;

namespace {

// Exit codes: 0 success, 2 config error, 3 map error, 4 I/O error.
constexpr int kExitConfig = 2;
constexpr int kExitMap = 3;
constexpr int kExitIo = 4;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides,
                      std::optional<std::uint64_t> seed) {
  json doc;
  try {
    doc = json::parse(read_file(config_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config document: ") + e.what());
  }
  for (const std::string& o : overrides) apply_override(doc, o);
  if (seed) doc["base_seed"] = *seed;
  return parse_config(doc.dump());
}

void print_summary(const RunConfig& cfg, const MonteCarloResult& result,
                   const std::vector<std::string>& files,
                   const fs::path& out_dir) {
  const auto& m = result.aggregate.mean_steps;
  std::printf("condition: %s\n", condition_name(cfg.condition));
  std::printf("episodes: %d, runs: %d, base seed: %llu\n", cfg.episodes,
              cfg.monte_carlo_runs,
              static_cast<unsigned long long>(cfg.base_seed));
  std::printf("noise floor: %.2f dBm\n", noise_floor_dbm(cfg.link));
  if (!m.empty())
    std::printf("mean steps: episode 1 = %.1f, final = %.1f\n", m.front(),
                m.back());
  std::printf("wrote %zu files to %s\n", files.size(), out_dir.c_str());
}

int cmd_run(const std::string& config_path, const fs::path& out_dir,
            const std::vector<std::string>& overrides,
            std::optional<std::uint64_t> seed, bool svg, int threads) {
  const RunConfig cfg = load_config(config_path, overrides, seed);
  const GridMap map = load_config_map(cfg);
  const MonteCarloResult result = run_monte_carlo(map, cfg, threads);
  const auto files = emit_run_outputs(out_dir, cfg, result, {svg});
  print_summary(cfg, result, files, out_dir);
  return 0;
}

int cmd_compare(const std::string& config_path, const fs::path& out_dir,
                const std::vector<std::string>& overrides,
                std::optional<std::uint64_t> seed, bool svg, int threads) {
  RunConfig cfg = load_config(config_path, overrides, seed);
  const GridMap map = load_config_map(cfg);
  std::vector<std::pair<Condition, MonteCarloResult>> results;
  for (Condition c : {Condition::InstrumentalOnly,
                      Condition::PavlovianInstrumental,
                      Condition::InstrumentalModelBased,
                      Condition::FullHybrid}) {
    RunConfig cond_cfg = cfg;
    cond_cfg.condition = c;  // all four share the same seeds
    std::printf("running %s...\n", condition_name(c));
    std::fflush(stdout);
    results.emplace_back(c, run_monte_carlo(map, cond_cfg, threads));
  }
  const auto files = emit_compare_outputs(out_dir, cfg, results, {svg});
  std::printf("wrote %zu files to %s\n", files.size(), out_dir.c_str());
  return 0;
}

int cmd_snapshot(const fs::path& manifest_path, fs::path out_dir) {
  if (out_dir.empty()) out_dir = manifest_path.parent_path();
  const auto files = emit_snapshot_outputs(read_file(manifest_path), out_dir);
  std::printf("re-emitted %zu files to %s\n", files.size(), out_dir.c_str());
  return 0;
}

int cmd_validate_map(const fs::path& path) {
  const std::string text = read_file(path);
  const GridMap map = load_map(text);
  int gates = 0, denied = 0, obstacles = 0;
  for (CellKind k : map.cells()) {
    gates += k == CellKind::Gate;
    denied += k == CellKind::GpsDenied;
    obstacles += k == CellKind::Obstacle;
  }
  std::printf("map ok: %dx%d (%d states)\n", map.width(), map.height(),
              map.num_states());
  std::printf("agents: %zu, target: (%d,%d)\n", map.agent_starts().size(),
              map.target().x, map.target().y);
  std::printf("obstacles: %d, gates: %d, gps-denied: %d\n", obstacles, gates,
              denied);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cue-guided multi-agent RL grid-world simulator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool svg = false;
  int threads = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--seed", seed, "override base_seed");
    sub->add_option("--set", overrides,
                    "config override key=value (repeatable, dotted keys)");
    sub->add_flag("--svg", svg, "also render SVG charts/heatmaps");
    sub->add_option("--threads", threads,
                    "Monte Carlo worker threads (default: hardware)");
  };

  CLI::App* run = app.add_subcommand("run", "train one condition");
  add_common(run);
  CLI::App* compare =
      app.add_subcommand("compare", "train all four conditions with shared seeds");
  add_common(compare);

  std::string manifest_path;
  std::string snap_out;
  CLI::App* snapshot = app.add_subcommand(
      "snapshot", "re-emit fields/trajectories from a saved manifest");
  snapshot->add_option("manifest", manifest_path, "run_manifest.json path")
      ->required();
  snapshot->add_option("--out", snap_out,
                       "output directory (default: manifest directory)");

  std::string map_path;
  CLI::App* validate =
      app.add_subcommand("validate-map", "check a map file and print a summary");
  validate->add_option("map", map_path, "ASCII map file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, out_dir, overrides, seed, svg, threads);
    if (compare->parsed())
      return cmd_compare(config_path, out_dir, overrides, seed, svg, threads);
    if (snapshot->parsed()) return cmd_snapshot(manifest_path, snap_out);
    if (validate->parsed()) return cmd_validate_map(map_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const MapError& e) {
    std::fprintf(stderr, "map error: %s\n", e.what());
    return kExitMap;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  }
  return 0;
}
