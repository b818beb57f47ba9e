#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cuegrid/experiment.hpp"

namespace cuegrid {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmitOptions {
  bool svg = false;
};

// Shortest round-trip decimal representation, locale-independent.
// NaN renders as the empty string (the CSV sentinel for obstacle cells).
std::string format_double(double v);

// Writes learning_curve.csv, Pavlovian field CSVs for the snapshot
// episodes, final trajectory CSVs, and run_manifest.json for a single
// condition. Returns the emitted file names in order.
std::vector<std::string> emit_run_outputs(const std::filesystem::path& dir,
                                          const RunConfig& cfg,
                                          const MonteCarloResult& result,
                                          const EmitOptions& opts = {});

// Same artifacts per condition plus a combined learning_curve.csv with one
// mean-steps column per condition.
std::vector<std::string> emit_compare_outputs(
    const std::filesystem::path& dir, const RunConfig& base_cfg,
    const std::vector<std::pair<Condition, MonteCarloResult>>& results,
    const EmitOptions& opts = {});

// Recomputes and re-emits the field/trajectory artifacts recorded in a
// run_manifest.json document. Artifacts come from the base-seed run, so one
// training per condition suffices.
std::vector<std::string> emit_snapshot_outputs(const std::string& manifest_text,
                                               const std::filesystem::path& dir);

}  // namespace cuegrid
