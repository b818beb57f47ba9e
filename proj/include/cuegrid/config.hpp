#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "cuegrid/experiment.hpp"

namespace cuegrid {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses a JSON object into a RunConfig. Every omitted key takes its paper
// default; unknown keys and out-of-range values raise ConfigError naming
// the offending key.
RunConfig parse_config(const std::string& text);

// Canonical serialization; parse_config(serialize_config(c)) reproduces c.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

// Applies one "dotted.key=value" override onto a parsed JSON document.
// Values parse as JSON when possible, otherwise as strings.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

}  // namespace cuegrid
