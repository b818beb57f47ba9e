#pragma once

#include <string_view>

#include "cuegrid/grid.hpp"

namespace cuegrid {

// ASCII source of the bundled 36x24 scenario (same bytes as
// data/maps/paper_scenario.map).
std::string_view paper_scenario_text();

GridMap paper_scenario();

}  // namespace cuegrid
