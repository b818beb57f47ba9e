#pragma once

#include <span>
#include <vector>

#include "cuegrid/grid.hpp"
#include "cuegrid/rng.hpp"

namespace cuegrid {

struct LinkBudget {
  double tx_power_dbm = -10.0;
  double tx_gain_dbi = 2.0;
  double rx_gain_dbi = 2.0;
  double bandwidth_hz = 1e6;
  double carrier_hz = 2.4e9;
  double noise_figure_db = 10.0;
  double beta_los = 2.0;
  double beta_nlos = 3.5;
};

struct ChannelSample {
  double rss_dbm = 0.0;
  bool los = false;
  double distance_m = 0.0;
};

struct GpsNoiseModel {
  double variance_per_axis_m2 = 100.0;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

// True iff the supercover line between the cell centers of a and b crosses
// no obstacle cell (endpoints excluded). Gates and GPS-denied cells do not
// block; gates are the LOS openings in walls.
bool line_of_sight(const GridMap& map, Cell a, Cell b);

// Cell-center distance with 1 m cells; co-located cells clamp to 0.5 m so
// the log-distance terms stay finite.
double cell_distance_m(Cell a, Cell b);

// Free-space reference loss at d0 = 1 m plus 10*beta*log10(d/d0).
double path_loss_db(const LinkBudget& link, double distance_m, bool los);

double rss_dbm(const LinkBudget& link, double distance_m, bool los);

double noise_floor_dbm(const LinkBudget& link);

ChannelSample sample_channel(const GridMap& map, const LinkBudget& link,
                             Cell agent, Cell target);

// Inside a GPS-denied area the position estimate gains independent
// zero-mean Gaussian noise per axis; elsewhere it is exact.
Vec2 gps_estimate(Vec2 true_pos_m, bool in_denied, const GpsNoiseModel& model,
                  Rng& rng);

// Position error bound: sqrt(trace(J^-1)) of the 2x2 RSS Fisher information
// accumulated over agents, with the path-loss exponent per agent chosen by
// LOS to the target. +inf when the geometry leaves J singular.
double peb_m(const GridMap& map, const std::vector<Cell>& agent_cells,
             Cell target, const LinkBudget& link, double sigma_db);

namespace detail {

struct RangeObservation {
  double dx = 0.0;  // target -> agent
  double dy = 0.0;
  double beta = 2.0;
};

// Geometry-only PEB core shared by peb_m and the simulation caches.
double peb_from_geometry(std::span<const RangeObservation> obs, double sigma_db);

// Supercover cell enumeration; visit returns false to stop early.
// Endpoints are included in the traversal.
void supercover_line(Cell a, Cell b, const std::function<bool(Cell)>& visit);

}  // namespace detail

}  // namespace cuegrid
