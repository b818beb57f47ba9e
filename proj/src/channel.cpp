#include "cuegrid/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cuegrid {

namespace detail {

// Supercover variant of Bresenham: enumerates every cell whose closed unit
// square the segment touches. Exact corner crossings visit both side cells.
void supercover_line(Cell a, Cell b, const std::function<bool(Cell)>& visit) {
  int x = a.x, y = a.y;
  int dx = b.x - a.x, dy = b.y - a.y;
  if (!visit({x, y})) return;
  const int xstep = dx >= 0 ? 1 : -1;
  const int ystep = dy >= 0 ? 1 : -1;
  dx = std::abs(dx);
  dy = std::abs(dy);
  const int ddx = 2 * dx, ddy = 2 * dy;
  if (ddx >= ddy) {
    int errorprev = dx, error = dx;
    for (int i = 0; i < dx; ++i) {
      x += xstep;
      error += ddy;
      if (error > ddx) {
        y += ystep;
        error -= ddx;
        if (error + errorprev < ddx) {
          if (!visit({x, y - ystep})) return;
        } else if (error + errorprev > ddx) {
          if (!visit({x - xstep, y})) return;
        } else {  // exact corner
          if (!visit({x, y - ystep})) return;
          if (!visit({x - xstep, y})) return;
        }
      }
      if (!visit({x, y})) return;
      errorprev = error;
    }
  } else {
    int errorprev = dy, error = dy;
    for (int i = 0; i < dy; ++i) {
      y += ystep;
      error += ddx;
      if (error > ddy) {
        x += xstep;
        error -= ddy;
        if (error + errorprev < ddy) {
          if (!visit({x - xstep, y})) return;
        } else if (error + errorprev > ddy) {
          if (!visit({x, y - ystep})) return;
        } else {
          if (!visit({x - xstep, y})) return;
          if (!visit({x, y - ystep})) return;
        }
      }
      if (!visit({x, y})) return;
      errorprev = error;
    }
  }
}

double peb_from_geometry(std::span<const RangeObservation> obs,
                         double sigma_db) {
  if (obs.empty())
    throw std::invalid_argument("peb requires at least one agent");
  if (!(sigma_db > 0.0))
    throw std::invalid_argument("peb requires sigma_db > 0");

  double j00 = 0.0, j01 = 0.0, j11 = 0.0;
  for (const RangeObservation& o : obs) {
    const double d2 = o.dx * o.dx + o.dy * o.dy;
    if (d2 == 0.0) continue;  // co-located with the target: no bearing
    const double k = 10.0 * o.beta / (sigma_db * std::numbers::ln10);
    const double w = (k * k) / (d2 * d2);
    j00 += w * o.dx * o.dx;
    j01 += w * o.dx * o.dy;
    j11 += w * o.dy * o.dy;
  }
  const double tr = j00 + j11;
  const double det = j00 * j11 - j01 * j01;
  if (!(det > 1e-12 * tr * tr))
    return std::numeric_limits<double>::infinity();
  return std::sqrt(tr / det);
}

}  // namespace detail

bool line_of_sight(const GridMap& map, Cell a, Cell b) {
  if (a == b) return true;
  // Canonical endpoint order keeps the traversal (and any rounding of the
  // error terms) identical for (a, b) and (b, a).
  if (b.y < a.y || (b.y == a.y && b.x < a.x)) std::swap(a, b);
  bool clear = true;
  detail::supercover_line(a, b, [&](Cell c) {
    if (c == a || c == b) return true;
    if (map.kind(c) == CellKind::Obstacle) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear;
}

double cell_distance_m(Cell a, Cell b) {
  if (a == b) return 0.5;
  const double dx = static_cast<double>(a.x - b.x);
  const double dy = static_cast<double>(a.y - b.y);
  return std::sqrt(dx * dx + dy * dy);
}

double path_loss_db(const LinkBudget& link, double distance_m, bool los) {
  constexpr double kSpeedOfLight = 299792458.0;
  const double beta = los ? link.beta_los : link.beta_nlos;
  const double reference_db =
      20.0 * std::log10(4.0 * M_PI * link.carrier_hz / kSpeedOfLight);
  return reference_db + 10.0 * beta * std::log10(distance_m);
}

double rss_dbm(const LinkBudget& link, double distance_m, bool los) {
  return link.tx_power_dbm + link.tx_gain_dbi + link.rx_gain_dbi -
         path_loss_db(link, distance_m, los);
}

double noise_floor_dbm(const LinkBudget& link) {
  return -174.0 + 10.0 * std::log10(link.bandwidth_hz) + link.noise_figure_db;
}

ChannelSample sample_channel(const GridMap& map, const LinkBudget& link,
                             Cell agent, Cell target) {
  ChannelSample s;
  s.los = line_of_sight(map, agent, target);
  s.distance_m = cell_distance_m(agent, target);
  s.rss_dbm = rss_dbm(link, s.distance_m, s.los);
  return s;
}

Vec2 gps_estimate(Vec2 true_pos_m, bool in_denied, const GpsNoiseModel& model,
                  Rng& rng) {
  if (!in_denied) return true_pos_m;
  const double sigma = std::sqrt(model.variance_per_axis_m2);
  return {normal(rng, true_pos_m.x, sigma), normal(rng, true_pos_m.y, sigma)};
}

double peb_m(const GridMap& map, const std::vector<Cell>& agent_cells,
             Cell target, const LinkBudget& link, double sigma_db) {
  std::vector<detail::RangeObservation> obs;
  obs.reserve(agent_cells.size());
  for (const Cell& c : agent_cells) {
    const bool los = line_of_sight(map, c, target);
    obs.push_back({static_cast<double>(c.x - target.x),
                   static_cast<double>(c.y - target.y),
                   los ? link.beta_los : link.beta_nlos});
  }
  return detail::peb_from_geometry(obs, sigma_db);
}

}  // namespace cuegrid
