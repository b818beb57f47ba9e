// Python bindings for the simulator core. Exposed as cuegrid._core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cuegrid/channel.hpp"
#include "cuegrid/config.hpp"
#include "cuegrid/experiment.hpp"
#include "cuegrid/grid.hpp"
#include "cuegrid/policy.hpp"
#include "cuegrid/rewards.hpp"
#include "cuegrid/scenario.hpp"
#include "cuegrid/schedule.hpp"
#include "cuegrid/version.hpp"

namespace py = pybind11;
using namespace cuegrid;

namespace {

Cell to_cell(const std::pair<int, int>& xy) { return Cell{xy.first, xy.second}; }
std::pair<int, int> from_cell(Cell c) { return {c.x, c.y}; }

std::vector<Cell> to_cells(const std::vector<std::pair<int, int>>& xs) {
  std::vector<Cell> out;
  out.reserve(xs.size());
  for (const auto& p : xs) out.push_back(to_cell(p));
  return out;
}

const char* cause_name(TerminationCause c) {
  switch (c) {
    case TerminationCause::None: return "none";
    case TerminationCause::MissionAccomplished: return "mission_accomplished";
    case TerminationCause::StepLimit: return "step_limit";
  }
  return "none";
}

py::array_t<double> field_matrix(const GridMap& map,
                                 const std::vector<double>& field) {
  py::array_t<double> arr({map.height(), map.width()});
  std::copy(field.begin(), field.end(), arr.mutable_data());
  return arr;
}

py::array_t<int> path_matrix(const std::vector<Cell>& path) {
  py::array_t<int> arr({static_cast<py::ssize_t>(path.size()),
                        static_cast<py::ssize_t>(2)});
  auto view = arr.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < view.shape(0); ++i) {
    view(i, 0) = path[i].x;
    view(i, 1) = path[i].y;
  }
  return arr;
}

py::dict metrics_dict(const EpisodeMetrics& m) {
  py::dict d;
  d["episode"] = m.episode_index;
  d["steps"] = m.steps_taken;
  d["cause"] = cause_name(m.cause);
  d["instrumental_return"] = m.instrumental_return;
  d["pavlovian_return"] = m.pavlovian_return;
  d["collisions"] = m.collisions;
  d["p_mb_mean"] = m.p_mb_mean ? py::object(py::float_(*m.p_mb_mean))
                               : py::object(py::none());
  return d;
}

py::dict training_dict(const GridMap& map, const TrainingResult& result) {
  py::dict d;
  py::list episodes;
  for (const auto& m : result.episodes) episodes.append(metrics_dict(m));
  d["episodes"] = episodes;
  py::list snapshots;
  for (const auto& snap : result.snapshots) {
    py::dict s;
    s["episode"] = snap.episode;
    s["agent"] = snap.agent;
    s["v_pav"] = field_matrix(map, pavlovian_field_snapshot(map, snap.v_pav));
    snapshots.append(s);
  }
  d["snapshots"] = snapshots;
  py::list paths;
  for (const auto& p : result.trajectories) paths.append(path_matrix(p));
  d["trajectories"] = paths;
  return d;
}

RunConfig config_from_text(const std::string& text) {
  try {
    return parse_config(text);
  } catch (const ConfigError& e) {
    throw py::value_error(e.what());
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = kVersion;

  py::enum_<Action>(m, "Action")
      .value("UP", Action::Up)
      .value("DOWN", Action::Down)
      .value("LEFT", Action::Left)
      .value("RIGHT", Action::Right)
      .value("HOVER", Action::Hover);

  py::class_<GridMap>(m, "GridMap")
      .def_property_readonly("width", &GridMap::width)
      .def_property_readonly("height", &GridMap::height)
      .def_property_readonly("num_states", &GridMap::num_states)
      .def_property_readonly("target",
                             [](const GridMap& g) { return from_cell(g.target()); })
      .def_property_readonly("agent_starts",
                             [](const GridMap& g) {
                               std::vector<std::pair<int, int>> out;
                               for (Cell c : g.agent_starts())
                                 out.push_back(from_cell(c));
                               return out;
                             })
      .def("kind",
           [](const GridMap& g, int x, int y) {
             switch (g.kind({x, y})) {
               case CellKind::Free: return "free";
               case CellKind::Obstacle: return "obstacle";
               case CellKind::Gate: return "gate";
               case CellKind::GpsDenied: return "gps_denied";
             }
             return "free";
           })
      .def("traversable",
           [](const GridMap& g, int x, int y) { return g.traversable({x, y}); })
      .def("__repr__", [](const GridMap& g) {
        return "<GridMap " + std::to_string(g.width()) + "x" +
               std::to_string(g.height()) + ">";
      });

  m.def("load_map", [](const std::string& text) {
    try {
      return load_map(text);
    } catch (const MapError& e) {
      throw py::value_error(e.what());
    }
  });
  m.def("save_map", &save_map);
  m.def("paper_map", &paper_scenario);
  m.def("paper_map_text", [] { return std::string(paper_scenario_text()); });

  m.def("attempted_cell",
        [](const GridMap& g, std::pair<int, int> cell, Action a) {
          return from_cell(attempted_cell(g, to_cell(cell), a));
        });
  m.def("apply_joint_action",
        [](const GridMap& g, const std::vector<std::pair<int, int>>& cells,
           int step_index, const std::vector<Action>& actions) {
          EnvState state{to_cells(cells), step_index};
          StepOutcome out = apply_joint_action(g, state, actions);
          py::dict d;
          std::vector<std::pair<int, int>> next;
          for (Cell c : out.next_state.agent_cells) next.push_back(from_cell(c));
          d["cells"] = next;
          d["collided"] = out.collided;
          d["step_index"] = out.next_state.step_index;
          return d;
        });

  py::class_<LinkBudget>(m, "LinkBudget")
      .def(py::init<>())
      .def_readwrite("tx_power_dbm", &LinkBudget::tx_power_dbm)
      .def_readwrite("tx_gain_dbi", &LinkBudget::tx_gain_dbi)
      .def_readwrite("rx_gain_dbi", &LinkBudget::rx_gain_dbi)
      .def_readwrite("bandwidth_hz", &LinkBudget::bandwidth_hz)
      .def_readwrite("carrier_hz", &LinkBudget::carrier_hz)
      .def_readwrite("noise_figure_db", &LinkBudget::noise_figure_db)
      .def_readwrite("beta_los", &LinkBudget::beta_los)
      .def_readwrite("beta_nlos", &LinkBudget::beta_nlos);

  m.def("line_of_sight",
        [](const GridMap& g, std::pair<int, int> a, std::pair<int, int> b) {
          return line_of_sight(g, to_cell(a), to_cell(b));
        });
  m.def("path_loss_db", &path_loss_db, py::arg("link"), py::arg("distance_m"),
        py::arg("los"));
  m.def("rss_dbm", &rss_dbm, py::arg("link"), py::arg("distance_m"),
        py::arg("los"));
  m.def("noise_floor_dbm", &noise_floor_dbm);
  m.def("cell_distance_m", [](std::pair<int, int> a, std::pair<int, int> b) {
    return cell_distance_m(to_cell(a), to_cell(b));
  });
  m.def("peb",
        [](const GridMap& g, const std::vector<std::pair<int, int>>& agents,
           std::pair<int, int> target, const LinkBudget& link, double sigma) {
          return peb_m(g, to_cells(agents), to_cell(target), link, sigma);
        },
        py::arg("map"), py::arg("agent_cells"), py::arg("target"),
        py::arg("link"), py::arg("sigma_db") = 6.0);
  m.def("gps_estimate",
        [](double x, double y, bool in_denied, double variance,
           std::uint64_t seed) {
          Rng rng = make_rng(seed);
          Vec2 out = gps_estimate({x, y}, in_denied, {variance}, rng);
          return std::make_pair(out.x, out.y);
        },
        py::arg("x"), py::arg("y"), py::arg("in_denied"),
        py::arg("variance_per_axis_m2") = 100.0, py::arg("seed") = 0);

  m.def("schedule_value",
        [](double start, double factor, double floor, int episode) {
          return schedule_value({start, factor, floor}, episode);
        });
  m.def("softmax_probs", [](const ActionVector& scores, double tau) {
    try {
      return softmax_probs(scores, tau);
    } catch (const std::invalid_argument& e) {
      throw py::value_error(e.what());
    }
  });
  m.def("sample_action",
        [](const ActionVector& probs, std::uint64_t seed) {
          Rng rng = make_rng(seed);
          return static_cast<int>(sample_action(probs, rng));
        });

  m.def("parse_config", [](const std::string& text) {
    return serialize_config(config_from_text(text));
  });
  m.def("default_config", [] { return serialize_config(RunConfig{}); });

  m.def(
      "run_training",
      [](const std::string& config_text, py::object seed) {
        RunConfig cfg = config_from_text(config_text);
        const GridMap map = load_config_map(cfg);
        const Simulator sim(map, cfg);
        const std::uint64_t run_seed =
            seed.is_none() ? cfg.base_seed : seed.cast<std::uint64_t>();
        return training_dict(map, sim.run_training(run_seed, true));
      },
      py::arg("config") = "{}", py::arg("seed") = py::none());

  m.def(
      "run_monte_carlo",
      [](const std::string& config_text, int threads) {
        RunConfig cfg = config_from_text(config_text);
        const GridMap map = load_config_map(cfg);
        MonteCarloResult result = run_monte_carlo(map, cfg, threads);
        py::dict d;
        d["mean_steps"] = py::array_t<double>(
            result.aggregate.mean_steps.size(), result.aggregate.mean_steps.data());
        d["std_steps"] = py::array_t<double>(
            result.aggregate.std_steps.size(), result.aggregate.std_steps.data());
        if (!result.aggregate.mean_p_mb.empty())
          d["mean_p_mb"] = py::array_t<double>(
              result.aggregate.mean_p_mb.size(), result.aggregate.mean_p_mb.data());
        const int runs = static_cast<int>(result.aggregate.per_run_steps.size());
        const int episodes =
            runs > 0 ? static_cast<int>(result.aggregate.per_run_steps[0].size()) : 0;
        py::array_t<int> per_run({runs, episodes});
        auto view = per_run.mutable_unchecked<2>();
        for (int r = 0; r < runs; ++r)
          for (int e = 0; e < episodes; ++e)
            view(r, e) = result.aggregate.per_run_steps[r][e];
        d["per_run_steps"] = per_run;
        d["exemplar"] = training_dict(map, result.exemplar);
        return d;
      },
      py::arg("config") = "{}", py::arg("threads") = 0);
}
