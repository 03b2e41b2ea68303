#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uavcov/clustering.hpp"
#include "uavcov/config.hpp"
#include "uavcov/errors.hpp"
#include "uavcov/gridworld.hpp"
#include "uavcov/linkbudget.hpp"
#include "uavcov/mdp_env.hpp"
#include "uavcov/planner.hpp"
#include "uavcov/qlearning.hpp"
#include "uavcov/search.hpp"
#include "uavcov/studies.hpp"

namespace py = pybind11;
using namespace uavcov;

namespace {

std::vector<std::tuple<int, int, int>> cells_of(const Trajectory& t) {
  std::vector<std::tuple<int, int, int>> out;
  out.reserve(t.cells.size());
  for (const auto& c : t.cells) out.emplace_back(c.ix, c.iy, c.iz);
  return out;
}

GroundUserSet users_of(const std::vector<std::pair<double, double>>& xy, std::pair<double, double> extent) {
  GroundUserSet u{{extent.first, extent.second}, {}};
  for (auto [x, y] : xy) u.positions.push_back({x, y});
  return u;
}

}  // namespace

PYBIND11_MODULE(_uavcov, m) {
  m.doc() = "UAV swarm coverage planning core";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", base.ptr());
  py::register_exception<BoundsError>(m, "BoundsError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<RangeError>(m, "RangeError", base.ptr());
  py::register_exception<InfeasibleAltitude>(m, "InfeasibleAltitude", base.ptr());
  py::register_exception<IllegalAction>(m, "IllegalAction", base.ptr());
  py::register_exception<InfeasibleLeg>(m, "InfeasibleLeg", base.ptr());
  py::register_exception<InfeasibleMission>(m, "InfeasibleMission", base.ptr());
  py::register_exception<PolicyNotConverged>(m, "PolicyNotConverged", base.ptr());

  py::enum_<Action>(m, "Action")
      .value("FORWARD", Action::Forward)
      .value("BACKWARD", Action::Backward)
      .value("RIGHT", Action::Right)
      .value("LEFT", Action::Left)
      .value("UP", Action::Up)
      .value("DOWN", Action::Down);

  py::class_<GridSpace>(m, "GridSpace")
      .def(py::init([](std::tuple<double, double, double> extent, double cell, std::pair<double, double> band) {
             return build_grid({std::get<0>(extent), std::get<1>(extent), std::get<2>(extent)}, cell,
                               {band.first, band.second});
           }),
           py::arg("extent_m"), py::arg("cell_size_m"), py::arg("altitude_band_m"))
      .def_property_readonly("shape", [](const GridSpace& g) { return std::make_tuple(g.nx(), g.ny(), g.nz()); })
      .def_property_readonly("band_layers", [](const GridSpace& g) { return std::make_pair(g.band_lo(), g.band_hi()); })
      .def_property_readonly("cell_size_m", &GridSpace::cell_size)
      .def("center", [](const GridSpace& g, int ix, int iy, int iz) {
        const Vec3 c = g.center({ix, iy, iz});
        return std::make_tuple(c.x, c.y, c.z);
      });

  py::class_<ObstacleMap>(m, "ObstacleMap")
      .def(py::init<const GridSpace&>())
      .def(py::init<const GridSpace&, std::vector<double>>(), py::arg("grid"), py::arg("heights"))
      .def_static(
          "random_pillars",
          [](const GridSpace& g, int count, double lo, double hi, int footprint, std::uint64_t seed) {
            return random_pillars(g, {count, lo, hi, footprint}, seed);
          },
          py::arg("grid"), py::arg("count"), py::arg("min_height_m"), py::arg("max_height_m"),
          py::arg("footprint_cells") = 1, py::arg("seed") = 0)
      .def("height", &ObstacleMap::height)
      .def_property_readonly("column_density", &ObstacleMap::column_density);

  m.def("is_collision", [](const GridSpace& g, const ObstacleMap& o, int ix, int iy, int iz) {
    return is_collision(g, o, {ix, iy, iz});
  });

  auto link = m.def_submodule("link", "radio link budget");
  py::class_<link::A2AParams>(link, "A2AParams")
      .def(py::init<>())
      .def_readwrite("tx_power_dbm", &link::A2AParams::tx_power_dbm)
      .def_readwrite("tx_gain_db", &link::A2AParams::tx_gain_db)
      .def_readwrite("rx_gain_db", &link::A2AParams::rx_gain_db)
      .def_readwrite("threshold_dbm", &link::A2AParams::threshold_dbm)
      .def_readwrite("pathloss_exponent", &link::A2AParams::pathloss_exponent)
      .def_readwrite("carrier_hz", &link::A2AParams::carrier_hz);
  py::class_<link::A2GParams>(link, "A2GParams")
      .def(py::init<>())
      .def_readwrite("ref_channel_gain", &link::A2GParams::ref_channel_gain)
      .def_readwrite("gu_tx_power_w", &link::A2GParams::gu_tx_power_w)
      .def_readwrite("bandwidth_hz", &link::A2GParams::bandwidth_hz)
      .def_readwrite("noise_density_w_per_hz", &link::A2GParams::noise_density_w_per_hz)
      .def_readwrite("rate_threshold_bps", &link::A2GParams::rate_threshold_bps);
  link.def("path_loss_db", &link::path_loss_db);
  link.def("received_power_dbm", &link::received_power_dbm);
  link.def("max_a2a_distance_m", &link::max_a2a_distance_m);
  link.def("a2g_rate_bps", &link::a2g_rate_bps);
  link.def("max_a2g_distance_m", &link::max_a2g_distance_m);
  link.def("tuav_cover_radius_m", &link::tuav_cover_radius_m);
  link.def("swarm_radius_m", &link::swarm_radius_m);

  py::class_<HoveringPlan>(m, "HoveringPlan")
      .def_readonly("coverage_rate", &HoveringPlan::coverage_rate)
      .def_readonly("swarm_radius_m", &HoveringPlan::swarm_radius_m)
      .def_readonly("below_threshold", &HoveringPlan::below_threshold)
      .def_property_readonly("positions", [](const HoveringPlan& p) {
        std::vector<std::pair<double, double>> out;
        for (const auto& hp : p.points) out.emplace_back(hp.position.x, hp.position.y);
        return out;
      });

  m.def(
      "generate_users",
      [](std::uint64_t seed, std::pair<double, double> extent, int count) {
        const auto u = generate_users(seed, {extent.first, extent.second}, FixedCount{count});
        std::vector<std::pair<double, double>> out;
        for (const auto& p : u.positions) out.emplace_back(p.x, p.y);
        return out;
      },
      py::arg("seed"), py::arg("extent_m"), py::arg("count"));
  m.def(
      "select_hovering_plan",
      [](const std::vector<std::pair<double, double>>& users, std::pair<double, double> extent, double r_s,
         std::vector<int> ns, double threshold, int restarts, std::uint64_t seed) {
        SelectionOptions o{std::move(ns), threshold, restarts, 100, seed};
        return select_hovering_plan(users_of(users, extent), r_s, o);
      },
      py::arg("users"), py::arg("extent_m"), py::arg("swarm_radius_m"),
      py::arg("candidate_ns") = std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, py::arg("threshold") = 0.9,
      py::arg("restarts") = 10, py::arg("seed") = 0);

  m.def(
      "step_reward", [](double cell, bool reached, bool collided) { return step_reward(cell, reached, collided); },
      py::arg("cell_size_m"), py::arg("reached_target"), py::arg("collided"));

  m.def(
      "shortest_path",
      [](const GridSpace& g, const ObstacleMap& o, std::tuple<int, int, int> a, std::tuple<int, int, int> b) {
        auto t = shortest_path_oracle(g, o, {std::get<0>(a), std::get<1>(a), std::get<2>(a)},
                                      {std::get<0>(b), std::get<1>(b), std::get<2>(b)});
        return t ? py::cast(cells_of(*t)) : py::none();
      },
      py::arg("grid"), py::arg("obstacles"), py::arg("start"), py::arg("goal"));

  m.def(
      "plan_mission",
      [](const GridSpace& g, const ObstacleMap& o, const std::vector<std::tuple<int, int, int>>& targets,
         std::tuple<int, int, int> start, const std::string& method, std::uint64_t seed, int stable_checks) {
        std::vector<CellIndex> cells;
        for (auto [x, y, z] : targets) cells.push_back({x, y, z});
        PlannerConfig pc;
        pc.seed = seed;
        pc.learning.max_episodes = 100000;
        pc.learning.stable_checks = stable_checks;
        const MissionPlan plan = plan_mission_cells(
            g, o, cells, {std::get<0>(start), std::get<1>(start), std::get<2>(start)}, parse_method(method), pc);
        py::dict d;
        d["cells"] = cells_of(plan.trajectory);
        d["order"] = plan.order;
        d["steps"] = plan.trajectory.steps();
        d["loss_m"] = plan.loss_m(g.cell_size());
        d["feasible"] = plan.trajectory.feasible;
        d["episodes"] = plan.total_episodes();
        return d;
      },
      py::arg("grid"), py::arg("obstacles"), py::arg("targets"), py::arg("start"),
      py::arg("method") = "qlutp-star", py::arg("seed") = 0, py::arg("stable_checks") = 10);

  m.def(
      "validate_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); },
      py::arg("text"), "Parse and normalize a configuration; returns JSON text.");
  m.def(
      "coverage_summary_csv",
      [](const std::string& text, int threads) {
        py::gil_scoped_release release;
        return coverage_summary_csv(run_coverage_sweep(parse_config(text), {threads}));
      },
      py::arg("config_text") = "", py::arg("threads") = 1);
}
