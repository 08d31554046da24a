// Python bindings: scenarios, experiments, the step-wise simulation and the
// pure planning/mapping primitives.

#include <cstring>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "indoornav/costmap.hpp"
#include "indoornav/global_planner.hpp"
#include "indoornav/scenario.hpp"
#include "indoornav/simulation.hpp"
#include "indoornav/tuning.hpp"

namespace py = pybind11;
using namespace indoornav;

namespace {

py::tuple vec(Vec2 v) { return py::make_tuple(v.x, v.y); }
Vec2 to_vec(const py::sequence& s) {
  if (py::len(s) != 2) throw py::value_error("expected an (x, y) pair");
  return {s[0].cast<double>(), s[1].cast<double>()};
}

py::dict metrics_dict(const MetricsReport& r) {
  py::list goals;
  for (const GoalMetrics& g : r.goals) {
    py::dict d;
    d["goal"] = vec(g.goal);
    d["reached"] = g.reached;
    d["ticks"] = g.ticks;
    d["collisions"] = g.collisions;
    d["min_clearance"] = g.min_clearance;
    d["path_length"] = g.path_length;
    d["replans"] = g.replans;
    d["setpoint_switches"] = g.setpoint_switches;
    d["lateral_switches"] = g.lateral_switches;
    goals.append(d);
  }
  py::list gauges;
  for (const GaugeRow& g : r.gauges) {
    py::dict d;
    d["label"] = g.label;
    d["truth"] = g.truth;
    d["measured"] = g.measured ? py::cast(*g.measured) : py::none();
    d["error"] = g.error() ? py::cast(*g.error()) : py::none();
    gauges.append(d);
  }
  py::dict out;
  out["scenario"] = r.scenario;
  out["goals"] = goals;
  out["gauges"] = gauges;
  out["ticks"] = r.ticks;
  out["collisions"] = r.collisions;
  out["min_clearance"] = r.min_clearance;
  out["path_length"] = r.path_length;
  out["replans"] = r.replans;
  out["setpoint_switches"] = r.setpoint_switches;
  out["lateral_switches"] = r.lateral_switches;
  out["scans_integrated"] = r.scans_integrated;
  out["stuck"] = r.stuck;
  out["diagnosis"] = r.diagnosis;
  out["success"] = r.success();
  out["csv"] = emit_metrics_csv(r);
  return out;
}

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

GridSpec spec_for(const py::array& a, double resolution, Vec2 origin) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array indexed [y, x]");
  return GridSpec(resolution, static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), origin);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Deterministic indoor UAV navigation simulator";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<CommandRejected>(m, "CommandRejected", PyExc_ValueError);
  py::register_exception<PlanningError>(m, "PlanningError", PyExc_RuntimeError);
  py::register_exception<OutOfGrid>(m, "OutOfGrid", PyExc_ValueError);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("resolution", &Scenario::resolution)
      .def_readonly("seed", &Scenario::seed)
      .def_readonly("tick_budget", &Scenario::tick_budget)
      .def_property_readonly("goals",
                             [](const Scenario& s) {
                               py::list out;
                               for (const Vec2& g : s.goals) out.append(vec(g));
                               return out;
                             })
      .def_property_readonly("start",
                             [](const Scenario& s) {
                               return py::make_tuple(s.start.x(), s.start.y(), s.start.yaw());
                             })
      .def_property_readonly("gauges",
                             [](const Scenario& s) {
                               py::list out;
                               for (const Gauge& g : s.gauges) {
                                 out.append(py::make_tuple(g.label, vec(g.from), vec(g.to)));
                               }
                               return out;
                             })
      .def("to_json", &scenario_to_json);

  m.def("load_scenario", &load_scenario, py::arg("text"), "Parse a scenario JSON document.");
  m.def(
      "load_scenario_file",
      [](const std::string& path) { return load_scenario_file(path); }, py::arg("path"));

  m.def(
      "run_experiment",
      [](const Scenario& s, std::optional<std::uint64_t> seed) {
        MetricsReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(s, seed);
        }
        return metrics_dict(r);
      },
      py::arg("scenario"), py::arg("seed") = py::none(),
      "Run to completion and return the metrics as a dict (including 'csv').");

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<Scenario, std::optional<std::uint64_t>>(), py::arg("scenario"),
           py::arg("seed") = py::none())
      .def("step", &Simulation::step)
      .def(
          "run",
          [](Simulation& sim) {
            MetricsReport r;
            {
              py::gil_scoped_release release;
              r = sim.run();
            }
            return metrics_dict(r);
          })
      .def("finished", &Simulation::finished)
      .def(
          "report", [](const Simulation& sim, bool gauges) { return metrics_dict(sim.report(gauges)); },
          py::arg("with_gauges") = true)
      .def_property_readonly("tick", [](const Simulation& s) { return s.state().tick; })
      .def_property_readonly("pose",
                             [](const Simulation& s) {
                               const Pose2D& p = s.state().robot.pose;
                               return py::make_tuple(p.x(), p.y(), p.yaw());
                             })
      .def_property_readonly("setpoint",
                             [](const Simulation& s) -> py::object {
                               if (!s.state().setpoint) return py::none();
                               return vec(*s.state().setpoint);
                             })
      .def_property_readonly("goal",
                             [](const Simulation& s) -> py::object {
                               if (!s.goal()) return py::none();
                               return vec(*s.goal());
                             })
      .def_property_readonly("paused", &Simulation::paused)
      .def_property_readonly("plan",
                             [](const Simulation& s) {
                               py::list out;
                               if (s.plan()) {
                                 for (const Vec2& p : s.plan()->polyline.points()) out.append(vec(p));
                               }
                               return out;
                             })
      .def(
          "map_classes",
          [](const Simulation& s) {
            const GridSpec& g = s.map().spec();
            py::array_t<std::uint8_t> out({g.height(), g.width()});
            auto cells = s.map().classes();
            std::memcpy(out.mutable_data(), cells.data(), cells.size());
            return out;
          },
          "Map as a [height, width] uint8 array: 0 free, 1 occupied, 2 unknown.")
      .def("set_goal", [](Simulation& s, double x, double y) { s.submit(SetGoal{{x, y}}); })
      .def("pause", [](Simulation& s) { s.submit(Pause{}); })
      .def("resume", [](Simulation& s) { s.submit(Resume{}); })
      .def("set_param",
           [](Simulation& s, const std::string& name, double value) { s.submit(SetParam{name, value}); });

  m.def(
      "sweep",
      [](const std::vector<double>& lambdas, const std::vector<double>& Bs, double R) {
        const auto rows = sweep(CostParams{}, lambdas, Bs, ClearanceModel{R, PlanExtent::kSemi});
        py::list out;
        for (const SweepRow& r : rows) {
          py::dict d;
          d["lambda"] = r.lambda;
          d["B"] = r.B;
          d["R"] = r.R;
          d["d_star"] = r.d_star;
          d["c_star"] = r.c_star;
          d["J_star"] = r.J_star;
          out.append(d);
        }
        return out;
      },
      py::arg("lambdas"), py::arg("Bs"), py::arg("R") = 2.0);

  m.def(
      "model_clearance",
      [](double d, double R) { return model_clearance(d, ClearanceModel{R, PlanExtent::kSemi}); },
      py::arg("d"), py::arg("R") = 2.0);

  m.def(
      "distance_transform",
      [](U8Array occupied, double resolution) {
        const GridSpec g = spec_for(occupied, resolution, {0, 0});
        const DistanceField f = distance_transform(
            g, std::span<const std::uint8_t>(occupied.data(), g.cell_count()));
        py::array_t<double> out({g.height(), g.width()});
        std::copy(f.values().begin(), f.values().end(), out.mutable_data());
        return out;
      },
      py::arg("occupied"), py::arg("resolution") = 1.0,
      "Euclidean distance (meters) from each cell center to the nearest occupied cell.");

  m.def(
      "inflate",
      [](U8Array occupied, double resolution) {
        const GridSpec g = spec_for(occupied, resolution, {0, 0});
        const Costmap cm =
            inflate(g, std::span<const std::uint8_t>(occupied.data(), g.cell_count()), CostParams{});
        py::array_t<std::uint8_t> out({g.height(), g.width()});
        std::copy(cm.cost.begin(), cm.cost.end(), out.mutable_data());
        return out;
      },
      py::arg("occupied"), py::arg("resolution") = 0.05);

  m.def(
      "plan_global",
      [](U8Array costmap, const py::sequence& start, const py::sequence& goal, double resolution,
         double unknown_penalty) {
        const GridSpec g = spec_for(costmap, resolution, {0, 0});
        Costmap cm{g, std::vector<std::uint8_t>(costmap.data(), costmap.data() + g.cell_count())};
        GlobalPlannerConfig config;
        config.unknown_penalty = unknown_penalty;
        const GlobalPlan plan = plan_global(cm, to_vec(start), to_vec(goal), config);
        py::list out;
        for (const Vec2& p : plan.polyline.points()) out.append(vec(p));
        return out;
      },
      py::arg("costmap"), py::arg("start"), py::arg("goal"), py::arg("resolution") = 0.05,
      py::arg("unknown_penalty") = 0.5,
      "A* over a [height, width] costmap (0-252 inflated, 253 inscribed, 254 lethal, 255 unknown).");

  m.attr("LETHAL") = int(cost::kLethal);
  m.attr("INSCRIBED") = int(cost::kInscribed);
  m.attr("UNKNOWN") = int(cost::kUnknown);
}
