// indoornav: run scenarios headless, serve live telemetry, sweep the tuning model.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "indoornav/mapper.hpp"
#include "indoornav/scenario.hpp"
#include "indoornav/simulation.hpp"
#include "indoornav/tuning.hpp"
#ifdef INDOORNAV_HAVE_SERVER
#include "indoornav/server.hpp"
#endif

using namespace indoornav;

namespace {

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, bool headless,
            const std::string& metrics_path, const std::string& map_out) {
  Scenario scenario = load_scenario_file(path);
  Simulation sim(std::move(scenario), seed);
  const auto per_second = static_cast<std::int64_t>(std::llround(1.0 / sim.config().dt));
  while (!sim.finished()) {
    sim.step();
    if (!headless && sim.state().tick % per_second == 0) {
      const Pose2D& p = sim.state().robot.pose;
      std::fprintf(stderr, "t=%6.1fs  pose=(%.2f, %.2f, %.2f)\n",
                   double(sim.state().tick) * sim.config().dt, p.x(), p.y(), p.yaw());
    }
  }
  const MetricsReport report = sim.report();
  const std::string csv = emit_metrics_csv(report);
  if (metrics_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(metrics_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + metrics_path);
    out << csv;
  }
  if (!map_out.empty()) export_map(sim.map(), map_out);

  int reached = 0;
  for (const auto& g : report.goals) reached += g.reached ? 1 : 0;
  std::fprintf(stderr, "%s: %d/%zu goals, %d collisions, %lld ticks, min clearance %.3f m%s%s\n",
               report.scenario.c_str(), reached, report.goals.size(), report.collisions,
               static_cast<long long>(report.ticks), report.min_clearance,
               report.diagnosis.empty() ? "" : ", ", report.diagnosis.c_str());
  return report.success() ? 0 : 1;
}

int cmd_sweep(const std::string& lambda_range, const std::string& b_list, double R,
              const std::string& out_path) {
  const auto lambdas = parse_range(lambda_range);
  const auto Bs = parse_list(b_list);
  const auto rows = sweep(CostParams{}, lambdas, Bs, ClearanceModel{R, PlanExtent::kSemi});
  if (out_path.empty()) {
    write_sweep_csv(std::cout, rows);
    return std::cout ? 0 : 2;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  write_sweep_csv(out, rows);
  out.close();
  if (!out) throw std::runtime_error("failed writing " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Indoor UAV navigation simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  bool headless = false;
  std::string metrics_path;
  std::string map_out;
  auto* run = app.add_subcommand("run", "run a scenario to completion");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_flag("--headless", headless, "no progress output");
  run->add_option("--metrics", metrics_path, "write metrics CSV here instead of stdout");
  run->add_option("--map-out", map_out, "write the final map as PGM + YAML");

  std::string lambda_range;
  std::string b_list = "25,100,400";
  double R = 2.0;
  std::string out_path;
  auto* sw = app.add_subcommand("sweep", "minimize the tuning model over a (lambda, B) grid");
  sw->add_option("--lambda", lambda_range, "start:stop:step")->required();
  sw->add_option("--B", b_list, "comma-separated B values")->capture_default_str();
  sw->add_option("--R", R, "obstacle circle radius (m)");
  sw->add_option("--out", out_path, "CSV output path (default stdout)");

#ifdef INDOORNAV_HAVE_SERVER
  ServeOptions serve_options;
  auto* serve = app.add_subcommand("serve", "run a scenario live behind a WebSocket");
  serve->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  serve->add_option("--port", serve_options.port, "listen port")->required();
  serve->add_option("--address", serve_options.address, "listen address");
  serve->add_option("--realtime", serve_options.realtime_factor,
                    "sim seconds per wall second (0 = as fast as possible)");
#endif

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, seed, headless, metrics_path, map_out);
    if (sw->parsed()) return cmd_sweep(lambda_range, b_list, R, out_path);
#ifdef INDOORNAV_HAVE_SERVER
    if (serve->parsed()) {
      TelemetryServer server(load_scenario_file(scenario_path), serve_options);
      const unsigned short port = server.start();
      std::fprintf(stderr, "serving on %s:%u (ws /ws, GET /scenario, GET /healthz)\n",
                   serve_options.address.c_str(), port);
      server.wait();
      server.stop();
      return 0;
    }
#endif
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "scenario error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
