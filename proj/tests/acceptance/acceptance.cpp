// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Scenario files come from INDOORNAV_SCENARIO_DIR or argv[1].

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "checks.hpp"
#include "indoornav/simulation.hpp"
#include "indoornav/tuning.hpp"

using namespace indoornav;

namespace {

std::filesystem::path g_dir = checks::scenario_dir();
int g_failed = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

void info(const std::string& name, const std::string& detail) {
  std::printf("INFO  %-34s %s\n", name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Scenario load(const char* name) { return load_scenario_file(g_dir / name); }

void mapping(double sigma, double tolerance) {
  Scenario s = load("mapping_room.json");
  s.params.noise_sigma = sigma;
  const auto t0 = std::chrono::steady_clock::now();
  const MetricsReport r = run_experiment(s);
  const double elapsed = seconds_since(t0);

  double worst = 0.0;
  std::string worst_label = "-";
  int measured = 0;
  for (const GaugeRow& g : r.gauges) {
    if (!g.measured) continue;
    ++measured;
    if (std::abs(*g.error()) >= worst) {
      worst = std::abs(*g.error());
      worst_label = g.label;
    }
  }
  const bool ok = r.gauges.size() == 11 && measured == 11 && worst <= tolerance &&
                  r.scans_integrated >= 200 && elapsed < 60.0;
  report(ok, fmt("mapping sigma=%.2f", sigma),
         fmt("%d/11 gauges measured, max |error| %.4f m (gauge %s, tol %.2f), %d scans, "
             "%d/%zu goals, %.1f s",
             measured, worst, worst_label.c_str(), tolerance, r.scans_integrated,
             int(std::count_if(r.goals.begin(), r.goals.end(), [](auto& g) { return g.reached; })),
             r.goals.size(), elapsed));
}

void tuning() {
  const auto t0 = std::chrono::steady_clock::now();
  const ClearanceModel model{2.0, PlanExtent::kSemi};
  const std::vector<double> B{100};
  const std::vector<double> at{0.4};
  const double c04 = sweep(CostParams{}, at, B, model)[0].c_star;

  const auto band = parse_range("0.1:1.0:0.05");
  double band_min = oracle::kInf;
  for (const SweepRow& row : sweep(CostParams{}, band, B, model)) band_min = std::min(band_min, row.c_star);
  const std::vector<double> ends{0.01, 10.0};
  const auto edge = sweep(CostParams{}, ends, B, model);
  const double elapsed = seconds_since(t0);

  const auto ref = oracle::dense_minimize(252, 2.5, 100, 0.4, 2.0, model.arc_length());
  const bool ok = c04 >= 0.8 && c04 <= 1.5 && std::abs(c04 - ref.c) < 0.01 &&
                  band_min < edge[0].c_star && band_min < edge[1].c_star && elapsed < 5.0;
  report(ok, "tuning model",
         fmt("c*(0.4)=%.3f m (oracle %.3f), band min %.3f < c*(0.01)=%.3f, c*(10)=%.3f, %.2f s",
             c04, ref.c, band_min, edge[0].c_star, edge[1].c_star, elapsed));
}

void doorways() {
  auto t0 = std::chrono::steady_clock::now();
  const MetricsReport wide = run_experiment(load("doorway_100.json"));
  double elapsed = seconds_since(t0);
  report(wide.success() && elapsed < 30.0, "doorway 1.00 m",
         fmt("reached=%d collisions=%d min clearance %.3f m, %.1f s", int(wide.all_goals_reached()),
             wide.collisions, wide.min_clearance, elapsed));

  t0 = std::chrono::steady_clock::now();
  const Scenario narrow_s = load("doorway_080.json");
  const MetricsReport narrow = run_experiment(narrow_s);
  elapsed = seconds_since(t0);
  const bool blocked = !narrow.all_goals_reached() || narrow.collisions >= 1;
  report(blocked && elapsed < 30.0, "doorway 0.80 m",
         fmt("reached=%d collisions=%d (%s), safety margin %.2f m, %.1f s",
             int(narrow.all_goals_reached()), narrow.collisions,
             narrow.diagnosis.empty() ? "no diagnosis" : narrow.diagnosis.c_str(),
             narrow_s.params.local.safety_margin, elapsed));

  // Same gap with the library's default margin, for the record.
  Scenario tight = narrow_s;
  tight.params.local.safety_margin = LocalPlannerConfig{}.safety_margin;
  const MetricsReport t = run_experiment(tight);
  info("doorway 0.80 m, default margin",
       fmt("reached=%d collisions=%d min clearance %.3f m", int(t.all_goals_reached()),
           t.collisions, t.min_clearance));
}

void dynamic_obstacle() {
  Simulation sim(load("dynamic_obstacle.json"));
  // The plan in force when the obstacle appears is the one it cuts across.
  std::optional<Polyline> crossed;
  std::optional<double> gap_at_crossing;
  while (!sim.finished()) {
    sim.step();
    if (gap_at_crossing) continue;
    for (const DynamicObstacle& o : sim.state().world.dynamic_obstacles) {
      if (!o.active()) continue;
      if (!crossed && sim.plan()) crossed = sim.plan()->polyline;
      if (!crossed) continue;
      const auto proj = project_onto_polyline(o.position(), *crossed);
      const double robot_s =
          project_onto_polyline(sim.state().robot.pose.position(), *crossed).arc_length;
      if (std::abs(proj.offset) <= o.radius() && proj.arc_length > robot_s) {
        gap_at_crossing = distance(o.position(), sim.state().robot.pose.position());
      }
    }
  }
  const MetricsReport r = sim.report(false);
  const bool ok = r.success() && r.lateral_switches >= 1 && gap_at_crossing &&
                  *gap_at_crossing >= 1.0;
  report(ok, "dynamic obstacle",
         fmt("reached=%d collisions=%d lateral switches=%d, obstacle met the plan %.2f m ahead, "
             "min clearance %.3f m",
             int(r.all_goals_reached()), r.collisions, r.lateral_switches,
             gap_at_crossing.value_or(-1.0), r.min_clearance));
}

void corner() {
  Simulation sim(load("corner.json"));
  sim.step();
  const Vec2 goal = sim.scenario().goals.front();
  const bool unseen = sim.map().classify(sim.map().spec().cell_of(goal)) == CellClass::kUnknown;
  const MetricsReport r = sim.run();
  report(unseen && r.success(), "corner",
         fmt("goal unknown after first scan=%d, reached=%d collisions=%d, %lld ticks",
             int(unseen), int(r.all_goals_reached()), r.collisions, (long long)r.ticks));
}

void oracles() {
  auto line = [](const char* name, const checks::Tally& t) {
    report(t.ok(), name,
           fmt("%d cases, max error %.3g%s%s", t.cases, t.max_error, t.ok() ? "" : ", first: ",
               t.first_failure.c_str()));
  };
  line("oracle: distance transform", checks::edt_vs_brute_force(100));
  line("oracle: A* vs Dijkstra/enumeration", checks::astar_vs_references(400));
  line("oracle: lidar vs 1 mm marching", checks::lidar_vs_marching(3, 1));
  line("oracle: model clearance vs chords", checks::model_clearance_vs_chords());
}

void determinism() {
  int identical = 0, total = 0;
  std::string differing;
  for (const auto& path : checks::shipped_scenarios()) {
    const Scenario s = load_scenario_file(path);
    for (const std::uint64_t seed : {s.seed, s.seed + 1}) {
      ++total;
      if (emit_metrics_csv(run_experiment(s, seed)) == emit_metrics_csv(run_experiment(s, seed))) {
        ++identical;
      } else {
        differing += " " + path.stem().string();
      }
    }
  }
  report(identical == total, "determinism",
         fmt("%d/%d (scenario, seed) pairs byte-identical%s", identical, total, differing.c_str()));
}

void properties() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(0, 1);

  {  // Each term of J strictly decreases in its argument, and J never rises.
    int bad = 0, n = 0;
    for (int k = 0; k < 20000; ++k, ++n) {
      CostParams p;
      p.lambda = 0.01 + 10 * u(gen);
      p.B = 1 + 400 * u(gen);
      const double c = 5 * u(gen), d = 10 * u(gen), e = 1e-3 + 0.1 * u(gen);
      const double J = obstacle_cost(c, p) + progression_cost(d, p);
      if (!(obstacle_cost(c + e, p) < obstacle_cost(c, p))) ++bad;
      if (!(progression_cost(d + e, p) < progression_cost(d, p))) ++bad;
      if (!(obstacle_cost(c + e, p) + progression_cost(d + e, p) <= J)) ++bad;
    }
    report(bad == 0, "property: J monotonicity", fmt("%d draws, %d violations", n, bad));
  }
  {  // Scaling A and B together leaves the argmin alone.
    int bad = 0, n = 0;
    for (int trial = 0; trial < 2000; ++trial, ++n) {
      CostParams p, q;
      const double k = std::exp(8 * u(gen) - 4);
      q.A = p.A * k;
      q.B = p.B * k;
      std::vector<TrajectorySample> a, b;
      for (int i = 0; i < 60; ++i) {
        const double c = 3 * u(gen), d = 3 * u(gen);
        TrajectorySample s;
        s.c = c;
        s.d = d;
        s.feasible = u(gen) > 0.2;
        TrajectorySample t = s;
        if (s.feasible) {
          s.J = obstacle_cost(c, p) + progression_cost(d, p);
          t.J = obstacle_cost(c, q) + progression_cost(d, q);
        }
        a.push_back(s);
        b.push_back(t);
      }
      if (best_sample(a) != best_sample(b)) ++bad;
    }
    report(bad == 0, "property: argmin scale invariance", fmt("%d sample sets, %d violations", n, bad));
  }
  {  // Straight plans longer than the corridor give 90..102 samples.
    int bad = 0, n = 0;
    std::size_t lo = 1000, hi = 0;
    for (int k = 0; k < 2000; ++k, ++n) {
      const double L = 3.5 + 50 * u(gen);
      const double heading = 6.28 * u(gen);
      const Vec2 dir = unit_from_angle(heading);
      const Polyline plan({{0, 0}, dir * L});
      const double along = (L - 3.2) * u(gen);
      const Vec2 p = dir * along + left_normal(dir) * (0.6 * u(gen) - 0.3);
      Rng rng(static_cast<std::uint64_t>(k));
      const auto samples = sample_corridor(plan, Pose2D(p, 6.28 * u(gen)), rng);
      lo = std::min(lo, samples.size());
      hi = std::max(hi, samples.size());
      if (samples.size() < 90 || samples.size() > 102) ++bad;
    }
    report(bad == 0, "property: corridor sample count",
           fmt("%d plans, counts in [%zu, %zu], %d outside [90, 102]", n, lo, hi, bad));
  }
  {  // Local costmap never undercuts the map costmap. Unknown cells holding
     // a fresh return turn lethal.
    int bad_cells = 0, n = 0, overridden = 0;
    const GridSpec g(0.05, 120, 90, {0, 0});
    for (int trial = 0; trial < 40; ++trial, ++n) {
      std::vector<CellClass> classes(g.cell_count());
      for (auto& c : classes) {
        const double r = u(gen);
        c = r < 0.02 ? CellClass::kOccupied : (r < 0.25 ? CellClass::kUnknown : CellClass::kFree);
      }
      const Costmap map_cost = inflate(g, classes, CostParams{});
      const Pose2D pose(1 + 4 * u(gen), 1 + 2.5 * u(gen), 6.28 * u(gen));
      LaserScan scan;
      scan.pose = pose;
      scan.ranges.resize(171);
      for (auto& r : scan.ranges) {
        if (u(gen) < 0.8) r = 0.1 + 3 * u(gen);
      }
      const LocalCostmap local = compose_local_costmap(map_cost, scan, pose, CostParams{});
      for (std::size_t i = 0; i < map_cost.cost.size(); ++i) {
        if (map_cost.cost[i] == cost::kUnknown && local.costmap.cost[i] == cost::kLethal) {
          ++overridden;
        } else if (local.costmap.cost[i] < map_cost.cost[i]) {
          ++bad_cells;
        }
      }
    }
    report(bad_cells == 0, "property: local >= global costmap",
           fmt("%d composed maps, %d cells below the map cost, %d unknown cells hit by returns", n,
               bad_cells, overridden));
  }
  {  // Log-odds stay clamped under arbitrary update sequences and real scans.
    int bad = 0;
    OccupancyGrid map(GridSpec(0.05, 60, 60, {0, 0}));
    std::uniform_int_distribution<std::size_t> cell(0, map.spec().cell_count() - 1);
    for (int k = 0; k < 200000; ++k) {
      map.update(map.spec().cell_at(cell(gen)), u(gen) < 0.5 ? 0.85 : -0.4);
    }
    const Scenario room = load("mapping_room.json");
    OccupancyGrid scanned(room.grid());
    Rng rng(3);
    LidarSpec spec;
    spec.noise_sigma = 0.01;
    for (int k = 0; k < 150; ++k) {
      const Pose2D pose(0.6, 0.5 + 0.001 * k, 1.5);
      scanned.integrate_scan(pose, simulate_lidar(room.world, pose, spec, rng));
    }
    double lo = 0, hi = 0;
    for (const OccupancyGrid* m : {&map, &scanned}) {
      for (double l : m->log_odds_values()) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
        if (l < -10.0 || l > 10.0) ++bad;
      }
    }
    report(bad == 0 && hi == 10.0 && lo == -10.0, "property: log-odds clamping",
           fmt("range seen [%.2f, %.2f], %d out of [-10, 10]", lo, hi, bad));
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_dir = argv[1];
  std::printf("scenarios: %s\n", g_dir.string().c_str());
  const std::vector<std::pair<const char*, std::function<void()>>> suites{
      {"mapping", [] { mapping(0.0, 0.02); mapping(0.01, 0.04); }},
      {"tuning", tuning},
      {"doorway", doorways},
      {"dynamic", dynamic_obstacle},
      {"corner", corner},
      {"oracles", oracles},
      {"determinism", determinism},
      {"properties", properties},
  };
  for (const auto& [name, run] : suites) {
    try {
      run();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%s: %d criteria failed\n", g_failed ? "FAILED" : "ALL PASSED", g_failed);
  return g_failed ? 1 : 0;
}
