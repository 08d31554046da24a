#pragma once

// Scenario files (JSON) and experiment metrics (CSV).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "indoornav/costmap.hpp"
#include "indoornav/global_planner.hpp"
#include "indoornav/local_planner.hpp"
#include "indoornav/mapper.hpp"
#include "indoornav/world.hpp"

namespace indoornav {

/// Everything the `params` object of a scenario can override.
struct ScenarioParams {
  CostParams cost;
  LocalPlannerConfig local;
  GlobalPlannerConfig global;
  double noise_sigma = 0.01;      ///< lidar range noise (m)
  double pose_noise_sigma = 0.0;  ///< Gaussian perturbation of the mapping pose (m)
  int beams = 683;
};

struct Scenario {
  std::string name;
  double resolution = 0.05;
  World world;  ///< bounds are derived from the geometry on load
  RobotModel robot;
  Pose2D start;
  std::vector<Vec2> goals;
  std::vector<Gauge> gauges;
  ScenarioParams params;
  std::uint64_t seed = 0;
  std::int64_t tick_budget = 15000;

  GridSpec grid() const;
};

/// Parses and validates a scenario document. Unknown keys, wrong types and
/// missing required keys raise ScenarioError naming the field; so do a start
/// pose in collision and goals outside the world bounds.
Scenario load_scenario(std::string_view json_text);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Serializes with every default filled in; load_scenario accepts the output.
std::string scenario_to_json(const Scenario& scenario);

struct GoalMetrics {
  Vec2 goal;
  bool reached = false;
  std::int64_t ticks = 0;  ///< ticks spent on this goal
  int collisions = 0;
  double min_clearance = std::numeric_limits<double>::infinity();
  double path_length = 0.0;
  int replans = 0;
  int setpoint_switches = 0;
  int lateral_switches = 0;  ///< switches whose new setpoint was a lateral sample
};

struct GaugeRow {
  std::string label;
  double truth = 0.0;
  std::optional<double> measured;  ///< nullopt when the measurement failed

  std::optional<double> error() const {
    return measured ? std::optional<double>(*measured - truth) : std::nullopt;
  }
};

struct MetricsReport {
  std::string scenario;
  std::vector<GoalMetrics> goals;
  std::vector<GaugeRow> gauges;
  std::int64_t ticks = 0;
  int collisions = 0;
  double min_clearance = std::numeric_limits<double>::infinity();
  double path_length = 0.0;
  int replans = 0;
  int setpoint_switches = 0;
  int lateral_switches = 0;
  int scans_integrated = 0;
  bool stuck = false;
  std::string diagnosis;

  bool all_goals_reached() const;
  bool success() const { return all_goals_reached() && collisions == 0; }
};

/// Header: kind,label,truth,measured,error,goal_reached,ticks,collisions,
/// min_clearance,path_length,replans,setpoint_switches. One row per goal
/// (kind "goal", label = goal index) then one per gauge (kind "gauge").
std::string emit_metrics_csv(const MetricsReport& report);

}  // namespace indoornav
