#pragma once

// Closed-loop experiment: world, lidar, mapper, planners and robot advanced
// by a single-threaded 50 Hz tick loop.

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "indoornav/costmap.hpp"
#include "indoornav/global_planner.hpp"
#include "indoornav/local_planner.hpp"
#include "indoornav/mapper.hpp"
#include "indoornav/scenario.hpp"
#include "indoornav/world.hpp"

namespace indoornav {

struct SimConfig {
  double dt = 0.02;
  int local_period = 5;     ///< ticks per local planner cycle (10 Hz)
  int global_period = 50;   ///< ticks per scheduled global replan (1 Hz)
  double goal_tolerance = 0.10;
  /// Within this distance a feasible straight segment to the goal is flown
  /// directly instead of the corridor argmin.
  double goal_capture_radius = 1.0;
  double stall_window = 5.0;     ///< seconds
  double stall_progress = 0.10;  ///< minimum net displacement over the window
};

struct SimState {
  std::int64_t tick = 0;
  double dt = 0.02;
  RobotState robot;
  std::optional<Vec2> setpoint;
  World world;
  Rng rng{0};

  bool operator==(const SimState&) const = default;
};

struct SetGoal {
  Vec2 goal;
};
struct Pause {};
struct Resume {};
struct SetParam {
  std::string name;
  double value = 0.0;
};
using OperatorCommand = std::variant<SetGoal, Pause, Resume, SetParam>;

/// Parameter names accepted by SetParam.
inline constexpr const char* kTunableParams[] = {"lambda", "B", "theta"};

class CommandRejected : public Error {
 public:
  using Error::Error;
};

class Simulation {
 public:
  /// `seed` overrides the scenario's seed when given.
  explicit Simulation(Scenario scenario, std::optional<std::uint64_t> seed = std::nullopt,
                      SimConfig config = {});

  /// Advances one tick. Queued commands are applied first; a paused or
  /// finished simulation does not advance.
  void step();
  /// All goals reached, tick budget exhausted, or aborted as stuck.
  bool finished() const;
  /// Steps until finished. Returns early while paused.
  MetricsReport run();
  /// Metrics so far. Gauges are measured on the current map unless
  /// `with_gauges` is false.
  MetricsReport report(bool with_gauges = true) const;

  /// Throws CommandRejected for an out-of-bounds goal or unknown parameter.
  void validate(const OperatorCommand& command) const;
  /// Validates and queues the command for the next tick boundary.
  void submit(const OperatorCommand& command);

  const Scenario& scenario() const { return scenario_; }
  const SimConfig& config() const { return config_; }
  const SimState& state() const { return state_; }
  const OccupancyGrid& map() const { return map_; }
  const std::optional<GlobalPlan>& plan() const { return plan_; }
  const std::vector<TrajectorySample>& samples() const { return samples_; }
  const LaserScan& last_scan() const { return scan_; }
  std::optional<Vec2> goal() const;
  bool paused() const { return paused_; }
  bool stuck() const { return stuck_; }
  const ScenarioParams& params() const { return params_; }

 private:
  void apply(const OperatorCommand& command);
  void apply_pending();
  void advance_goals();
  void plan_cycle();
  GoalMetrics& current_metrics() { return goals_[goal_index_]; }

  Scenario scenario_;
  SimConfig config_;
  ScenarioParams params_;
  SimState state_;
  OccupancyGrid map_;
  LaserScan scan_;
  std::optional<GlobalPlan> plan_;
  std::vector<TrajectorySample> samples_;
  std::optional<TrajectorySample> current_;
  std::vector<OperatorCommand> pending_;
  std::vector<GoalMetrics> goals_;
  std::size_t goal_index_ = 0;
  std::int64_t goal_started_tick_ = 0;
  std::deque<Vec2> recent_positions_;
  bool force_replan_ = true;
  bool paused_ = false;
  bool stuck_ = false;
  bool in_collision_ = false;
  int scans_integrated_ = 0;
  std::string diagnosis_;
};

/// Runs the scenario to completion. Pure function of (scenario, seed).
MetricsReport run_experiment(const Scenario& scenario,
                             std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace indoornav
