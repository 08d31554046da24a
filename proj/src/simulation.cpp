#include "indoornav/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace indoornav {

Simulation::Simulation(Scenario scenario, std::optional<std::uint64_t> seed, SimConfig config)
    : scenario_(std::move(scenario)),
      config_(config),
      params_(scenario_.params),
      map_(scenario_.grid()) {
  if (seed) scenario_.seed = *seed;
  state_.dt = config_.dt;
  state_.robot.pose = scenario_.start;
  state_.world = scenario_.world;
  state_.rng = Rng(scenario_.seed);
  for (const Vec2& g : scenario_.goals) goals_.push_back({.goal = g});
  in_collision_ =
      check_collision(state_.world, state_.robot.pose.position(), scenario_.robot.body_radius)
          .collision;
}

std::optional<Vec2> Simulation::goal() const {
  if (goal_index_ < goals_.size()) return goals_[goal_index_].goal;
  return std::nullopt;
}

bool Simulation::finished() const {
  return goal_index_ >= goals_.size() || stuck_ || state_.tick >= scenario_.tick_budget;
}

void Simulation::validate(const OperatorCommand& command) const {
  if (const auto* g = std::get_if<SetGoal>(&command)) {
    if (!std::isfinite(g->goal.x) || !std::isfinite(g->goal.y) ||
        !state_.world.bounds.contains(g->goal) || !map_.spec().contains(g->goal)) {
      throw CommandRejected("goal outside world bounds");
    }
  } else if (const auto* p = std::get_if<SetParam>(&command)) {
    const bool known = std::find_if(std::begin(kTunableParams), std::end(kTunableParams),
                                    [&](const char* n) { return p->name == n; }) !=
                       std::end(kTunableParams);
    if (!known) throw CommandRejected("unknown parameter '" + p->name + "'");
    if (!std::isfinite(p->value)) throw CommandRejected("parameter value must be finite");
    if (p->name == "theta" && !(p->value > 0.0 && p->value <= 1.0)) {
      throw CommandRejected("theta must lie in (0, 1]");
    }
    if (p->name != "theta" && !(p->value >= 0.0)) {
      throw CommandRejected(p->name + " must be non-negative");
    }
  }
}

void Simulation::submit(const OperatorCommand& command) {
  validate(command);
  pending_.push_back(command);
}

void Simulation::apply(const OperatorCommand& command) {
  if (const auto* g = std::get_if<SetGoal>(&command)) {
    // The new goal replaces whatever is still queued.
    if (goal_index_ < goals_.size()) {
      goals_.resize(goal_index_ + 1);
      goals_[goal_index_].goal = g->goal;
    } else {
      goals_.push_back({.goal = g->goal});
      goal_started_tick_ = state_.tick;
    }
    stuck_ = false;
    diagnosis_.clear();
    recent_positions_.clear();
    current_.reset();
    state_.setpoint.reset();
    force_replan_ = true;
  } else if (std::holds_alternative<Pause>(command)) {
    paused_ = true;
  } else if (std::holds_alternative<Resume>(command)) {
    paused_ = false;
  } else if (const auto* p = std::get_if<SetParam>(&command)) {
    if (p->name == "lambda") params_.cost.lambda = p->value;
    if (p->name == "B") params_.cost.B = p->value;
    if (p->name == "theta") params_.local.theta = p->value;
  }
}

void Simulation::advance_goals() {
  while (goal_index_ < goals_.size() &&
         distance(state_.robot.pose.position(), goals_[goal_index_].goal) <=
             config_.goal_tolerance) {
    GoalMetrics& m = goals_[goal_index_];
    m.reached = true;
    m.ticks = state_.tick - goal_started_tick_;
    ++goal_index_;
    goal_started_tick_ = state_.tick;
    recent_positions_.clear();
    current_.reset();
    state_.setpoint.reset();
    plan_.reset();
    samples_.clear();
    force_replan_ = true;
  }
}

void Simulation::plan_cycle() {
  const Vec2 goal = goals_[goal_index_].goal;
  const Pose2D& pose = state_.robot.pose;
  const Costmap map_cost = inflate(map_.spec(), map_.classes(), params_.cost);

  const bool due =
      force_replan_ ||
      replan_due({state_.tick, state_.dt, goal, &map_cost}, plan_);
  if (due) {
    try {
      plan_ = plan_global(map_cost, pose.position(), goal, params_.global, state_.tick);
      ++current_metrics().replans;
      force_replan_ = false;
    } catch (const PlanningError&) {
      // Keep flying the previous plan; try again next cycle.
      force_replan_ = true;
    } catch (const OutOfGrid&) {
      force_replan_ = true;
    }
  }
  if (!plan_) {
    state_.setpoint.reset();
    current_.reset();
    samples_.clear();
    return;
  }

  const LocalCostmap local = compose_local_costmap(map_cost, scan_, pose, params_.cost);
  const Polyline& path = plan_->polyline;
  samples_.clear();
  for (const CorridorSample& s : sample_corridor(path, pose, state_.rng, params_.local)) {
    samples_.push_back(
        evaluate_sample(s.point, s.kind, pose, path, local, params_.cost, params_.local));
  }
  std::optional<TrajectorySample> current;
  if (current_) {
    current = evaluate_sample(current_->target, current_->kind, pose, path, local, params_.cost,
                              params_.local);
  }

  if (distance(pose.position(), goal) <= config_.goal_capture_radius) {
    const TrajectorySample direct =
        evaluate_sample(goal, SampleKind::kOnPlan, pose, path, local, params_.cost, params_.local);
    if (direct.feasible) {
      if (current_ && current_->target != goal) ++current_metrics().setpoint_switches;
      current_ = direct;
      state_.setpoint = goal;
      return;
    }
  }

  try {
    const SetpointDecision decision = select_setpoint(samples_, current, pose, params_.local);
    const bool changed = !current_ || decision.sample.target != current_->target;
    if (changed && current_) {
      ++current_metrics().setpoint_switches;
      if (decision.sample.kind != SampleKind::kOnPlan) ++current_metrics().lateral_switches;
    }
    current_ = decision.sample;
    state_.setpoint = decision.sample.target;
  } catch (const PlannerStuck&) {
    current_.reset();
    state_.setpoint.reset();
    force_replan_ = true;
  }
}

void Simulation::apply_pending() {
  for (const OperatorCommand& c : pending_) apply(c);
  pending_.clear();
}

void Simulation::step() {
  apply_pending();
  if (paused_) return;
  advance_goals();
  if (finished()) return;

  step_dynamic_obstacles(state_.world, state_.tick, state_.dt);

  LidarSpec lidar;
  lidar.beams = params_.beams;
  lidar.noise_sigma = params_.noise_sigma;
  scan_ = simulate_lidar(state_.world, state_.robot.pose, lidar, state_.rng);
  Pose2D mapping_pose = state_.robot.pose;
  if (params_.pose_noise_sigma > 0.0) {
    const double nx = state_.rng.normal(params_.pose_noise_sigma);
    const double ny = state_.rng.normal(params_.pose_noise_sigma);
    mapping_pose = Pose2D(mapping_pose.position() + Vec2{nx, ny}, mapping_pose.yaw());
  }
  if (!scan_.in_collision) {
    map_.integrate_scan(mapping_pose, scan_);
    ++scans_integrated_;
  }

  if (state_.tick % config_.local_period == 0) plan_cycle();

  const Vec2 before = state_.robot.pose.position();
  if (state_.setpoint) {
    state_.robot = step_robot(state_.robot, *state_.setpoint, scenario_.robot, state_.dt);
  }
  const Vec2 after = state_.robot.pose.position();

  GoalMetrics& m = current_metrics();
  const CollisionCheck hit = check_collision(state_.world, after, scenario_.robot.body_radius);
  if (hit.collision && !in_collision_) ++m.collisions;
  in_collision_ = hit.collision;
  m.min_clearance = std::min(m.min_clearance, hit.clearance);
  m.path_length += distance(before, after);

  recent_positions_.push_back(after);
  const auto window = static_cast<std::size_t>(std::llround(config_.stall_window / state_.dt));
  if (recent_positions_.size() > window) {
    recent_positions_.pop_front();
    if (distance(recent_positions_.front(), after) < config_.stall_progress) {
      stuck_ = true;
      diagnosis_ = "stuck: less than " + std::to_string(config_.stall_progress) +
                   " m progress in " + std::to_string(config_.stall_window) + " s";
    }
  }

  ++state_.tick;
  if (goal_index_ < goals_.size()) goals_[goal_index_].ticks = state_.tick - goal_started_tick_;
}

MetricsReport Simulation::run() {
  apply_pending();
  while (!finished() && !paused_) step();
  return report();
}

MetricsReport Simulation::report(bool with_gauges) const {
  MetricsReport r;
  r.scenario = scenario_.name;
  r.goals = goals_;
  r.ticks = state_.tick;
  for (const GoalMetrics& g : goals_) {
    r.collisions += g.collisions;
    r.min_clearance = std::min(r.min_clearance, g.min_clearance);
    r.path_length += g.path_length;
    r.replans += g.replans;
    r.setpoint_switches += g.setpoint_switches;
    r.lateral_switches += g.lateral_switches;
  }
  r.scans_integrated = scans_integrated_;
  r.stuck = stuck_;
  r.diagnosis = diagnosis_;
  if (!stuck_ && goal_index_ < goals_.size() && state_.tick >= scenario_.tick_budget) {
    r.diagnosis = "tick budget exhausted";
  }
  if (!with_gauges) return r;
  for (const Gauge& g : scenario_.gauges) {
    GaugeRow row{g.label, g.truth(), std::nullopt};
    try {
      row.measured = measure_gauge(map_, g);
    } catch (const MeasurementFailed&) {
    } catch (const OutOfGrid&) {
    }
    r.gauges.push_back(row);
  }
  return r;
}

MetricsReport run_experiment(const Scenario& scenario, std::optional<std::uint64_t> seed) {
  return Simulation(scenario, seed).run();
}

}  // namespace indoornav
