#include "indoornav/local_planner.hpp"

#include <algorithm>
#include <cmath>

namespace indoornav {

std::vector<CorridorSample> sample_corridor(const Polyline& plan, const Pose2D& robot, Rng& rng,
                                            const LocalPlannerConfig& config) {
  if (plan.size() == 0) throw PlanningError(PlanningError::Kind::kEmptyPlan, "empty plan");

  const double s0 = project_onto_polyline(robot.position(), plan).arc_length;
  const double window = std::min(config.corridor_length, plan.length() - s0);

  std::vector<double> stations;
  for (int k = 1; k < config.max_waypoints && k * config.stride < window - 1e-9; ++k) {
    stations.push_back(s0 + k * config.stride);
  }
  stations.push_back(s0 + window);

  std::vector<CorridorSample> samples;
  samples.reserve(stations.size() * 3);
  for (double s : stations) {
    const Vec2 p = plan.point_at(s);
    Vec2 tangent = plan.tangent_at(s);
    if (plan.length() <= 0.0) {
      const Vec2 to_goal = p - robot.position();
      tangent = norm(to_goal) > 1e-9 ? to_goal / norm(to_goal) : robot.heading();
    }
    const Vec2 normal = left_normal(tangent);
    samples.push_back({p, SampleKind::kOnPlan});
    samples.push_back({p + normal * rng.uniform_positive(config.lateral_max), SampleKind::kLeft});
    samples.push_back({p - normal * rng.uniform_positive(config.lateral_max), SampleKind::kRight});
  }
  return samples;
}

TrajectorySample evaluate_sample(Vec2 target, SampleKind kind, const Pose2D& robot,
                                 const Polyline& plan, const LocalCostmap& local,
                                 const CostParams& params, const LocalPlannerConfig& config) {
  TrajectorySample out;
  out.target = target;
  out.kind = kind;
  out.d = project_onto_polyline(target, plan).arc_length;
  out.J2 = progression_cost(out.d, params);

  const GridSpec& spec = local.costmap.spec;
  const Vec2 from = robot.position();
  const double len = distance(from, target);
  const int steps = std::max(1, static_cast<int>(std::ceil(len / (spec.resolution() / 2.0))));

  const double floor_clearance = config.min_clearance();
  double start_clearance = floor_clearance;
  if (spec.contains(from)) start_clearance = clearance_at(local.distance, from);
  const bool backing_out = start_clearance < floor_clearance;
  const double required = backing_out ? start_clearance - 1e-9 : floor_clearance;

  bool feasible = true;
  double c = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= steps; ++i) {
    const Vec2 p = from + (target - from) * (double(i) / steps);
    if (!spec.contains(p)) {
      feasible = false;
      c = 0.0;
      break;
    }
    const double ci = clearance_at(local.distance, p);
    c = std::min(c, ci);
    const std::uint8_t cell_cost = local.costmap.at(spec.cell_of(p));
    if (cell_cost == cost::kUnknown || cell_cost == cost::kLethal) feasible = false;
    if (cell_cost == cost::kInscribed && !(backing_out && ci >= required)) feasible = false;
    if (ci < required) feasible = false;
  }
  if (!std::isfinite(c)) c = params.cutoff + params.inscribed_radius + 1.0;
  out.c = c;
  out.J1 = obstacle_cost(c, params);
  out.feasible = feasible;
  if (feasible) out.J = out.J1 + out.J2;
  return out;
}

std::optional<std::size_t> best_sample(std::span<const TrajectorySample> samples) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.feasible) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = samples[*best];
    if (*s.J < *b.J || (*s.J == *b.J && s.d > b.d)) best = i;
  }
  return best;
}

SetpointDecision select_setpoint(std::span<const TrajectorySample> samples,
                                 const std::optional<TrajectorySample>& current,
                                 const Pose2D& robot, const LocalPlannerConfig& config) {
  const bool current_usable = current && current->feasible &&
                              distance(robot.position(), current->target) > config.reach_tolerance;
  const auto best = best_sample(samples);

  SetpointDecision decision;
  if (!best) {
    if (!current_usable) throw PlannerStuck("no feasible corridor sample");
    decision.sample = *current;
  } else if (!current_usable) {
    decision.sample = samples[*best];
    decision.superseded_previous = current.has_value();
  } else if (*samples[*best].J < config.theta * *current->J) {
    decision.sample = samples[*best];
    decision.superseded_previous = true;
  } else {
    decision.sample = *current;
  }

  const Vec2 to = decision.sample.target - robot.position();
  const double yaw_error =
      norm(to) > 1e-9 ? std::abs(normalize_angle(std::atan2(to.y, to.x) - robot.yaw())) : 0.0;
  decision.mode = yaw_error > config.face_threshold ? MotionMode::kRotateToFace
                                                     : MotionMode::kTranslate;
  return decision;
}

}  // namespace indoornav
