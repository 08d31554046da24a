#pragma once

// Corridor-sampling local planner: positional setpoint candidates around the
// global plan are scored by J = A*exp(-gamma*c) + B*exp(-lambda*d), where c is
// the clearance of the straight robot-to-target segment and d the target's
// progression along the plan. A new setpoint only replaces the current one
// when it is significantly cheaper.

#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "indoornav/costmap.hpp"
#include "indoornav/global_planner.hpp"
#include "indoornav/rng.hpp"

namespace indoornav {

struct LocalPlannerConfig {
  double corridor_length = 3.0;  ///< plan arc length sampled ahead of the robot
  int max_waypoints = 34;
  double stride = 0.09;          ///< plan downsampling step
  double lateral_max = 1.0;      ///< lateral offsets are uniform in (0, lateral_max]
  double body_radius = 0.30;
  double safety_margin = 0.05;
  double theta = 0.85;           ///< switch only if J_best < theta * J_current
  double reach_tolerance = 0.15;
  double face_threshold = 30.0 * std::numbers::pi / 180.0;

  double min_clearance() const { return body_radius + safety_margin; }
};

enum class SampleKind { kOnPlan, kLeft, kRight };

struct CorridorSample {
  Vec2 point;
  SampleKind kind = SampleKind::kOnPlan;
};

/// Plan points every `stride` of arc length ahead of the robot's projection,
/// up to corridor_length (the window end is always included, capped at
/// max_waypoints), each followed by one left and one right lateral sample.
/// Throws PlanningError(kEmptyPlan) for a plan without points.
std::vector<CorridorSample> sample_corridor(const Polyline& plan, const Pose2D& robot, Rng& rng,
                                            const LocalPlannerConfig& config = {});

struct TrajectorySample {
  Vec2 target;
  SampleKind kind = SampleKind::kOnPlan;
  double c = 0.0;
  double d = 0.0;
  double J1 = 0.0;
  double J2 = 0.0;
  std::optional<double> J;  ///< set only for feasible samples
  bool feasible = false;
};

/// Obstacle term A*exp(-gamma*c).
inline double obstacle_cost(double c, const CostParams& p) { return p.A * std::exp(-p.gamma * c); }
/// Progression term B*exp(-lambda*d).
inline double progression_cost(double d, const CostParams& p) {
  return p.B * std::exp(-p.lambda * d);
}

/// Scores the straight robot-to-target segment, probed every half cell.
/// Infeasible when a probe leaves the grid, meets an unknown/inscribed/lethal
/// cell, or has clearance below body radius + margin. When the robot itself
/// already sits inside that margin, segments that never get closer than the
/// robot's current clearance remain feasible so it can back out.
TrajectorySample evaluate_sample(Vec2 target, SampleKind kind, const Pose2D& robot,
                                 const Polyline& plan, const LocalCostmap& local,
                                 const CostParams& params, const LocalPlannerConfig& config = {});

enum class MotionMode { kRotateToFace, kTranslate };

struct SetpointDecision {
  TrajectorySample sample;
  MotionMode mode = MotionMode::kTranslate;
  bool superseded_previous = false;

  Vec2 chosen() const { return sample.target; }
};

/// Picks the setpoint. `current` is the previous setpoint re-evaluated from
/// the robot's present pose. Throws PlannerStuck when no sample is feasible
/// and there is no feasible, unreached current setpoint to keep.
SetpointDecision select_setpoint(std::span<const TrajectorySample> samples,
                                 const std::optional<TrajectorySample>& current,
                                 const Pose2D& robot, const LocalPlannerConfig& config = {});

/// Index of the minimum-J feasible sample (ties: larger d, then earlier), or
/// nullopt if none is feasible.
std::optional<std::size_t> best_sample(std::span<const TrajectorySample> samples);

}  // namespace indoornav
