#pragma once

#include <cstdint>
#include <optional>

#include "indoornav/costmap.hpp"
#include "indoornav/geometry.hpp"

namespace indoornav {

struct GlobalPlan {
  Polyline polyline;
  std::int64_t created_tick = 0;
  Vec2 goal;
};

struct GlobalPlannerConfig {
  /// Extra per-cell weight for entering an unknown (255) cell, in units of
  /// the move length.
  double unknown_penalty = 0.5;
};

/// Traversal weight of entering a cell, or nullopt when the cell is blocked
/// (inscribed or lethal).
std::optional<double> cell_weight(std::uint8_t cost, const GlobalPlannerConfig& config);

/// 8-connected A* over the costmap. A move costs its length times the weight
/// of the cell it enters: 1 + cost/252 for known cells, 1 + unknown_penalty
/// for unknown ones. Equal-f ties are broken toward larger g, then smaller
/// cell index. The polyline runs from the start cell center to the exact goal.
///
/// Throws PlanningError(kGoalUnreachable) for a goal in a lethal cell or
/// outside the grid, PlanningError(kNoPath) when the goal cannot be reached,
/// and OutOfGrid for a start outside the grid. A start inside the inscribed
/// band may leave through inscribed cells; no other path may enter them.
GlobalPlan plan_global(const Costmap& costmap, Vec2 start, Vec2 goal,
                       const GlobalPlannerConfig& config = {}, std::int64_t tick = 0);

/// Total weighted cost of a cell path under the plan_global metric.
double path_cost(const Costmap& costmap, std::span<const Cell> cells,
                 const GlobalPlannerConfig& config);

/// Result of the last plan_global call's search, exposed for oracle tests.
struct PlanSearchResult {
  std::vector<Cell> cells;
  double cost = 0.0;
};
PlanSearchResult astar_search(const Costmap& costmap, Cell start, Cell goal,
                              const GlobalPlannerConfig& config);

struct ReplanInputs {
  std::int64_t tick = 0;
  double dt = 0.02;
  std::optional<Vec2> goal;      ///< current goal, if any
  const Costmap* costmap = nullptr;  ///< optional: enables the blocked-plan check
};

/// True iff at least one second of sim time has passed since the plan was
/// made, the goal changed, or a plan waypoint now sits in a lethal cell.
/// With no plan at all, planning is due whenever there is a goal.
bool replan_due(const ReplanInputs& inputs, const std::optional<GlobalPlan>& last_plan);

}  // namespace indoornav
