#include <gtest/gtest.h>

#include "checks.hpp"
#include "indoornav/global_planner.hpp"

using namespace indoornav;

namespace {

Costmap open_costmap(int w, int h, double res = 0.1) {
  return {GridSpec(res, w, h, {0, 0}), std::vector<std::uint8_t>(std::size_t(w) * h, 0)};
}

}  // namespace

TEST(AStar, MatchesDijkstraAndEnumeration) {
  const checks::Tally t = checks::astar_vs_references(300);
  EXPECT_EQ(t.cases, 300);
  EXPECT_TRUE(t.ok()) << t.first_failure << " (" << t.failures << " failures)";
}

TEST(AStar, OpenGridCostIsOctileDistance) {
  const Costmap cm = open_costmap(10, 10);
  const auto r = astar_search(cm, {0, 0}, {9, 4}, {});
  EXPECT_NEAR(r.cost, (5 + 4 * std::numbers::sqrt2) * 0.1, 1e-12);
  EXPECT_EQ(r.cells.size(), 10u);
}

TEST(AStar, CellWeights) {
  const GlobalPlannerConfig c;
  EXPECT_EQ(cell_weight(0, c), 1.0);
  EXPECT_EQ(cell_weight(252, c), 2.0);
  EXPECT_EQ(cell_weight(255, c), 1.5);
  EXPECT_FALSE(cell_weight(253, c));
  EXPECT_FALSE(cell_weight(254, c));
}

TEST(AStar, EscapesInscribedBandButNeverEntersIt) {
  Costmap cm = open_costmap(7, 3);
  for (int y = 0; y < 3; ++y) {
    cm.cost[cm.spec.index({0, y})] = cost::kInscribed;
    cm.cost[cm.spec.index({1, y})] = cost::kInscribed;
    cm.cost[cm.spec.index({4, y})] = cost::kInscribed;
  }
  // Start inside the band on the left: the path may leave through it.
  const auto out = astar_search(cm, {0, 1}, {3, 1}, {});
  ASSERT_FALSE(out.cells.empty());
  // But the wall of inscribed cells at x=4 is closed to everyone else.
  EXPECT_TRUE(astar_search(cm, {2, 1}, {6, 1}, {}).cells.empty());
  EXPECT_THROW(plan_global(cm, cm.spec.center_of({2, 1}), cm.spec.center_of({6, 1})), PlanningError);
}

TEST(PlanGlobal, PolylineEndsAtExactGoal) {
  const Costmap cm = open_costmap(20, 20);
  const GlobalPlan plan = plan_global(cm, {0.12, 0.13}, {1.73, 1.41}, {}, 42);
  EXPECT_EQ(plan.polyline.back(), (Vec2{1.73, 1.41}));
  EXPECT_EQ(plan.polyline.front(), cm.spec.center_of({1, 1}));
  EXPECT_EQ(plan.created_tick, 42);
  const GlobalPlan same_cell = plan_global(cm, {0.12, 0.13}, {0.14, 0.11});
  EXPECT_EQ(same_cell.polyline.size(), 1u);
}

TEST(PlanGlobal, Errors) {
  Costmap cm = open_costmap(10, 10);
  cm.cost[cm.spec.index({5, 5})] = cost::kLethal;
  EXPECT_THROW(plan_global(cm, {-0.5, 0.5}, {0.5, 0.5}), OutOfGrid);
  try {
    plan_global(cm, {0.05, 0.05}, {0.55, 0.55});
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), PlanningError::Kind::kGoalUnreachable);
  }
  try {
    plan_global(cm, {0.05, 0.05}, {5.0, 5.0});
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), PlanningError::Kind::kGoalUnreachable);
  }
  for (int y = 0; y < 10; ++y) cm.cost[cm.spec.index({3, y})] = cost::kLethal;
  try {
    plan_global(cm, {0.05, 0.05}, {0.95, 0.05});
    FAIL();
  } catch (const PlanningError& e) {
    EXPECT_EQ(e.kind(), PlanningError::Kind::kNoPath);
  }
}

TEST(AStar, UnknownCellsArePenalizedNotBlocked) {
  Costmap cm = open_costmap(5, 1);
  cm.cost[2] = cost::kUnknown;
  const auto r = astar_search(cm, {0, 0}, {4, 0}, {});
  EXPECT_NEAR(r.cost, 0.1 * (3 + 1.5), 1e-12);
}

TEST(Replan, DueOncePerSecondOnGoalChangeOrBlock) {
  Costmap cm = open_costmap(20, 20);
  const GlobalPlan plan = plan_global(cm, {0.05, 0.05}, {1.5, 0.05}, {}, 100);
  ReplanInputs in{.tick = 100, .dt = 0.02, .goal = Vec2{1.5, 0.05}, .costmap = &cm};
  EXPECT_FALSE(replan_due(in, plan));
  in.tick = 149;
  EXPECT_FALSE(replan_due(in, plan));
  in.tick = 150;
  EXPECT_TRUE(replan_due(in, plan));
  in.tick = 120;
  in.goal = Vec2{1.0, 1.0};
  EXPECT_TRUE(replan_due(in, plan));
  in.goal = Vec2{1.5, 0.05};
  cm.cost[cm.spec.index({7, 0})] = cost::kLethal;
  EXPECT_TRUE(replan_due(in, plan));
  in.goal.reset();
  EXPECT_FALSE(replan_due(in, plan));
  in.goal = Vec2{1, 1};
  EXPECT_TRUE(replan_due(in, std::nullopt));
}
