#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "checks.hpp"
#include "indoornav/simulation.hpp"

using namespace indoornav;

namespace {

Scenario open_room(double goal_x = 3.0) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "name": "open_room",
    "seed": 2,
    "walls": [[0, 0, 4, 0], [4, 0, 4, 3], [4, 3, 0, 3], [0, 3, 0, 0]],
    "robot": {"start": [1, 1.5, 0]},
    "goals": [[3, 1.5]],
    "tick_budget": 2000
  })");
  doc["goals"][0][0] = goal_x;
  return load_scenario(doc.dump());
}

}  // namespace

TEST(Simulation, ReachesGoalInOpenRoom) {
  const MetricsReport r = run_experiment(open_room());
  EXPECT_TRUE(r.success()) << r.diagnosis;
  EXPECT_EQ(r.collisions, 0);
  EXPECT_GE(r.replans, 1);
  EXPECT_GT(r.scans_integrated, 0);
  // 2 m at 0.5 m/s, plus planning latency.
  EXPECT_GT(r.ticks, 180);
  EXPECT_LT(r.ticks, 600);
}

TEST(Simulation, GoalAtStartFinishesImmediately) {
  Scenario s = open_room();
  s.goals = {s.start.position()};
  Simulation sim(s);
  sim.step();
  EXPECT_TRUE(sim.finished());
  const MetricsReport r = sim.report();
  EXPECT_TRUE(r.success());
  EXPECT_EQ(r.ticks, 0);
}

TEST(Simulation, SameSeedSameRun) {
  const Scenario s = open_room();
  Simulation a(s), b(s);
  for (int k = 0; k < 150; ++k) {
    a.step();
    b.step();
    ASSERT_EQ(a.state(), b.state()) << "tick " << k;
  }
  EXPECT_EQ(a.map().log_odds_values(), b.map().log_odds_values());
  EXPECT_EQ(emit_metrics_csv(a.run()), emit_metrics_csv(b.run()));

  Simulation c(s, 99);
  for (int k = 0; k < 150; ++k) c.step();
  EXPECT_NE(c.state().rng, a.state().rng);
}

TEST(Simulation, PauseHoldsStateAndResumeContinues) {
  Simulation sim(open_room());
  for (int k = 0; k < 60; ++k) sim.step();
  sim.submit(Pause{});
  sim.step();
  const SimState held = sim.state();
  for (int k = 0; k < 20; ++k) sim.step();
  EXPECT_TRUE(sim.paused());
  EXPECT_EQ(sim.state(), held);
  sim.submit(Resume{});
  sim.step();
  EXPECT_EQ(sim.state().tick, held.tick + 1);
  EXPECT_TRUE(sim.run().success());
}

TEST(Simulation, CommandsValidated) {
  Simulation sim(open_room());
  EXPECT_THROW(sim.submit(SetGoal{{50, 50}}), CommandRejected);
  EXPECT_THROW(sim.submit(SetParam{"gamma", 1.0}), CommandRejected);
  EXPECT_THROW(sim.submit(SetParam{"theta", 0.0}), CommandRejected);
  EXPECT_THROW(sim.submit(SetParam{"lambda", -1.0}), CommandRejected);
  EXPECT_NO_THROW(sim.submit(SetParam{"lambda", 0.6}));
  sim.step();
  EXPECT_DOUBLE_EQ(sim.params().cost.lambda, 0.6);
  sim.submit(SetParam{"B", 50});
  sim.submit(SetParam{"theta", 0.9});
  sim.step();
  EXPECT_DOUBLE_EQ(sim.params().cost.B, 50);
  EXPECT_DOUBLE_EQ(sim.params().local.theta, 0.9);
}

TEST(Simulation, SetGoalRedirects) {
  Simulation sim(open_room());
  for (int k = 0; k < 50; ++k) sim.step();
  sim.submit(SetGoal{{1.0, 2.5}});
  const MetricsReport r = sim.run();
  EXPECT_TRUE(r.success()) << r.diagnosis;
  ASSERT_EQ(r.goals.size(), 1u);
  EXPECT_EQ(r.goals[0].goal, (Vec2{1.0, 2.5}));
  EXPECT_LE(distance(sim.state().robot.pose.position(), {1.0, 2.5}), 0.10);

  // After finishing, a new goal restarts the run.
  sim.submit(SetGoal{{3.0, 1.0}});
  const MetricsReport again = sim.run();
  EXPECT_EQ(again.goals.size(), 2u);
  EXPECT_TRUE(again.success());
}

TEST(Simulation, TickBudgetEndsRun) {
  Scenario s = open_room();
  s.tick_budget = 30;
  const MetricsReport r = run_experiment(s);
  EXPECT_EQ(r.ticks, 30);
  EXPECT_FALSE(r.success());
  EXPECT_EQ(r.diagnosis, "tick budget exhausted");
}

TEST(Simulation, UnreachableGoalIsDiagnosedNotHung) {
  nlohmann::json doc = nlohmann::json::parse(R"({
    "seed": 1,
    "walls": [[0, 0, 6, 0], [6, 0, 6, 3], [6, 3, 0, 3], [0, 3, 0, 0], [3, 0, 3, 3]],
    "robot": {"start": [1, 1.5, 0]},
    "goals": [[5, 1.5]],
    "tick_budget": 3000
  })");
  const MetricsReport r = run_experiment(load_scenario(doc.dump()));
  EXPECT_FALSE(r.success());
  EXPECT_FALSE(r.diagnosis.empty());
  EXPECT_EQ(r.collisions, 0);
}
