#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "indoornav/mapper.hpp"

using namespace indoornav;

namespace {

World corridor() {
  World w;
  w.walls = {{{0, 0}, {3, 0}}, {{3, 0}, {3, 1}}, {{3, 1}, {0, 1}}, {{0, 1}, {0, 0}}};
  w.bounds = {{0, 0}, {3, 1}};
  return w;
}

}  // namespace

TEST(LogOdds, ClampedUnderRepeatedUpdates) {
  OccupancyGrid map(GridSpec(0.1, 4, 4, {0, 0}));
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> pick(0, 15);
  std::bernoulli_distribution hit(0.5);
  for (int k = 0; k < 5000; ++k) {
    const Cell c = map.spec().cell_at(static_cast<std::size_t>(pick(gen)));
    map.update(c, hit(gen) ? map.params().hit : map.params().miss);
    for (double l : map.log_odds_values()) {
      ASSERT_LE(l, map.params().max);
      ASSERT_GE(l, map.params().min);
    }
  }
  for (int k = 0; k < 100; ++k) map.update({0, 0}, map.params().hit);
  EXPECT_DOUBLE_EQ(map.log_odds({0, 0}), 10.0);
  for (int k = 0; k < 100; ++k) map.update({0, 0}, map.params().miss);
  EXPECT_DOUBLE_EQ(map.log_odds({0, 0}), -10.0);
}

TEST(LogOdds, ClassificationThresholds) {
  OccupancyGrid map(GridSpec(0.1, 1, 1, {0, 0}));
  EXPECT_EQ(map.classify_value(0.0), CellClass::kUnknown);
  EXPECT_EQ(map.classify_value(2.0), CellClass::kUnknown);
  EXPECT_EQ(map.classify_value(2.01), CellClass::kOccupied);
  EXPECT_EQ(map.classify_value(-2.0), CellClass::kUnknown);
  EXPECT_EQ(map.classify_value(-2.01), CellClass::kFree);
}

TEST(Integrate, HitBeatsTraversalWithinOneScan) {
  OccupancyGrid map(GridSpec(0.1, 10, 3, {0, 0}));
  LaserScan scan;
  scan.pose = Pose2D(0.05, 0.15, 0.0);
  scan.angle_min = scan.angle_max = 0.0;
  scan.ranges = {0.5, 0.9};  // both beams along +x
  map.integrate_scan(scan.pose, scan);
  EXPECT_DOUBLE_EQ(map.log_odds({5, 1}), 0.85);
  EXPECT_DOUBLE_EQ(map.log_odds({9, 1}), 0.85);
  EXPECT_DOUBLE_EQ(map.log_odds({2, 1}), -0.4);  // updated once despite two beams
  EXPECT_DOUBLE_EQ(map.log_odds({0, 0}), 0.0);
}

TEST(Integrate, MaxRangeBeamOnlyClears) {
  OccupancyGrid map(GridSpec(0.1, 10, 1, {0, 0}));
  LaserScan scan;
  scan.pose = Pose2D(0.05, 0.05, 0.0);
  scan.angle_min = scan.angle_max = 0.0;
  scan.max_range = 0.5;
  scan.ranges = {std::nullopt};
  map.integrate_scan(scan.pose, scan);
  for (int x = 0; x <= 5; ++x) EXPECT_DOUBLE_EQ(map.log_odds({x, 0}), -0.4) << x;
  EXPECT_DOUBLE_EQ(map.log_odds({6, 0}), 0.0);
}

TEST(Gauges, NoiselessCorridorWidthAndLength) {
  const World w = corridor();
  OccupancyGrid map(GridSpec::covering({-0.5, -0.5}, {3.5, 1.5}, 0.01));
  Rng rng(0);
  for (int k = 0; k < 20; ++k) {
    const Pose2D pose(0.5 + 0.1 * k, 0.5, 0.3 * k);
    map.integrate_scan(pose, simulate_lidar(w, pose, LidarSpec{}, rng));
  }
  EXPECT_NEAR(measure_gauge(map, {"w", {1.5, 0.0}, {1.5, 1.0}}), 1.0, 0.02);
  EXPECT_NEAR(measure_gauge(map, {"l", {0.0, 0.5}, {3.0, 0.5}}), 3.0, 0.02);
  EXPECT_THROW(measure_gauge(map, {"x", {1.5, 0.5}, {1.6, 0.5}}), MeasurementFailed);
  EXPECT_THROW(measure_gauge(map, {"z", {1, 1}, {1, 1}}), MeasurementFailed);
}

TEST(Export, PgmAndSidecar) {
  OccupancyGrid map(GridSpec(0.5, 3, 2, {1.0, -1.0}));
  map.update({0, 0}, 5.0);
  map.update({2, 1}, -5.0);
  const auto dir = std::filesystem::temp_directory_path() / "indoornav_export_test";
  std::filesystem::create_directories(dir);
  export_map(map, dir / "m.pgm");
  std::ifstream pgm(dir / "m.pgm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  pgm >> magic >> w >> h >> maxval;
  pgm.get();
  std::vector<unsigned char> px(6);
  pgm.read(reinterpret_cast<char*>(px.data()), 6);
  EXPECT_EQ(magic, "P5");
  EXPECT_EQ(w, 3);
  EXPECT_EQ(h, 2);
  // Top row first: (0,1) (1,1) (2,1), then (0,0) (1,0) (2,0).
  EXPECT_EQ(px, (std::vector<unsigned char>{205, 205, 254, 0, 205, 205}));
  EXPECT_TRUE(std::filesystem::exists(dir / "m.yaml"));
  std::filesystem::remove_all(dir);
}
