#include <gtest/gtest.h>

#include <random>

#include "indoornav/geometry.hpp"
#include "checks.hpp"

using namespace indoornav;

TEST(DistanceTransform, MatchesBruteForceOnRandomMasks) {
  const checks::Tally t = checks::edt_vs_brute_force();
  EXPECT_EQ(t.cases, 100);
  EXPECT_TRUE(t.ok()) << t.first_failure;
}

TEST(DistanceTransform, InterpolateIsZeroInsideObstacle) {
  const GridSpec g(0.1, 5, 5, {0, 0});
  std::vector<std::uint8_t> mask(g.cell_count(), 0);
  mask[g.index({2, 2})] = 1;
  const DistanceField f = distance_transform(g, mask);
  EXPECT_DOUBLE_EQ(f.interpolate({0.25, 0.25}), 0.0);
  EXPECT_NEAR(f.interpolate(g.center_of({4, 2})), 0.2, 1e-12);
  EXPECT_THROW(f.interpolate({-0.1, 0.2}), OutOfGrid);
}

TEST(GridSpec, CellRoundTrip) {
  const GridSpec g(0.05, 40, 30, {-1.0, -0.5});
  for (std::size_t i = 0; i < g.cell_count(); i += 7) {
    const Cell c = g.cell_at(i);
    EXPECT_EQ(g.index(c), i);
    EXPECT_EQ(g.cell_of(g.center_of(c)), c);
  }
  EXPECT_FALSE(g.contains({-1.01, 0.0}));
  EXPECT_TRUE(g.contains({-1.0, -0.5}));
  EXPECT_THROW(GridSpec(0.0, 1, 1, {}), std::invalid_argument);
  EXPECT_THROW(GridSpec(0.1, 0, 1, {}), std::invalid_argument);
}

TEST(Angles, NormalizeIntoHalfOpenRange) {
  EXPECT_DOUBLE_EQ(normalize_angle(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(normalize_angle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(normalize_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(normalize_angle(7.0), 7.0 - 2 * std::numbers::pi, 1e-12);
}

TEST(Polyline, ArcLengthAndProjection) {
  const Polyline line({{0, 0}, {3, 0}, {3, 4}});
  EXPECT_DOUBLE_EQ(line.length(), 7.0);
  EXPECT_EQ(line.point_at(5.0), (Vec2{3, 2}));
  EXPECT_EQ(line.point_at(-1.0), (Vec2{0, 0}));
  EXPECT_EQ(line.point_at(99.0), (Vec2{3, 4}));

  const auto proj = project_onto_polyline({1.0, 0.5}, line);
  EXPECT_DOUBLE_EQ(proj.arc_length, 1.0);
  EXPECT_DOUBLE_EQ(proj.offset, 0.5);
  const auto right = project_onto_polyline({4.0, 1.0}, line);
  EXPECT_DOUBLE_EQ(right.arc_length, 4.0);
  EXPECT_DOUBLE_EQ(right.offset, -1.0);
  EXPECT_THROW(Polyline({}), std::invalid_argument);
}

TEST(Raycast, TraverseVisitsContiguousCells) {
  const GridSpec g(0.1, 20, 20, {0, 0});
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> pos(0.05, 1.95), ang(-3.14, 3.14);
  for (int k = 0; k < 200; ++k) {
    const Vec2 from{pos(gen), pos(gen)};
    Cell prev = g.cell_of(from);
    double prev_t = -1.0;
    traverse_ray(g, from, unit_from_angle(ang(gen)), 5.0, [&](Cell c, double t) {
      EXPECT_GE(t, prev_t);
      EXPECT_LE(std::abs(c.x - prev.x) + std::abs(c.y - prev.y), 1);
      prev = c;
      prev_t = t;
      return true;
    });
  }
}

TEST(Raycast, HitsFirstOccupiedCellBoundary) {
  const GridSpec g(0.1, 20, 5, {0, 0});
  std::vector<std::uint8_t> mask(g.cell_count(), 0);
  for (int y = 0; y < 5; ++y) mask[g.index({12, y})] = 1;
  const auto hit = raycast(g, std::span<const std::uint8_t>(mask), {0.25, 0.25}, 0.0, 5.0);
  ASSERT_TRUE(hit);
  EXPECT_NEAR(*hit, 0.95, 1e-12);
  EXPECT_FALSE(raycast(g, std::span<const std::uint8_t>(mask), {0.25, 0.25}, std::numbers::pi, 5.0));
  EXPECT_FALSE(raycast(g, std::span<const std::uint8_t>(mask), {0.25, 0.25}, 0.0, 0.5));
  EXPECT_THROW(raycast(g, std::span<const std::uint8_t>(mask), {-1.0, 0.0}, 0.0, 1.0), OutOfGrid);
}
