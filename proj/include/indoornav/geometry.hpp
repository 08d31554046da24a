#pragma once

// Grid/world coordinate algebra, ray casting, exact Euclidean distance
// transform and polyline arithmetic.
//
// Conventions used throughout the library:
//  * cell (i, j) covers [origin.x + i*res, origin.x + (i+1)*res) x [...] in y;
//  * occupancy is a property of the whole cell (tested at its center);
//  * rays report hits where they enter the first occupied cell.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "indoornav/errors.hpp"

namespace indoornav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
/// Counter-clockwise perpendicular (points to the left of v).
constexpr Vec2 left_normal(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Wraps any angle into (-pi, pi].
double normalize_angle(double radians);

/// Planar pose. The yaw is kept normalized into (-pi, pi].
class Pose2D {
 public:
  Pose2D() = default;
  Pose2D(double x, double y, double yaw) : x_(x), y_(y), yaw_(normalize_angle(yaw)) {}
  Pose2D(Vec2 p, double yaw) : Pose2D(p.x, p.y, yaw) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  Vec2 position() const { return {x_, y_}; }
  Vec2 heading() const { return unit_from_angle(yaw_); }

  bool operator==(const Pose2D&) const = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

struct Cell {
  int x = 0;
  int y = 0;
  constexpr bool operator==(const Cell&) const = default;
};

/// Uniform square grid placed in the world frame.
class GridSpec {
 public:
  GridSpec() = default;
  /// Throws std::invalid_argument unless resolution > 0 and width, height >= 1.
  GridSpec(double resolution, int width, int height, Vec2 origin);

  /// Smallest grid at `resolution` covering the rectangle [lo, hi].
  static GridSpec covering(Vec2 lo, Vec2 hi, double resolution);

  double resolution() const { return resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  Vec2 origin() const { return origin_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  Vec2 extent() const { return {width_ * resolution_, height_ * resolution_}; }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool contains(Vec2 p) const;

  /// Cell whose half-open square contains p (may be out of bounds).
  Cell cell_of(Vec2 p) const;
  Vec2 center_of(Cell c) const {
    return {origin_.x + (c.x + 0.5) * resolution_, origin_.y + (c.y + 0.5) * resolution_};
  }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width_)),
            static_cast<int>(index / static_cast<std::size_t>(width_))};
  }

  bool operator==(const GridSpec&) const = default;

 private:
  double resolution_ = 1.0;
  int width_ = 1;
  int height_ = 1;
  Vec2 origin_{};
};

/// Ordered world points with cumulative arc length per vertex.
class Polyline {
 public:
  /// Throws std::invalid_argument on an empty point list.
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& arc_lengths() const { return arc_; }
  std::size_t size() const { return points_.size(); }
  double length() const { return arc_.back(); }
  Vec2 front() const { return points_.front(); }
  Vec2 back() const { return points_.back(); }

  /// Point at arc length s, clamped to [0, length()].
  Vec2 point_at(double s) const;
  /// Unit tangent of the segment containing s. Falls back to +x for a
  /// polyline with no extent.
  Vec2 tangent_at(double s) const;

  bool operator==(const Polyline& o) const { return points_ == o.points_; }

 private:
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> arc_;
};

struct PolylineProjection {
  double arc_length = 0.0;  ///< d: progression along the polyline
  double offset = 0.0;      ///< signed lateral offset, left of the tangent positive
  Vec2 foot{};              ///< closest point on the polyline
};

/// Closest-point projection. Ties resolve to the smallest arc length.
PolylineProjection project_onto_polyline(Vec2 p, const Polyline& line);

/// Visits the cells pierced by the ray from `from` along unit direction `dir`,
/// in order, together with the ray parameter at which each cell is entered
/// (0 for the origin cell). Stops when `visit` returns false, when the entry
/// parameter exceeds `length`, or when the ray leaves the grid.
template <class Visit>
void traverse_ray(const GridSpec& grid, Vec2 from, Vec2 dir, double length, Visit&& visit) {
  const double res = grid.resolution();
  Cell cell = grid.cell_of(from);
  if (!grid.in_bounds(cell)) return;

  const int step_x = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
  const int step_y = dir.y > 0 ? 1 : (dir.y < 0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  const Vec2 local = from - grid.origin();
  auto first_crossing = [res](double pos, double d, int cell_idx, int step) {
    if (step == 0) return kInf;
    const double boundary = (step > 0 ? cell_idx + 1 : cell_idx) * res;
    return std::max(0.0, (boundary - pos) / d);
  };
  double t_max_x = first_crossing(local.x, dir.x, cell.x, step_x);
  double t_max_y = first_crossing(local.y, dir.y, cell.y, step_y);
  const double t_delta_x = step_x != 0 ? res / std::abs(dir.x) : kInf;
  const double t_delta_y = step_y != 0 ? res / std::abs(dir.y) : kInf;

  double t_enter = 0.0;
  while (t_enter <= length) {
    if (!visit(cell, t_enter)) return;
    if (t_max_x < t_max_y) {
      t_enter = t_max_x;
      t_max_x += t_delta_x;
      cell.x += step_x;
    } else {
      t_enter = t_max_y;
      t_max_y += t_delta_y;
      cell.y += step_y;
    }
    if (!grid.in_bounds(cell)) return;
  }
}

/// Distance from `from` to the boundary of the first occupied cell along the
/// ray at `angle`, or nullopt when nothing is hit within max_range. A ray
/// starting inside an occupied cell hits at distance 0. Throws OutOfGrid when
/// `from` is outside the grid.
template <class Occupied>
std::optional<double> raycast(const GridSpec& grid, Occupied&& occupied, Vec2 from, double angle,
                              double max_range) {
  if (!grid.contains(from)) throw OutOfGrid("raycast origin outside grid");
  std::optional<double> hit;
  traverse_ray(grid, from, unit_from_angle(angle), max_range, [&](Cell c, double t) {
    if (occupied(c)) {
      if (t <= max_range) hit = t;
      return false;
    }
    return true;
  });
  return hit;
}

/// Mask overload: `occupied` holds one byte per cell, non-zero meaning occupied.
std::optional<double> raycast(const GridSpec& grid, std::span<const std::uint8_t> occupied,
                              Vec2 from, double angle, double max_range);

/// Per-cell Euclidean distance (meters) between cell centers and the center of
/// the nearest occupied cell. Cells of a grid without any occupied cell hold
/// +infinity.
class DistanceField {
 public:
  DistanceField() = default;
  DistanceField(GridSpec spec, std::vector<double> meters)
      : spec_(spec), meters_(std::move(meters)) {}

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& values() const { return meters_; }
  double at(Cell c) const { return meters_[spec_.index(c)]; }

  /// Clearance at an arbitrary world point: 0 inside an occupied cell,
  /// otherwise bilinear interpolation between the surrounding cell centers.
  /// Throws OutOfGrid for points outside the grid.
  double interpolate(Vec2 p) const;

 private:
  GridSpec spec_;
  std::vector<double> meters_;
};

/// Exact (not chamfer) Euclidean distance transform, separable lower-envelope
/// algorithm. `occupied` has one byte per cell.
DistanceField distance_transform(const GridSpec& grid, std::span<const std::uint8_t> occupied);

}  // namespace indoornav
