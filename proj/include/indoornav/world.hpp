#pragma once

// Ground-truth world, simulated lidar and the kinematic UAV model.

#include <cstdint>
#include <optional>
#include <vector>

#include "indoornav/geometry.hpp"
#include "indoornav/rng.hpp"

namespace indoornav {

struct Segment {
  Vec2 a;
  Vec2 b;
  bool operator==(const Segment&) const = default;
};

struct Disc {
  Vec2 center;
  double radius = 0.0;
  bool operator==(const Disc&) const = default;
};

/// Convex polygon, vertices in either winding order.
struct Polygon {
  std::vector<Vec2> vertices;
  bool operator==(const Polygon&) const = default;
};

struct Rect {
  Vec2 lo;
  Vec2 hi;
  bool contains(Vec2 p) const { return p.x >= lo.x && p.y >= lo.y && p.x <= hi.x && p.y <= hi.y; }
  bool operator==(const Rect&) const = default;
};

/// Disc that walks a waypoint polyline at constant speed once its activation
/// tick is reached. Before activation it is absent from the world.
class DynamicObstacle {
 public:
  /// Throws std::invalid_argument unless radius > 0 and speed >= 0.
  DynamicObstacle(double radius, double speed, Polyline waypoints, std::int64_t activation_tick);

  double radius() const { return radius_; }
  double speed() const { return speed_; }
  const Polyline& waypoints() const { return waypoints_; }
  std::int64_t activation_tick() const { return activation_tick_; }

  bool active() const { return active_; }
  double travelled() const { return travelled_; }
  Vec2 position() const { return waypoints_.point_at(travelled_); }

  /// Advances one tick: activates at `tick` >= activation tick, then moves
  /// speed*dt along the waypoints, holding at the end.
  void step(std::int64_t tick, double dt);

  bool operator==(const DynamicObstacle&) const = default;

 private:
  double radius_;
  double speed_;
  Polyline waypoints_;
  std::int64_t activation_tick_;
  bool active_ = false;
  double travelled_ = 0.0;
};

struct World {
  std::vector<Segment> walls;
  std::vector<Polygon> polygons;
  std::vector<Disc> discs;
  std::vector<DynamicObstacle> dynamic_obstacles;
  Rect bounds;
  bool operator==(const World&) const = default;
};

/// Distance from p to the nearest static or active dynamic geometry
/// (+infinity in an empty world). Points inside a polygon or disc report 0
/// for the polygon and a negative value for a disc.
double distance_to_nearest(const World& world, Vec2 p);

/// True when p lies strictly inside a polygon or disc (static or active dynamic).
bool inside_obstacle(const World& world, Vec2 p);

/// Exact first intersection of the ray with any world geometry, or nullopt.
std::optional<double> intersect_ray(const World& world, Vec2 origin, Vec2 dir);

struct LidarSpec {
  static constexpr double kDefaultMaxRange = 5.6;
  static constexpr double kFieldOfView = 4.0 * std::numbers::pi / 3.0;  // 240 degrees

  int beams = 683;
  double noise_sigma = 0.0;
  double max_range = kDefaultMaxRange;
};

struct LaserScan {
  Pose2D pose;
  double angle_min = -LidarSpec::kFieldOfView / 2.0;
  double angle_max = LidarSpec::kFieldOfView / 2.0;
  double max_range = LidarSpec::kDefaultMaxRange;
  std::vector<std::optional<double>> ranges;  ///< nullopt = no return within max_range
  bool in_collision = false;

  int beam_count() const { return static_cast<int>(ranges.size()); }
  double angle_increment() const {
    return ranges.size() > 1 ? (angle_max - angle_min) / double(ranges.size() - 1) : 0.0;
  }
  /// World-frame beam angle.
  double beam_angle(int i) const { return pose.yaw() + angle_min + i * angle_increment(); }
};

/// Simulated 240-degree scanner. A pose inside an obstacle yields an all-zero
/// scan with in_collision set. Noise is only drawn when noise_sigma > 0.
LaserScan simulate_lidar(const World& world, const Pose2D& pose, const LidarSpec& spec, Rng& rng);

struct RobotModel {
  double body_radius = 0.30;
  double v_max = 0.5;
  double yaw_rate_max = std::numbers::pi / 2.0;
  double face_threshold = 30.0 * std::numbers::pi / 180.0;
  double face_release = 10.0 * std::numbers::pi / 180.0;
};

/// Robot pose plus the face-before-move hysteresis latch.
struct RobotState {
  Pose2D pose;
  bool turning = false;
  bool operator==(const RobotState&) const = default;
};

/// One kinematic tick toward `setpoint`: rotate in place while the yaw error
/// is beyond the face threshold (latched until it drops below the release
/// angle), otherwise translate straight at <= v_max, never past the setpoint.
RobotState step_robot(const RobotState& state, Vec2 setpoint, const RobotModel& model, double dt);

/// Advances every dynamic obstacle by one tick.
void step_dynamic_obstacles(World& world, std::int64_t tick, double dt);

struct CollisionCheck {
  bool collision = false;
  double clearance = 0.0;  ///< distance to nearest geometry minus body radius
};

/// Closed condition: touching (distance == radius) counts as a collision.
CollisionCheck check_collision(const World& world, Vec2 position, double body_radius);

}  // namespace indoornav
