#include "indoornav/world.hpp"

#include <algorithm>
#include <stdexcept>

namespace indoornav {

DynamicObstacle::DynamicObstacle(double radius, double speed, Polyline waypoints,
                                 std::int64_t activation_tick)
    : radius_(radius),
      speed_(speed),
      waypoints_(std::move(waypoints)),
      activation_tick_(activation_tick) {
  if (!(radius > 0.0)) throw std::invalid_argument("dynamic obstacle radius must be positive");
  if (!(speed >= 0.0)) throw std::invalid_argument("dynamic obstacle speed must be >= 0");
}

void DynamicObstacle::step(std::int64_t tick, double dt) {
  if (tick < activation_tick_) return;
  if (!active_) {
    active_ = true;
    return;  // appears at its first waypoint on the activation tick
  }
  travelled_ = std::min(travelled_ + speed_ * dt, waypoints_.length());
}

void step_dynamic_obstacles(World& world, std::int64_t tick, double dt) {
  for (auto& obstacle : world.dynamic_obstacles) obstacle.step(tick, dt);
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + ab * t);
}

bool inside_convex(const Polygon& poly, Vec2 p) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return false;
  int sign = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double c = cross(v[(i + 1) % v.size()] - v[i], p - v[i]);
    if (c == 0.0) return false;  // on the boundary is not strictly inside
    const int s = c > 0.0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  return true;
}

std::optional<double> ray_segment(Vec2 o, Vec2 dir, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double denom = cross(dir, e);
  if (denom == 0.0) return std::nullopt;  // parallel; grazing hits are ignored
  const Vec2 ao = a - o;
  const double t = cross(ao, e) / denom;
  const double u = cross(ao, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

std::optional<double> ray_disc(Vec2 o, Vec2 dir, Vec2 c, double r) {
  const Vec2 oc = o - c;
  const double b = dot(oc, dir);
  const double q = dot(oc, oc) - r * r;
  const double disc = b * b - q;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double t0 = -b - root;
  if (t0 >= 0.0) return t0;
  const double t1 = -b + root;
  if (t1 >= 0.0) return 0.0;  // origin inside the disc
  return std::nullopt;
}

void keep_min(std::optional<double>& best, std::optional<double> candidate) {
  if (candidate && (!best || *candidate < *best)) best = candidate;
}

}  // namespace

double distance_to_nearest(const World& world, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : world.walls) best = std::min(best, point_segment_distance(p, w.a, w.b));
  for (const auto& poly : world.polygons) {
    if (inside_convex(poly, p)) return 0.0;
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
    }
  }
  for (const auto& d : world.discs) best = std::min(best, distance(p, d.center) - d.radius);
  for (const auto& o : world.dynamic_obstacles) {
    if (o.active()) best = std::min(best, distance(p, o.position()) - o.radius());
  }
  return best;
}

bool inside_obstacle(const World& world, Vec2 p) {
  for (const auto& poly : world.polygons) {
    if (inside_convex(poly, p)) return true;
  }
  for (const auto& d : world.discs) {
    if (distance(p, d.center) < d.radius) return true;
  }
  for (const auto& o : world.dynamic_obstacles) {
    if (o.active() && distance(p, o.position()) < o.radius()) return true;
  }
  return false;
}

std::optional<double> intersect_ray(const World& world, Vec2 origin, Vec2 dir) {
  std::optional<double> best;
  for (const auto& w : world.walls) keep_min(best, ray_segment(origin, dir, w.a, w.b));
  for (const auto& poly : world.polygons) {
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      keep_min(best, ray_segment(origin, dir, v[i], v[(i + 1) % v.size()]));
    }
  }
  for (const auto& d : world.discs) keep_min(best, ray_disc(origin, dir, d.center, d.radius));
  for (const auto& o : world.dynamic_obstacles) {
    if (o.active()) keep_min(best, ray_disc(origin, dir, o.position(), o.radius()));
  }
  return best;
}

LaserScan simulate_lidar(const World& world, const Pose2D& pose, const LidarSpec& spec, Rng& rng) {
  LaserScan scan;
  scan.pose = pose;
  scan.max_range = spec.max_range;
  scan.ranges.assign(static_cast<std::size_t>(std::max(spec.beams, 1)), std::nullopt);

  if (inside_obstacle(world, pose.position())) {
    scan.in_collision = true;
    std::fill(scan.ranges.begin(), scan.ranges.end(), 0.0);
    return scan;
  }

  const Vec2 origin = pose.position();
  for (int i = 0; i < scan.beam_count(); ++i) {
    const auto hit = intersect_ray(world, origin, unit_from_angle(scan.beam_angle(i)));
    if (!hit || *hit > spec.max_range) continue;
    double r = *hit + rng.normal(spec.noise_sigma);
    scan.ranges[static_cast<std::size_t>(i)] = std::clamp(r, 1e-6, spec.max_range);
  }
  return scan;
}

RobotState step_robot(const RobotState& state, Vec2 setpoint, const RobotModel& model, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Vec2 pos = state.pose.position();
  const Vec2 to_target = setpoint - pos;
  const double dist = norm(to_target);
  if (dist <= 1e-9) return {state.pose, false};

  const double bearing = std::atan2(to_target.y, to_target.x);
  const double yaw_error = normalize_angle(bearing - state.pose.yaw());
  const double max_turn = model.yaw_rate_max * dt;
  const double turn = std::clamp(yaw_error, -max_turn, max_turn);

  bool turning = state.turning;
  if (turning && std::abs(yaw_error) <= model.face_release) turning = false;
  if (!turning && std::abs(yaw_error) > model.face_threshold) turning = true;

  if (turning) {
    const Pose2D rotated(pos, state.pose.yaw() + turn);
    const bool released = std::abs(yaw_error - turn) <= model.face_release;
    return {rotated, !released};
  }

  const double advance = std::min(model.v_max * dt, dist);
  const Vec2 next = advance >= dist ? setpoint : pos + to_target * (advance / dist);
  return {Pose2D(next, state.pose.yaw() + turn), false};
}

CollisionCheck check_collision(const World& world, Vec2 position, double body_radius) {
  const double d = distance_to_nearest(world, position);
  return {d <= body_radius, d - body_radius};
}

}  // namespace indoornav
