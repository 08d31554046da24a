#include "indoornav/costmap.hpp"

#include <algorithm>
#include <stdexcept>

namespace indoornav {

void CostParams::validate() const {
  if (!(A > 0.0 && A < 253.0)) throw std::invalid_argument("A must lie in (0, 253)");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(B > 0.0)) throw std::invalid_argument("B must be positive");
  if (!(inscribed_radius >= 0.0)) throw std::invalid_argument("inscribed radius must be >= 0");
  if (!(cutoff >= 0.0)) throw std::invalid_argument("cutoff must be >= 0");
}

std::uint8_t Costmap::at(Vec2 p) const {
  if (!spec.contains(p)) throw OutOfGrid("costmap query outside grid");
  return at(spec.cell_of(p));
}

std::uint8_t inflated_cost(double distance, const CostParams& params) {
  if (distance <= 0.0) return cost::kLethal;
  if (distance < params.inscribed_radius) return cost::kInscribed;
  const double beyond = distance - params.inscribed_radius;
  if (beyond > params.cutoff) return cost::kFree;
  const double value = std::round(params.A * std::exp(-params.gamma * beyond));
  return static_cast<std::uint8_t>(std::clamp(value, 0.0, double(cost::kMaxInflated)));
}

namespace {

Costmap inflate_with(const GridSpec& spec, const DistanceField& field,
                     std::span<const std::uint8_t> occupied, std::span<const CellClass> classes,
                     const CostParams& params) {
  Costmap out{spec, std::vector<std::uint8_t>(spec.cell_count(), cost::kFree)};
  const auto& dist = field.values();
  for (std::size_t i = 0; i < out.cost.size(); ++i) {
    if (occupied[i]) {
      out.cost[i] = cost::kLethal;
    } else if (!classes.empty() && classes[i] == CellClass::kUnknown) {
      out.cost[i] = cost::kUnknown;
    } else {
      out.cost[i] = inflated_cost(dist[i], params);
    }
  }
  return out;
}

}  // namespace

Costmap inflate(const GridSpec& spec, std::span<const CellClass> classes, const CostParams& params) {
  if (classes.size() != spec.cell_count()) throw std::invalid_argument("class grid size mismatch");
  std::vector<std::uint8_t> occupied(classes.size());
  std::transform(classes.begin(), classes.end(), occupied.begin(),
                 [](CellClass c) { return std::uint8_t(c == CellClass::kOccupied); });
  const DistanceField field = distance_transform(spec, occupied);
  return inflate_with(spec, field, occupied, classes, params);
}

Costmap inflate(const GridSpec& spec, std::span<const std::uint8_t> occupied,
                const CostParams& params) {
  const DistanceField field = distance_transform(spec, occupied);
  return inflate_with(spec, field, occupied, {}, params);
}

LocalCostmap compose_local_costmap(const Costmap& map_costmap, const LaserScan& scan,
                                   const Pose2D& pose, const CostParams& params) {
  const GridSpec& spec = map_costmap.spec;
  std::vector<std::uint8_t> occupied(spec.cell_count());
  for (std::size_t i = 0; i < occupied.size(); ++i) {
    occupied[i] = map_costmap.cost[i] == cost::kLethal ? 1 : 0;
  }
  if (!scan.in_collision) {
    const double nudge = 1e-3 * spec.resolution();
    for (int i = 0; i < scan.beam_count(); ++i) {
      const auto& r = scan.ranges[static_cast<std::size_t>(i)];
      if (!r) continue;
      const Vec2 end = pose.position() + unit_from_angle(scan.beam_angle(i) - scan.pose.yaw() +
                                                         pose.yaw()) *
                                             (*r + nudge);
      const Cell c = spec.cell_of(end);
      if (spec.in_bounds(c)) occupied[spec.index(c)] = 1;
    }
  }

  LocalCostmap local{map_costmap, distance_transform(spec, occupied)};

  const double half = local_window_side(params) / 2.0;
  const Cell lo = spec.cell_of(pose.position() - Vec2{half, half});
  const Cell hi = spec.cell_of(pose.position() + Vec2{half, half});
  const int x0 = std::max(lo.x, 0), y0 = std::max(lo.y, 0);
  const int x1 = std::min(hi.x, spec.width() - 1), y1 = std::min(hi.y, spec.height() - 1);
  auto& out = local.costmap.cost;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const std::size_t i = spec.index({x, y});
      if (occupied[i]) {
        out[i] = cost::kLethal;
      } else {
        out[i] = std::max(out[i], inflated_cost(local.distance.values()[i], params));
      }
    }
  }
  return local;
}

void export_costmap(const Costmap& costmap, const std::filesystem::path& pgm_path) {
  std::vector<std::uint8_t> pixels(costmap.cost.size());
  std::transform(costmap.cost.begin(), costmap.cost.end(), pixels.begin(),
                 [](std::uint8_t c) { return static_cast<std::uint8_t>(255 - c); });
  write_pgm(pgm_path, costmap.spec.width(), costmap.spec.height(), pixels);
}

}  // namespace indoornav
