#pragma once

// Exponential cost inflation (0-255 costmap convention) and the dual-source
// local costmap built from the map plus the live scan.

#include <cstdint>
#include <span>
#include <vector>

#include "indoornav/geometry.hpp"
#include "indoornav/mapper.hpp"
#include "indoornav/world.hpp"

namespace indoornav {

/// Cost shaping constants. The obstacle term is A*exp(-gamma*c) and the
/// progression term is B*exp(-lambda*d).
struct CostParams {
  double A = 252.0;
  double gamma = 2.5;   ///< 1/m
  double B = 100.0;
  double lambda = 0.4;  ///< 1/m
  double inscribed_radius = 0.30;
  double cutoff = 2.2;  ///< beyond this distance past the inscribed radius, cost is 0

  /// Throws std::invalid_argument unless A in (0, 253) and gamma, lambda, B > 0.
  void validate() const;
};

namespace cost {
inline constexpr std::uint8_t kFree = 0;
inline constexpr std::uint8_t kMaxInflated = 252;
inline constexpr std::uint8_t kInscribed = 253;
inline constexpr std::uint8_t kLethal = 254;
inline constexpr std::uint8_t kUnknown = 255;
}  // namespace cost

struct Costmap {
  GridSpec spec;
  std::vector<std::uint8_t> cost;

  std::uint8_t at(Cell c) const { return cost[spec.index(c)]; }
  std::uint8_t at(Vec2 p) const;  ///< throws OutOfGrid
};

/// Cost for a free cell at `distance` meters from the nearest obstacle cell.
std::uint8_t inflated_cost(double distance, const CostParams& params);

/// Inflates a classified map: occupied -> 254, unknown -> 255, otherwise the
/// inflated cost of the cell's distance to the nearest occupied cell.
Costmap inflate(const GridSpec& spec, std::span<const CellClass> classes, const CostParams& params);

/// Same, for a plain occupied mask with no unknown cells.
Costmap inflate(const GridSpec& spec, std::span<const std::uint8_t> occupied,
                const CostParams& params);

/// Costmap plus the distance field it was inflated from.
struct LocalCostmap {
  Costmap costmap;
  DistanceField distance;
};

/// Side length of the rolling window recomputed around the robot.
inline double local_window_side(const CostParams& params, double corridor = 3.0) {
  return 2.0 * (corridor + params.cutoff);
}

/// Rasterizes the scan's finite returns as extra obstacles on top of the map
/// costmap's lethal cells, re-inflates inside the rolling window around
/// `pose`, and keeps the cell-wise maximum with `map_costmap`, so the result
/// never drops below the map-derived cost. A return inside an unknown cell
/// makes that cell lethal. The distance field covers the
/// whole grid and includes the scan obstacles.
LocalCostmap compose_local_costmap(const Costmap& map_costmap, const LaserScan& scan,
                                   const Pose2D& pose, const CostParams& params);

/// Obstacle clearance c at a point (meters), from the distance field.
inline double clearance_at(const DistanceField& field, Vec2 point) {
  return field.interpolate(point);
}

/// Debug export in the same PGM layout as the map export (pixel = 255 - cost).
void export_costmap(const Costmap& costmap, const std::filesystem::path& pgm_path);

}  // namespace indoornav
