#pragma once

// Known-pose log-odds occupancy mapping and map-based dimension measurement.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "indoornav/geometry.hpp"
#include "indoornav/world.hpp"

namespace indoornav {

enum class CellClass : std::uint8_t { kFree = 0, kOccupied = 1, kUnknown = 2 };

struct LogOddsParams {
  double hit = 0.85;
  double miss = -0.4;
  double min = -10.0;
  double max = 10.0;
  double occupied_threshold = 2.0;  ///< occupied iff log-odds > this
  double free_threshold = -2.0;     ///< free iff log-odds < this
};

class OccupancyGrid {
 public:
  explicit OccupancyGrid(GridSpec spec, LogOddsParams params = {});

  const GridSpec& spec() const { return spec_; }
  const LogOddsParams& params() const { return params_; }

  double log_odds(Cell c) const { return log_odds_[spec_.index(c)]; }
  const std::vector<double>& log_odds_values() const { return log_odds_; }
  CellClass classify(Cell c) const { return classify_value(log_odds_[spec_.index(c)]); }
  CellClass classify_value(double l) const {
    if (l > params_.occupied_threshold) return CellClass::kOccupied;
    if (l < params_.free_threshold) return CellClass::kFree;
    return CellClass::kUnknown;
  }

  /// Adds `delta` to the cell's log-odds, clamped into [min, max].
  void update(Cell c, double delta);

  std::vector<CellClass> classes() const;
  /// One byte per cell, 1 where the cell is classified occupied.
  std::vector<std::uint8_t> occupied_mask() const;

  /// Scan integration from a known pose. Within one scan each cell is updated
  /// at most once, and a hit takes precedence over a traversal.
  void integrate_scan(const Pose2D& pose, const LaserScan& scan);

 private:
  GridSpec spec_;
  LogOddsParams params_;
  std::vector<double> log_odds_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t scan_counter_ = 0;
};

/// Free-function spelling of OccupancyGrid::integrate_scan.
inline void integrate_scan(OccupancyGrid& map, const Pose2D& pose, const LaserScan& scan) {
  map.integrate_scan(pose, scan);
}

struct Gauge {
  std::string label;
  Vec2 from;
  Vec2 to;

  double truth() const { return distance(from, to); }
};

/// Measures a gauge off the map: along the gauge line, the occupancy boundary
/// nearest to each endpoint is located at the zero crossing of the bilinearly
/// interpolated log-odds (within 0.25 m of the endpoint), and the distance
/// between the two crossings is returned. Throws MeasurementFailed when an
/// endpoint has no crossing in range.
double measure_gauge(const OccupancyGrid& map, const Gauge& gauge);

/// Search half-width used by measure_gauge.
inline constexpr double kGaugeSearchRadius = 0.25;

/// Writes the map as a binary PGM (P5) plus a `key: value` sidecar. Rows are
/// written top (max y) first. Pixel values: free 254, occupied 0, unknown 205.
/// The sidecar path is `pgm_path` with its extension replaced by ".yaml".
void export_map(const OccupancyGrid& map, const std::filesystem::path& pgm_path);

/// Generic grey-scale writer shared with the costmap debug export. `pixels`
/// is row-major with row 0 at the bottom of the grid (min y).
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);

}  // namespace indoornav
