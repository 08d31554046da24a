#include "indoornav/mapper.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>

namespace indoornav {

OccupancyGrid::OccupancyGrid(GridSpec spec, LogOddsParams params)
    : spec_(spec),
      params_(params),
      log_odds_(spec.cell_count(), 0.0),
      stamp_(spec.cell_count(), 0) {}

void OccupancyGrid::update(Cell c, double delta) {
  double& l = log_odds_[spec_.index(c)];
  l = std::clamp(l + delta, params_.min, params_.max);
}

std::vector<CellClass> OccupancyGrid::classes() const {
  std::vector<CellClass> out(log_odds_.size());
  std::transform(log_odds_.begin(), log_odds_.end(), out.begin(),
                 [this](double l) { return classify_value(l); });
  return out;
}

std::vector<std::uint8_t> OccupancyGrid::occupied_mask() const {
  std::vector<std::uint8_t> out(log_odds_.size());
  std::transform(log_odds_.begin(), log_odds_.end(), out.begin(), [this](double l) {
    return static_cast<std::uint8_t>(l > params_.occupied_threshold ? 1 : 0);
  });
  return out;
}

void OccupancyGrid::integrate_scan(const Pose2D& pose, const LaserScan& scan) {
  if (scan.in_collision) return;
  if (++scan_counter_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    scan_counter_ = 1;
  }
  const std::uint32_t id = scan_counter_;
  const Vec2 origin = pose.position();
  // Nudge past the surface so a hit lands in the cell behind it regardless of
  // which side the beam arrives from.
  const double nudge = 1e-3 * spec_.resolution();
  const double angle_offset = pose.yaw() - scan.pose.yaw();

  for (int i = 0; i < scan.beam_count(); ++i) {
    const auto& r = scan.ranges[static_cast<std::size_t>(i)];
    if (!r) continue;
    const Vec2 end = origin + unit_from_angle(scan.beam_angle(i) + angle_offset) * (*r + nudge);
    const Cell c = spec_.cell_of(end);
    if (!spec_.in_bounds(c)) continue;
    const std::size_t idx = spec_.index(c);
    if (stamp_[idx] == id) continue;
    stamp_[idx] = id;
    update(c, params_.hit);
  }

  for (int i = 0; i < scan.beam_count(); ++i) {
    const auto& r = scan.ranges[static_cast<std::size_t>(i)];
    const double length = r ? *r : scan.max_range;
    const Vec2 dir = unit_from_angle(scan.beam_angle(i) + angle_offset);
    traverse_ray(spec_, origin, dir, length, [&](Cell c, double t_enter) {
      if (r && t_enter >= length) return false;
      const std::size_t idx = spec_.index(c);
      if (stamp_[idx] != id) {
        stamp_[idx] = id;
        update(c, params_.miss);
      }
      return true;
    });
  }
}

namespace {

// Log-odds bilinearly interpolated between cell centers; cells outside the
// grid count as unknown (0).
double interpolated_log_odds(const OccupancyGrid& map, Vec2 p) {
  const GridSpec& g = map.spec();
  const double gx = (p.x - g.origin().x) / g.resolution() - 0.5;
  const double gy = (p.y - g.origin().y) / g.resolution() - 0.5;
  const int x0 = static_cast<int>(std::floor(gx));
  const int y0 = static_cast<int>(std::floor(gy));
  const double fx = gx - x0;
  const double fy = gy - y0;
  auto value = [&](int x, int y) { return g.in_bounds({x, y}) ? map.log_odds({x, y}) : 0.0; };
  return (1 - fx) * (1 - fy) * value(x0, y0) + fx * (1 - fy) * value(x0 + 1, y0) +
         (1 - fx) * fy * value(x0, y0 + 1) + fx * fy * value(x0 + 1, y0 + 1);
}

// Boundary crossing along `dir` nearest to `anchor`, as a signed offset.
// Samples that are exactly zero are bridged: a sign change across a run of
// zeros is placed at the middle of the run.
std::optional<double> nearest_crossing(const OccupancyGrid& map, Vec2 anchor, Vec2 dir) {
  const double step = map.spec().resolution() / 10.0;
  const int n = static_cast<int>(std::ceil(kGaugeSearchRadius / step));
  std::optional<double> best;
  std::optional<std::pair<double, double>> last;  // last nonzero sample (s, value)
  bool adjacent = false;                          // no zero samples since `last`
  for (int k = -n; k <= n; ++k) {
    const double s = k * step;
    const double cur = interpolated_log_odds(map, anchor + dir * s);
    if (cur == 0.0) {
      adjacent = false;
      continue;
    }
    if (last && (last->second > 0.0) != (cur > 0.0)) {
      const auto [ps, pv] = *last;
      const double crossing = adjacent ? ps + (s - ps) * pv / (pv - cur) : 0.5 * (ps + s);
      if (std::abs(crossing) <= kGaugeSearchRadius &&
          (!best || std::abs(crossing) < std::abs(*best))) {
        best = crossing;
      }
    }
    last = {s, cur};
    adjacent = true;
  }
  return best;
}

}  // namespace

double measure_gauge(const OccupancyGrid& map, const Gauge& gauge) {
  const Vec2 span = gauge.to - gauge.from;
  const double len = norm(span);
  if (len <= 0.0) throw MeasurementFailed("gauge " + gauge.label + " has zero length");
  const Vec2 dir = span / len;
  const auto a = nearest_crossing(map, gauge.from, dir);
  if (!a) throw MeasurementFailed("gauge " + gauge.label + ": no boundary near 'from'");
  const auto b = nearest_crossing(map, gauge.to, dir);
  if (!b) throw MeasurementFailed("gauge " + gauge.label + ": no boundary near 'to'");
  return len + *b - *a;
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (int row = height - 1; row >= 0; --row) {
    out.write(reinterpret_cast<const char*>(pixels.data()) + static_cast<std::ptrdiff_t>(row) * width,
              width);
  }
}

void export_map(const OccupancyGrid& map, const std::filesystem::path& pgm_path) {
  const auto classes = map.classes();
  std::vector<std::uint8_t> pixels(classes.size());
  std::transform(classes.begin(), classes.end(), pixels.begin(), [](CellClass c) -> std::uint8_t {
    switch (c) {
      case CellClass::kFree: return 254;
      case CellClass::kOccupied: return 0;
      case CellClass::kUnknown: return 205;
    }
    return 205;
  });
  const GridSpec& g = map.spec();
  write_pgm(pgm_path, g.width(), g.height(), pixels);

  auto meta_path = pgm_path;
  meta_path.replace_extension(".yaml");
  std::ofstream meta(meta_path);
  if (!meta) throw Error("cannot open " + meta_path.string() + " for writing");
  meta << std::setprecision(15);
  meta << "image: " << pgm_path.filename().string() << '\n'
       << "resolution: " << g.resolution() << '\n'
       << "origin: [" << g.origin().x << ", " << g.origin().y << ", 0.0]\n"
       << "width: " << g.width() << '\n'
       << "height: " << g.height() << '\n'
       << "negate: 0\n"
       << "occupied_log_odds: " << map.params().occupied_threshold << '\n'
       << "free_log_odds: " << map.params().free_threshold << '\n';
}

}  // namespace indoornav
