#include "indoornav/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace indoornav {

double normalize_angle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

GridSpec::GridSpec(double resolution, int width, int height, Vec2 origin)
    : resolution_(resolution), width_(width), height_(height), origin_(origin) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  if (width < 1 || height < 1) throw std::invalid_argument("grid must have at least one cell");
}

GridSpec GridSpec::covering(Vec2 lo, Vec2 hi, double resolution) {
  const int w = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / resolution - 1e-9)));
  const int h = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / resolution - 1e-9)));
  return GridSpec(resolution, w, h, lo);
}

bool GridSpec::contains(Vec2 p) const {
  const Vec2 local = p - origin_;
  return local.x >= 0.0 && local.y >= 0.0 && local.x < width_ * resolution_ &&
         local.y < height_ * resolution_ && in_bounds(cell_of(p));
}

Cell GridSpec::cell_of(Vec2 p) const {
  return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_)),
          static_cast<int>(std::floor((p.y - origin_.y) / resolution_))};
}

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("polyline needs at least one point");
  arc_.reserve(points_.size());
  arc_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    arc_.push_back(arc_.back() + distance(points_[i - 1], points_[i]));
  }
}

std::size_t Polyline::segment_index(double s) const {
  // Index i of the segment [i, i+1] containing s; the last segment for s >= length.
  if (points_.size() < 2) return 0;
  auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
  std::size_t i = it == arc_.begin() ? 0 : static_cast<std::size_t>(it - arc_.begin()) - 1;
  return std::min(i, points_.size() - 2);
}

Vec2 Polyline::point_at(double s) const {
  if (points_.size() == 1) return points_.front();
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_index(s);
  const double seg = arc_[i + 1] - arc_[i];
  if (seg <= 0.0) return points_[i];
  const double t = (s - arc_[i]) / seg;
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

Vec2 Polyline::tangent_at(double s) const {
  if (points_.size() < 2 || length() <= 0.0) return {1.0, 0.0};
  s = std::clamp(s, 0.0, length());
  std::size_t i = segment_index(s);
  // Skip zero-length segments, searching forward then backward.
  for (std::size_t k = i; k + 1 < points_.size(); ++k) {
    const Vec2 d = points_[k + 1] - points_[k];
    if (norm(d) > 0.0) return d / norm(d);
  }
  for (std::size_t k = i; k-- > 0;) {
    const Vec2 d = points_[k + 1] - points_[k];
    if (norm(d) > 0.0) return d / norm(d);
  }
  return {1.0, 0.0};
}

PolylineProjection project_onto_polyline(Vec2 p, const Polyline& line) {
  const auto& pts = line.points();
  const auto& arc = line.arc_lengths();
  if (pts.size() == 1) return {0.0, distance(p, pts.front()), pts.front()};

  PolylineProjection best;
  double best_dist = std::numeric_limits<double>::infinity();
  Vec2 best_tangent{1.0, 0.0};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = dot(ab, ab);
    const double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    const Vec2 foot = a + ab * t;
    const double dist = distance(p, foot);
    if (dist < best_dist) {
      best_dist = dist;
      best.arc_length = arc[i] + t * std::sqrt(len2);
      best.foot = foot;
      best_tangent = len2 > 0.0 ? ab / std::sqrt(len2) : line.tangent_at(arc[i]);
    }
  }
  const double side = cross(best_tangent, p - best.foot);
  best.offset = side < 0.0 ? -best_dist : best_dist;
  return best;
}

std::optional<double> raycast(const GridSpec& grid, std::span<const std::uint8_t> occupied,
                              Vec2 from, double angle, double max_range) {
  if (occupied.size() != grid.cell_count()) throw std::invalid_argument("mask size mismatch");
  return raycast(
      grid, [&](Cell c) { return occupied[grid.index(c)] != 0; }, from, angle, max_range);
}

namespace {

// Squared 1-D distance transform of f (Felzenszwalb & Huttenlocher lower
// envelope of parabolas). `f` holds squared distances; kFar marks "no site".
void edt_1d(std::span<double> f, std::vector<double>& d, std::vector<int>& v,
            std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double kFar = 1e30;
  d.resize(static_cast<std::size_t>(n));
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);

  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kFar) continue;
    while (k >= 0) {
      const int vk = v[k];
      const double s = ((f[q] + double(q) * q) - (f[vk] + double(vk) * vk)) / (2.0 * (q - vk));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = k == 0 ? -std::numeric_limits<double>::infinity()
                  : ((f[q] + double(q) * q) - (f[v[k - 1]] + double(v[k - 1]) * v[k - 1])) /
                        (2.0 * (q - v[k - 1]));
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  if (k < 0) {
    std::fill(f.begin(), f.end(), kFar);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = q - v[j];
    d[q] = dq * dq + f[v[j]];
  }
  std::copy(d.begin(), d.begin() + n, f.begin());
}

}  // namespace

DistanceField distance_transform(const GridSpec& grid, std::span<const std::uint8_t> occupied) {
  if (occupied.size() != grid.cell_count()) throw std::invalid_argument("mask size mismatch");
  constexpr double kFar = 1e30;
  const int w = grid.width();
  const int h = grid.height();
  std::vector<double> sq(grid.cell_count());
  bool any = false;
  for (std::size_t i = 0; i < sq.size(); ++i) {
    sq[i] = occupied[i] ? 0.0 : kFar;
    any = any || occupied[i];
  }
  if (!any) {
    return DistanceField(grid, std::vector<double>(grid.cell_count(),
                                                   std::numeric_limits<double>::infinity()));
  }

  std::vector<double> d, z, column(static_cast<std::size_t>(h));
  std::vector<int> v;
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) column[y] = sq[static_cast<std::size_t>(y) * w + x];
    edt_1d(column, d, v, z);
    for (int y = 0; y < h; ++y) sq[static_cast<std::size_t>(y) * w + x] = column[y];
  }
  for (int y = 0; y < h; ++y) {
    edt_1d(std::span<double>(sq.data() + static_cast<std::size_t>(y) * w, w), d, v, z);
  }

  const double res = grid.resolution();
  for (double& value : sq) value = std::sqrt(value) * res;
  return DistanceField(grid, std::move(sq));
}

double DistanceField::interpolate(Vec2 p) const {
  if (!spec_.contains(p)) throw OutOfGrid("clearance query outside grid");
  const Cell own = spec_.cell_of(p);
  if (at(own) == 0.0) return 0.0;

  // Continuous cell coordinates with cell centers at integers.
  const double gx = (p.x - spec_.origin().x) / spec_.resolution() - 0.5;
  const double gy = (p.y - spec_.origin().y) / spec_.resolution() - 0.5;
  const int x0 = static_cast<int>(std::floor(gx));
  const int y0 = static_cast<int>(std::floor(gy));
  const double fx = gx - x0;
  const double fy = gy - y0;
  auto sample = [&](int x, int y) {
    x = std::clamp(x, 0, spec_.width() - 1);
    y = std::clamp(y, 0, spec_.height() - 1);
    return at({x, y});
  };
  const double v00 = sample(x0, y0);
  const double v10 = sample(x0 + 1, y0);
  const double v01 = sample(x0, y0 + 1);
  const double v11 = sample(x0 + 1, y0 + 1);
  if (!std::isfinite(v00) || !std::isfinite(v10) || !std::isfinite(v01) || !std::isfinite(v11)) {
    return at(own);
  }
  return (1 - fx) * (1 - fy) * v00 + fx * (1 - fy) * v10 + (1 - fx) * fy * v01 + fx * fy * v11;
}

}  // namespace indoornav
