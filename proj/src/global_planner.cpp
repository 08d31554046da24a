#include "indoornav/global_planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace indoornav {

std::optional<double> cell_weight(std::uint8_t cost, const GlobalPlannerConfig& config) {
  if (cost == cost::kUnknown) return 1.0 + config.unknown_penalty;
  if (cost >= cost::kInscribed) return std::nullopt;
  return 1.0 + cost / double(cost::kMaxInflated);
}

namespace {

struct Move {
  int dx;
  int dy;
  double length;  // in cells
};

constexpr std::array<Move, 8> kMoves{{{1, 0, 1.0},
                                      {-1, 0, 1.0},
                                      {0, 1, 1.0},
                                      {0, -1, 1.0},
                                      {1, 1, std::numbers::sqrt2},
                                      {1, -1, std::numbers::sqrt2},
                                      {-1, 1, std::numbers::sqrt2},
                                      {-1, -1, std::numbers::sqrt2}}};

double octile(Cell a, Cell b) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (std::numbers::sqrt2 - 1.0) * std::min(dx, dy);
}

struct OpenEntry {
  double f;
  double g;
  std::size_t index;
};

struct OpenOrder {
  // priority_queue pops the "largest"; invert so the best entry is on top.
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.index > b.index;
  }
};

}  // namespace

PlanSearchResult astar_search(const Costmap& costmap, Cell start, Cell goal,
                              const GlobalPlannerConfig& config) {
  const GridSpec& spec = costmap.spec;
  const double res = spec.resolution();
  const std::size_t n = spec.cell_count();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::vector<double> g(n, kInf);
  std::vector<std::size_t> parent(n, kNone);
  std::vector<std::uint8_t> closed(n, 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;

  const std::size_t s = spec.index(start);
  const std::size_t t = spec.index(goal);
  g[s] = 0.0;
  open.push({octile(start, goal) * res, 0.0, s});

  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    if (top.index == t) break;

    const Cell c = spec.cell_at(top.index);
    const bool escaping = costmap.cost[top.index] == cost::kInscribed;
    for (const Move& m : kMoves) {
      const Cell nb{c.x + m.dx, c.y + m.dy};
      if (!spec.in_bounds(nb)) continue;
      const std::size_t ni = spec.index(nb);
      if (closed[ni]) continue;
      const std::uint8_t nc = costmap.cost[ni];
      std::optional<double> w = cell_weight(nc, config);
      if (!w && escaping && nc == cost::kInscribed) w = 2.0;
      if (!w) continue;
      const double cand = g[top.index] + m.length * res * *w;
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = top.index;
        open.push({cand + octile(nb, goal) * res, cand, ni});
      }
    }
  }

  PlanSearchResult result;
  if (!std::isfinite(g[t])) return result;
  result.cost = g[t];
  for (std::size_t i = t; i != kNone; i = parent[i]) result.cells.push_back(spec.cell_at(i));
  std::reverse(result.cells.begin(), result.cells.end());
  return result;
}

GlobalPlan plan_global(const Costmap& costmap, Vec2 start, Vec2 goal,
                       const GlobalPlannerConfig& config, std::int64_t tick) {
  const GridSpec& spec = costmap.spec;
  if (!spec.contains(start)) throw OutOfGrid("plan start outside grid");
  if (!spec.contains(goal)) {
    throw PlanningError(PlanningError::Kind::kGoalUnreachable, "goal outside grid");
  }
  const Cell sc = spec.cell_of(start);
  const Cell gc = spec.cell_of(goal);
  if (costmap.at(gc) == cost::kLethal) {
    throw PlanningError(PlanningError::Kind::kGoalUnreachable, "goal lies in a lethal cell");
  }
  if (sc == gc) return {Polyline({goal}), tick, goal};

  const PlanSearchResult found = astar_search(costmap, sc, gc, config);
  if (found.cells.empty()) throw PlanningError(PlanningError::Kind::kNoPath, "no path to goal");

  std::vector<Vec2> points;
  points.reserve(found.cells.size() + 1);
  for (const Cell& c : found.cells) points.push_back(spec.center_of(c));
  if (points.back() != goal) points.push_back(goal);
  return {Polyline(std::move(points)), tick, goal};
}

double path_cost(const Costmap& costmap, std::span<const Cell> cells,
                 const GlobalPlannerConfig& config) {
  double total = 0.0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const int dx = std::abs(cells[i].x - cells[i - 1].x);
    const int dy = std::abs(cells[i].y - cells[i - 1].y);
    const double len = (dx + dy == 2 ? std::numbers::sqrt2 : 1.0) * costmap.spec.resolution();
    const auto w = cell_weight(costmap.at(cells[i]), config);
    if (!w) return std::numeric_limits<double>::infinity();
    total += len * *w;
  }
  return total;
}

bool replan_due(const ReplanInputs& inputs, const std::optional<GlobalPlan>& last_plan) {
  if (!inputs.goal) return false;
  if (!last_plan) return true;
  if (last_plan->goal != *inputs.goal) return true;
  const double elapsed = double(inputs.tick - last_plan->created_tick) * inputs.dt;
  if (elapsed >= 1.0 - 1e-9) return true;
  if (inputs.costmap) {
    const GridSpec& spec = inputs.costmap->spec;
    for (const Vec2& p : last_plan->polyline.points()) {
      if (spec.contains(p) && inputs.costmap->at(spec.cell_of(p)) == cost::kLethal) return true;
    }
  }
  return false;
}

}  // namespace indoornav
