#include "indoornav/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace indoornav {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where, "expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ScenarioError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where, "expected a number");
  return j.get<double>();
}

Vec2 point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(where, "expected [x, y]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

std::vector<Vec2> points(const json& j, const std::string& where) {
  if (!j.is_array()) throw ScenarioError(where, "expected an array of [x, y]");
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(point(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

const json& array_at(const json& root, const char* key) {
  static const json kEmpty = json::array();
  if (!root.contains(key)) return kEmpty;
  const json& j = root.at(key);
  if (!j.is_array()) throw ScenarioError(key, "expected an array");
  return j;
}

void parse_params(const json& j, ScenarioParams& p) {
  require_object(j, "params");
  check_keys(j,
             {"A", "gamma", "B", "lambda", "inscribed_radius", "cutoff", "theta", "lateral_max",
              "safety_margin", "unknown_penalty", "noise_sigma", "pose_noise_sigma", "beams"},
             "params");
  auto set = [&](const char* key, double& field) {
    if (j.contains(key)) field = number(j.at(key), std::string("params.") + key);
  };
  set("A", p.cost.A);
  set("gamma", p.cost.gamma);
  set("B", p.cost.B);
  set("lambda", p.cost.lambda);
  set("inscribed_radius", p.cost.inscribed_radius);
  set("cutoff", p.cost.cutoff);
  set("theta", p.local.theta);
  set("lateral_max", p.local.lateral_max);
  set("safety_margin", p.local.safety_margin);
  set("unknown_penalty", p.global.unknown_penalty);
  set("noise_sigma", p.noise_sigma);
  set("pose_noise_sigma", p.pose_noise_sigma);
  if (j.contains("beams")) {
    if (!j.at("beams").is_number_integer() || j.at("beams").get<int>() < 1) {
      throw ScenarioError("params.beams", "expected a positive integer");
    }
    p.beams = j.at("beams").get<int>();
  }
  try {
    p.cost.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("params", e.what());
  }
  if (!(p.local.theta > 0.0 && p.local.theta <= 1.0)) {
    throw ScenarioError("params.theta", "must lie in (0, 1]");
  }
  if (!(p.noise_sigma >= 0.0)) throw ScenarioError("params.noise_sigma", "must be >= 0");
  if (!(p.pose_noise_sigma >= 0.0)) throw ScenarioError("params.pose_noise_sigma", "must be >= 0");
}

void grow(Rect& r, Vec2 p, double pad = 0.0) {
  r.lo = {std::min(r.lo.x, p.x - pad), std::min(r.lo.y, p.y - pad)};
  r.hi = {std::max(r.hi.x, p.x + pad), std::max(r.hi.y, p.y + pad)};
}

Rect derive_bounds(const Scenario& s) {
  Rect r{s.start.position(), s.start.position()};
  for (const auto& w : s.world.walls) {
    grow(r, w.a);
    grow(r, w.b);
  }
  for (const auto& poly : s.world.polygons) {
    for (const auto& v : poly.vertices) grow(r, v);
  }
  for (const auto& d : s.world.discs) grow(r, d.center, d.radius);
  for (const auto& o : s.world.dynamic_obstacles) {
    for (const auto& p : o.waypoints().points()) grow(r, p, o.radius());
  }
  // An empty world has nothing to bound it but where the robot is sent.
  if (s.world.walls.empty() && s.world.polygons.empty() && s.world.discs.empty() &&
      s.world.dynamic_obstacles.empty()) {
    for (const auto& g : s.goals) grow(r, g);
  }
  constexpr double kPad = 1.0;
  r.lo = r.lo - Vec2{kPad, kPad};
  r.hi = r.hi + Vec2{kPad, kPad};
  return r;
}

}  // namespace

GridSpec Scenario::grid() const {
  return GridSpec::covering(world.bounds.lo, world.bounds.hi, resolution);
}

Scenario load_scenario(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("document", e.what());
  }
  require_object(root, "document");
  check_keys(root,
             {"name", "resolution", "walls", "obstacles", "dynamic_obstacles", "robot", "goals",
              "gauges", "params", "seed", "tick_budget"},
             "");

  Scenario s;
  if (!root.contains("seed")) throw ScenarioError("seed", "missing required key");
  if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
    throw ScenarioError("seed", "expected a non-negative integer");
  }
  if (root.at("seed").is_number_integer() && root.at("seed").get<std::int64_t>() < 0) {
    throw ScenarioError("seed", "expected a non-negative integer");
  }
  s.seed = root.at("seed").get<std::uint64_t>();

  if (root.contains("name")) {
    if (!root.at("name").is_string()) throw ScenarioError("name", "expected a string");
    s.name = root.at("name").get<std::string>();
  } else {
    s.name = "unnamed";
  }
  if (root.contains("resolution")) s.resolution = number(root.at("resolution"), "resolution");
  if (!(s.resolution > 0.0)) throw ScenarioError("resolution", "must be positive");
  if (root.contains("tick_budget")) {
    if (!root.at("tick_budget").is_number_integer() || root.at("tick_budget").get<std::int64_t>() < 0) {
      throw ScenarioError("tick_budget", "expected a non-negative integer");
    }
    s.tick_budget = root.at("tick_budget").get<std::int64_t>();
  }

  const json& walls = array_at(root, "walls");
  for (std::size_t i = 0; i < walls.size(); ++i) {
    const std::string where = "walls[" + std::to_string(i) + "]";
    const json& w = walls[i];
    if (!w.is_array() || w.size() != 4) throw ScenarioError(where, "expected [x1, y1, x2, y2]");
    s.world.walls.push_back({{number(w[0], where), number(w[1], where)},
                             {number(w[2], where), number(w[3], where)}});
  }

  const json& obstacles = array_at(root, "obstacles");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const std::string where = "obstacles[" + std::to_string(i) + "]";
    const json& o = obstacles[i];
    require_object(o, where);
    check_keys(o, {"polygon", "disc"}, where);
    if (o.contains("polygon") == o.contains("disc")) {
      throw ScenarioError(where, "expected exactly one of 'polygon' or 'disc'");
    }
    if (o.contains("polygon")) {
      auto verts = points(o.at("polygon"), where + ".polygon");
      if (verts.size() < 3) throw ScenarioError(where + ".polygon", "needs at least 3 vertices");
      s.world.polygons.push_back({std::move(verts)});
    } else {
      const json& d = o.at("disc");
      require_object(d, where + ".disc");
      check_keys(d, {"center", "radius"}, where + ".disc");
      if (!d.contains("center") || !d.contains("radius")) {
        throw ScenarioError(where + ".disc", "needs center and radius");
      }
      const double r = number(d.at("radius"), where + ".disc.radius");
      if (!(r > 0.0)) throw ScenarioError(where + ".disc.radius", "must be positive");
      s.world.discs.push_back({point(d.at("center"), where + ".disc.center"), r});
    }
  }

  const json& dynamic = array_at(root, "dynamic_obstacles");
  for (std::size_t i = 0; i < dynamic.size(); ++i) {
    const std::string where = "dynamic_obstacles[" + std::to_string(i) + "]";
    const json& o = dynamic[i];
    require_object(o, where);
    check_keys(o, {"radius", "speed", "waypoints", "start_tick"}, where);
    for (const char* key : {"radius", "speed", "waypoints"}) {
      if (!o.contains(key)) throw ScenarioError(where + "." + key, "missing required key");
    }
    auto wps = points(o.at("waypoints"), where + ".waypoints");
    if (wps.empty()) throw ScenarioError(where + ".waypoints", "needs at least one point");
    std::int64_t start_tick = 0;
    if (o.contains("start_tick")) {
      if (!o.at("start_tick").is_number_integer()) {
        throw ScenarioError(where + ".start_tick", "expected an integer");
      }
      start_tick = o.at("start_tick").get<std::int64_t>();
    }
    try {
      s.world.dynamic_obstacles.emplace_back(number(o.at("radius"), where + ".radius"),
                                             number(o.at("speed"), where + ".speed"),
                                             Polyline(std::move(wps)), start_tick);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(where, e.what());
    }
  }

  if (root.contains("robot")) {
    const json& r = root.at("robot");
    require_object(r, "robot");
    check_keys(r, {"start", "radius", "v_max", "yaw_rate_max"}, "robot");
    if (r.contains("start")) {
      const json& st = r.at("start");
      if (!st.is_array() || st.size() != 3) throw ScenarioError("robot.start", "expected [x, y, yaw]");
      s.start = Pose2D(number(st[0], "robot.start"), number(st[1], "robot.start"),
                       number(st[2], "robot.start"));
    }
    if (r.contains("radius")) s.robot.body_radius = number(r.at("radius"), "robot.radius");
    if (r.contains("v_max")) s.robot.v_max = number(r.at("v_max"), "robot.v_max");
    if (r.contains("yaw_rate_max")) {
      s.robot.yaw_rate_max = number(r.at("yaw_rate_max"), "robot.yaw_rate_max");
    }
    if (!(s.robot.body_radius > 0.0)) throw ScenarioError("robot.radius", "must be positive");
    if (!(s.robot.v_max > 0.0)) throw ScenarioError("robot.v_max", "must be positive");
    if (!(s.robot.yaw_rate_max > 0.0)) throw ScenarioError("robot.yaw_rate_max", "must be positive");
  }

  if (!root.contains("goals")) throw ScenarioError("goals", "missing required key");
  s.goals = points(root.at("goals"), "goals");

  const json& gauges = array_at(root, "gauges");
  for (std::size_t i = 0; i < gauges.size(); ++i) {
    const std::string where = "gauges[" + std::to_string(i) + "]";
    const json& g = gauges[i];
    require_object(g, where);
    check_keys(g, {"label", "from", "to"}, where);
    for (const char* key : {"label", "from", "to"}) {
      if (!g.contains(key)) throw ScenarioError(where + "." + key, "missing required key");
    }
    if (!g.at("label").is_string()) throw ScenarioError(where + ".label", "expected a string");
    s.gauges.push_back({g.at("label").get<std::string>(), point(g.at("from"), where + ".from"),
                        point(g.at("to"), where + ".to")});
  }

  // The costmap's inscribed radius follows the robot unless overridden.
  s.params.cost.inscribed_radius = s.robot.body_radius;
  if (root.contains("params")) parse_params(root.at("params"), s.params);
  s.params.local.body_radius = s.robot.body_radius;
  s.params.local.face_threshold = s.robot.face_threshold;

  s.world.bounds = derive_bounds(s);

  // Dynamic obstacles are inactive at load time, so only static geometry counts.
  if (check_collision(s.world, s.start.position(), s.robot.body_radius).collision) {
    throw ScenarioError("robot.start", "start pose is in collision");
  }
  for (std::size_t i = 0; i < s.goals.size(); ++i) {
    if (!s.world.bounds.contains(s.goals[i])) {
      throw ScenarioError("goals[" + std::to_string(i) + "]", "outside world bounds");
    }
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("path", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
  auto pt = [](Vec2 p) { return json::array({p.x, p.y}); };
  json root;
  root["name"] = s.name;
  root["resolution"] = s.resolution;
  root["walls"] = json::array();
  for (const auto& w : s.world.walls) root["walls"].push_back({w.a.x, w.a.y, w.b.x, w.b.y});
  root["obstacles"] = json::array();
  for (const auto& poly : s.world.polygons) {
    json verts = json::array();
    for (const auto& v : poly.vertices) verts.push_back(pt(v));
    root["obstacles"].push_back({{"polygon", verts}});
  }
  for (const auto& d : s.world.discs) {
    root["obstacles"].push_back({{"disc", {{"center", pt(d.center)}, {"radius", d.radius}}}});
  }
  root["dynamic_obstacles"] = json::array();
  for (const auto& o : s.world.dynamic_obstacles) {
    json wps = json::array();
    for (const auto& p : o.waypoints().points()) wps.push_back(pt(p));
    root["dynamic_obstacles"].push_back({{"radius", o.radius()},
                                         {"speed", o.speed()},
                                         {"waypoints", wps},
                                         {"start_tick", o.activation_tick()}});
  }
  root["robot"] = {{"start", {s.start.x(), s.start.y(), s.start.yaw()}},
                   {"radius", s.robot.body_radius},
                   {"v_max", s.robot.v_max},
                   {"yaw_rate_max", s.robot.yaw_rate_max}};
  root["goals"] = json::array();
  for (const auto& g : s.goals) root["goals"].push_back(pt(g));
  root["gauges"] = json::array();
  for (const auto& g : s.gauges) {
    root["gauges"].push_back({{"label", g.label}, {"from", pt(g.from)}, {"to", pt(g.to)}});
  }
  const auto& p = s.params;
  root["params"] = {{"A", p.cost.A},
                    {"gamma", p.cost.gamma},
                    {"B", p.cost.B},
                    {"lambda", p.cost.lambda},
                    {"inscribed_radius", p.cost.inscribed_radius},
                    {"cutoff", p.cost.cutoff},
                    {"theta", p.local.theta},
                    {"lateral_max", p.local.lateral_max},
                    {"safety_margin", p.local.safety_margin},
                    {"unknown_penalty", p.global.unknown_penalty},
                    {"noise_sigma", p.noise_sigma},
                    {"pose_noise_sigma", p.pose_noise_sigma},
                    {"beams", p.beams}};
  root["seed"] = s.seed;
  root["tick_budget"] = s.tick_budget;
  return root.dump(2);
}

bool MetricsReport::all_goals_reached() const {
  for (const auto& g : goals) {
    if (!g.reached) return false;
  }
  return true;
}

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string emit_metrics_csv(const MetricsReport& report) {
  std::string out =
      "kind,label,truth,measured,error,goal_reached,ticks,collisions,min_clearance,path_length,"
      "replans,setpoint_switches\n";
  for (std::size_t i = 0; i < report.goals.size(); ++i) {
    const auto& g = report.goals[i];
    out += "goal," + std::to_string(i) + ",,,," + (g.reached ? "1" : "0") + "," +
           std::to_string(g.ticks) + "," + std::to_string(g.collisions) + "," +
           fmt(g.min_clearance) + "," + fmt(g.path_length) + "," + std::to_string(g.replans) +
           "," + std::to_string(g.setpoint_switches) + "\n";
  }
  for (const auto& g : report.gauges) {
    const auto err = g.error();
    out += "gauge," + g.label + "," + fmt(g.truth) + "," + (g.measured ? fmt(*g.measured) : "") +
           "," + (err ? fmt(*err) : "") + ",,,,,,,\n";
  }
  return out;
}

}  // namespace indoornav
