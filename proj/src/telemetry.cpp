#include "indoornav/telemetry.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace indoornav {

using nlohmann::json;

SimFrame capture_frame(const Simulation& sim) {
  SimFrame f;
  const SimState& st = sim.state();
  f.tick = st.tick;
  f.pose = st.robot.pose;
  f.setpoint = st.setpoint;
  f.goal = sim.goal();
  f.paused = sim.paused();
  if (sim.plan()) f.plan = sim.plan()->polyline.points();
  f.samples = sim.samples();
  f.scan = sim.last_scan();
  for (const DynamicObstacle& o : st.world.dynamic_obstacles) {
    if (o.active()) f.dynamic_obstacles.push_back({o.position(), o.radius()});
  }
  f.metrics = sim.report(false);
  f.grid = sim.map().spec();
  f.cells = std::make_shared<const std::vector<CellClass>>(sim.map().classes());
  return f;
}

std::vector<MapRun> encode_runs(const std::vector<CellClass>& cells) {
  std::vector<MapRun> runs;
  for (std::size_t i = 0; i < cells.size();) {
    std::size_t j = i + 1;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    runs.push_back({std::int64_t(i), std::int64_t(j - i), int(cells[i])});
    i = j;
  }
  return runs;
}

std::vector<MapRun> diff_runs(const std::vector<CellClass>& before,
                              const std::vector<CellClass>& after) {
  if (before.size() != after.size()) return encode_runs(after);
  std::vector<MapRun> runs;
  for (std::size_t i = 0; i < after.size();) {
    if (before[i] == after[i]) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < after.size() && before[j] != after[j] && after[j] == after[i]) ++j;
    runs.push_back({std::int64_t(i), std::int64_t(j - i), int(after[i])});
    i = j;
  }
  return runs;
}

void apply_runs(std::vector<CellClass>& cells, const std::vector<MapRun>& runs) {
  for (const MapRun& r : runs) {
    if (r.start < 0 || r.length < 0 || std::size_t(r.start + r.length) > cells.size() ||
        r.value < 0 || r.value > 2) {
      throw ProtocolError("map run out of range");
    }
    std::fill_n(cells.begin() + r.start, r.length, static_cast<CellClass>(r.value));
  }
}

void MapDiffer::update(const SimFrame& frame, Snapshot& out) {
  const std::vector<CellClass>& cells = *frame.cells;
  const bool key = sent_.size() != cells.size() || !(grid_ == frame.grid) ||
                   diffs_since_keyframe_ >= kKeyframeInterval;
  out.keyframe = key;
  if (key) {
    out.map_info = MapInfo{frame.grid.width(), frame.grid.height(), frame.grid.resolution(),
                           frame.grid.origin()};
    out.map_diff = encode_runs(cells);
    diffs_since_keyframe_ = 0;
  } else {
    out.map_info.reset();
    out.map_diff = diff_runs(sent_, cells);
    ++diffs_since_keyframe_;
  }
  sent_ = cells;
  grid_ = frame.grid;
}

Snapshot make_snapshot(const SimFrame& frame, MapDiffer& differ) {
  Snapshot s;
  s.tick = frame.tick;
  s.pose = frame.pose;
  s.setpoint = frame.setpoint;
  s.goal = frame.goal;
  s.paused = frame.paused;
  s.plan = frame.plan;
  for (const TrajectorySample& t : frame.samples) {
    s.samples.push_back({t.target, int(t.kind), t.feasible, t.J});
  }
  s.scan.pose = frame.scan.pose;
  s.scan.angle_min = frame.scan.angle_min;
  s.scan.angle_increment = frame.scan.angle_increment() * kScanDecimation;
  for (std::size_t i = 0; i < frame.scan.ranges.size(); i += kScanDecimation) {
    s.scan.ranges.push_back(frame.scan.ranges[i]);
  }
  s.dynamic_obstacles = frame.dynamic_obstacles;
  const MetricsReport& m = frame.metrics;
  s.metrics = {m.ticks, 0, m.collisions, m.min_clearance, m.path_length,
               m.replans, m.setpoint_switches, m.stuck};
  for (const GoalMetrics& g : m.goals) s.metrics.goals_reached += g.reached ? 1 : 0;
  differ.update(frame, s);
  return s;
}

namespace {

json pt(Vec2 p) { return json::array({p.x, p.y}); }

json opt_pt(const std::optional<Vec2>& p) { return p ? pt(*p) : json(nullptr); }

// JSON has no infinity; null stands in for it.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Vec2 read_pt(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ProtocolError("expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

std::optional<Vec2> read_opt_pt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return read_pt(j);
}

json parse_frame(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("frame must be a JSON object");
  if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != kProtocolVersion) {
    throw ProtocolError("unsupported or missing protocol version");
  }
  if (!j.contains("type") || !j["type"].is_string()) throw ProtocolError("missing frame type");
  return j;
}

}  // namespace

std::string encode_snapshot(const Snapshot& s) {
  json j;
  j["v"] = kProtocolVersion;
  j["type"] = "snapshot";
  j["tick"] = s.tick;
  j["pose"] = {s.pose.x(), s.pose.y(), s.pose.yaw()};
  j["setpoint"] = opt_pt(s.setpoint);
  j["goal"] = opt_pt(s.goal);
  j["paused"] = s.paused;
  j["plan"] = json::array();
  for (const Vec2& p : s.plan) j["plan"].push_back(pt(p));
  j["samples"] = json::array();
  for (const SampleView& v : s.samples) {
    j["samples"].push_back({{"p", pt(v.point)},
                            {"kind", v.kind},
                            {"feasible", v.feasible},
                            {"J", v.J ? json(*v.J) : json(nullptr)}});
  }
  json ranges = json::array();
  for (const auto& r : s.scan.ranges) ranges.push_back(r ? json(*r) : json(nullptr));
  j["scan"] = {{"pose", {s.scan.pose.x(), s.scan.pose.y(), s.scan.pose.yaw()}},
               {"angle_min", s.scan.angle_min},
               {"angle_increment", s.scan.angle_increment},
               {"ranges", ranges}};
  j["keyframe"] = s.keyframe;
  if (s.map_info) {
    j["map_info"] = {{"width", s.map_info->width},
                     {"height", s.map_info->height},
                     {"resolution", s.map_info->resolution},
                     {"origin", pt(s.map_info->origin)}};
  }
  j["map_diff"] = json::array();
  for (const MapRun& r : s.map_diff) j["map_diff"].push_back({r.start, r.length, r.value});
  j["dynamic_obstacles"] = json::array();
  for (const Disc& d : s.dynamic_obstacles) {
    j["dynamic_obstacles"].push_back({{"center", pt(d.center)}, {"radius", d.radius}});
  }
  const MetricsView& m = s.metrics;
  j["metrics"] = {{"ticks", m.ticks},
                  {"goals_reached", m.goals_reached},
                  {"collisions", m.collisions},
                  {"min_clearance", finite_or_null(m.min_clearance)},
                  {"path_length", m.path_length},
                  {"replans", m.replans},
                  {"setpoint_switches", m.setpoint_switches},
                  {"stuck", m.stuck}};
  return j.dump();
}

Snapshot decode_snapshot(std::string_view text) {
  const json j = parse_frame(text);
  if (j["type"] != "snapshot") throw ProtocolError("not a snapshot frame");
  Snapshot s;
  try {
    s.tick = j.at("tick").get<std::int64_t>();
    const json& pose = j.at("pose");
    s.pose = Pose2D(pose.at(0).get<double>(), pose.at(1).get<double>(), pose.at(2).get<double>());
    s.setpoint = read_opt_pt(j.at("setpoint"));
    s.goal = read_opt_pt(j.at("goal"));
    s.paused = j.at("paused").get<bool>();
    for (const json& p : j.at("plan")) s.plan.push_back(read_pt(p));
    for (const json& v : j.at("samples")) {
      SampleView sv{read_pt(v.at("p")), v.at("kind").get<int>(), v.at("feasible").get<bool>(),
                    std::nullopt};
      if (!v.at("J").is_null()) sv.J = v.at("J").get<double>();
      s.samples.push_back(sv);
    }
    const json& scan = j.at("scan");
    const json& sp = scan.at("pose");
    s.scan.pose = Pose2D(sp.at(0).get<double>(), sp.at(1).get<double>(), sp.at(2).get<double>());
    s.scan.angle_min = scan.at("angle_min").get<double>();
    s.scan.angle_increment = scan.at("angle_increment").get<double>();
    for (const json& r : scan.at("ranges")) {
      s.scan.ranges.push_back(r.is_null() ? std::nullopt : std::optional<double>(r.get<double>()));
    }
    s.keyframe = j.at("keyframe").get<bool>();
    if (j.contains("map_info")) {
      const json& mi = j.at("map_info");
      s.map_info = MapInfo{mi.at("width").get<int>(), mi.at("height").get<int>(),
                           mi.at("resolution").get<double>(), read_pt(mi.at("origin"))};
    }
    for (const json& r : j.at("map_diff")) {
      s.map_diff.push_back(
          {r.at(0).get<std::int64_t>(), r.at(1).get<std::int64_t>(), r.at(2).get<int>()});
    }
    for (const json& d : j.at("dynamic_obstacles")) {
      s.dynamic_obstacles.push_back({read_pt(d.at("center")), d.at("radius").get<double>()});
    }
    const json& m = j.at("metrics");
    s.metrics.ticks = m.at("ticks").get<std::int64_t>();
    s.metrics.goals_reached = m.at("goals_reached").get<int>();
    s.metrics.collisions = m.at("collisions").get<int>();
    s.metrics.min_clearance = m.at("min_clearance").is_null()
                                  ? std::numeric_limits<double>::infinity()
                                  : m.at("min_clearance").get<double>();
    s.metrics.path_length = m.at("path_length").get<double>();
    s.metrics.replans = m.at("replans").get<int>();
    s.metrics.setpoint_switches = m.at("setpoint_switches").get<int>();
    s.metrics.stuck = m.at("stuck").get<bool>();
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed snapshot: ") + e.what());
  }
  return s;
}

OperatorCommand parse_command(std::string_view text) {
  const json j = parse_frame(text);
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "set_goal") return SetGoal{{j.at("x").get<double>(), j.at("y").get<double>()}};
    if (type == "pause") return Pause{};
    if (type == "resume") return Resume{};
    if (type == "set_param") {
      return SetParam{j.at("name").get<std::string>(), j.at("value").get<double>()};
    }
  } catch (const json::exception& e) {
    throw ProtocolError("malformed " + type + " command: " + e.what());
  }
  throw ProtocolError("unknown command type '" + type + "'");
}

std::string command_name(const OperatorCommand& command) {
  switch (command.index()) {
    case 0: return "set_goal";
    case 1: return "pause";
    case 2: return "resume";
    default: return "set_param";
  }
}

std::string encode_command(const OperatorCommand& command) {
  json j{{"v", kProtocolVersion}, {"type", command_name(command)}};
  if (const auto* g = std::get_if<SetGoal>(&command)) {
    j["x"] = g->goal.x;
    j["y"] = g->goal.y;
  } else if (const auto* p = std::get_if<SetParam>(&command)) {
    j["name"] = p->name;
    j["value"] = p->value;
  }
  return j.dump();
}

std::string encode_error(std::string_view message) {
  return json{{"v", kProtocolVersion}, {"type", "error"}, {"message", message}}.dump();
}

std::string encode_ack(std::string_view command) {
  return json{{"v", kProtocolVersion}, {"type", "ack"}, {"command", command}}.dump();
}

}  // namespace indoornav
