#pragma once

// Wire format of the telemetry stream: per-tick snapshots with run-length
// encoded map diffs, operator commands, and the bounded queues that connect
// the sim thread to the network service.

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "indoornav/simulation.hpp"

namespace indoornav {

inline constexpr int kProtocolVersion = 1;
inline constexpr int kKeyframeInterval = 100;  ///< max diffs between keyframes
inline constexpr int kScanDecimation = 4;

class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Immutable copy of everything a viewer needs from one completed tick. The
/// map is shared, never mutated after construction.
struct SimFrame {
  std::int64_t tick = 0;
  Pose2D pose;
  std::optional<Vec2> setpoint;
  std::optional<Vec2> goal;
  bool paused = false;
  std::vector<Vec2> plan;
  std::vector<TrajectorySample> samples;
  LaserScan scan;
  std::vector<Disc> dynamic_obstacles;  ///< active ones only
  MetricsReport metrics;                ///< gauges left empty
  GridSpec grid;
  std::shared_ptr<const std::vector<CellClass>> cells;
};

SimFrame capture_frame(const Simulation& sim);

/// Cells [start, start + length) all take `value` (a CellClass).
struct MapRun {
  std::int64_t start = 0;
  std::int64_t length = 0;
  int value = 0;
  bool operator==(const MapRun&) const = default;
};

struct MapInfo {
  int width = 0;
  int height = 0;
  double resolution = 0.0;
  Vec2 origin;
  bool operator==(const MapInfo&) const = default;
};

struct SampleView {
  Vec2 point;
  int kind = 0;  ///< 0 on-plan, 1 left, 2 right
  bool feasible = false;
  std::optional<double> J;
  bool operator==(const SampleView&) const = default;
};

struct ScanView {
  Pose2D pose;
  double angle_min = 0.0;
  double angle_increment = 0.0;
  std::vector<std::optional<double>> ranges;
  bool operator==(const ScanView&) const = default;
};

struct MetricsView {
  std::int64_t ticks = 0;
  int goals_reached = 0;
  int collisions = 0;
  double min_clearance = 0.0;  ///< +inf until the first collision check
  double path_length = 0.0;
  int replans = 0;
  int setpoint_switches = 0;
  bool stuck = false;
  bool operator==(const MetricsView&) const = default;
};

struct Snapshot {
  std::int64_t tick = 0;
  Pose2D pose;
  std::optional<Vec2> setpoint;
  std::optional<Vec2> goal;
  bool paused = false;
  std::vector<Vec2> plan;
  std::vector<SampleView> samples;
  ScanView scan;
  bool keyframe = false;
  std::optional<MapInfo> map_info;  ///< present on keyframes
  std::vector<MapRun> map_diff;
  std::vector<Disc> dynamic_obstacles;
  MetricsView metrics;

  bool operator==(const Snapshot&) const = default;
};

/// Run-length encoding of a whole grid.
std::vector<MapRun> encode_runs(const std::vector<CellClass>& cells);
/// Runs over the cells that differ between `before` and `after`.
std::vector<MapRun> diff_runs(const std::vector<CellClass>& before,
                              const std::vector<CellClass>& after);
/// Applies runs in place. Throws ProtocolError on out-of-range runs.
void apply_runs(std::vector<CellClass>& cells, const std::vector<MapRun>& runs);

/// Per-viewer map state: the first update and every kKeyframeInterval-th
/// update after it are keyframes, everything else is a diff against what the
/// viewer last received.
class MapDiffer {
 public:
  void force_keyframe() { sent_.clear(); }
  /// Fills keyframe/map_info/map_diff of `out` from the frame's map.
  void update(const SimFrame& frame, Snapshot& out);

 private:
  std::vector<CellClass> sent_;
  GridSpec grid_;
  int diffs_since_keyframe_ = 0;
};

Snapshot make_snapshot(const SimFrame& frame, MapDiffer& differ);

std::string encode_snapshot(const Snapshot& snapshot);
/// Throws ProtocolError on malformed input or a version mismatch.
Snapshot decode_snapshot(std::string_view text);

/// Parses an operator command frame. Throws ProtocolError on malformed JSON,
/// a wrong "v", or an unknown "type".
OperatorCommand parse_command(std::string_view text);
std::string encode_command(const OperatorCommand& command);
std::string command_name(const OperatorCommand& command);

std::string encode_error(std::string_view message);
std::string encode_ack(std::string_view command);

/// Mutex-guarded FIFO with a fixed capacity.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  /// Always accepts; evicts the oldest entry when full. Returns true if
  /// something was evicted.
  bool push_drop_oldest(T value) {
    std::lock_guard lock(mutex_);
    bool dropped = false;
    if (items_.size() >= capacity_) {
      items_.pop_front();
      dropped = true;
      ++dropped_;
    }
    items_.push_back(std::move(value));
    return dropped;
  }

  /// Rejects (returns false) when full.
  bool try_push(T value) {
    std::lock_guard lock(mutex_);
    if (items_.size() >= capacity_) return false;
    items_.push_back(std::move(value));
    return true;
  }

  std::optional<T> try_pop() {
    std::lock_guard lock(mutex_);
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    return v;
  }

  std::vector<T> drain() {
    std::lock_guard lock(mutex_);
    std::vector<T> out(std::make_move_iterator(items_.begin()),
                       std::make_move_iterator(items_.end()));
    items_.clear();
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }
  std::size_t capacity() const { return capacity_; }
  std::size_t dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
  }

 private:
  mutable std::mutex mutex_;
  std::deque<T> items_;
  std::size_t capacity_;
  std::size_t dropped_ = 0;
};

}  // namespace indoornav
