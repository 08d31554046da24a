#pragma once

// Live telemetry service: runs a Simulation on its own thread and serves
// WebSocket viewers plus two plain HTTP endpoints on one port.
//
//   GET /ws        WebSocket upgrade; snapshot frames out, command frames in
//   GET /scenario  the loaded scenario as JSON
//   GET /healthz   200 "ok"

#include <cstdint>
#include <memory>
#include <string>

#include "indoornav/scenario.hpp"

namespace indoornav {

struct ServeOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;      ///< 0 picks a free port
  double realtime_factor = 1.0;    ///< sim seconds per wall second; 0 = unthrottled
  int publish_every = 5;           ///< ticks between snapshots
  std::size_t snapshot_queue = 8;
  std::size_t command_queue = 64;
};

class TelemetryServer {
 public:
  TelemetryServer(Scenario scenario, ServeOptions options);
  ~TelemetryServer();
  TelemetryServer(const TelemetryServer&) = delete;
  TelemetryServer& operator=(const TelemetryServer&) = delete;

  /// Binds and starts the network and sim threads. Returns the bound port.
  unsigned short start();
  void stop();
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

}  // namespace indoornav
