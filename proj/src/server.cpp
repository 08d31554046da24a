#include "indoornav/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <iostream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "indoornav/simulation.hpp"
#include "indoornav/telemetry.hpp"

namespace indoornav {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class WsSession;

}  // namespace

struct TelemetryServer::Impl {
  struct PendingCommand {
    OperatorCommand command;
    std::weak_ptr<WsSession> from;
  };

  Impl(Scenario s, ServeOptions o)
      : scenario(std::move(s)),
        options(o),
        scenario_json(scenario_to_json(scenario)),
        acceptor(ioc),
        signals(ioc),
        snapshots(o.snapshot_queue),
        commands(o.command_queue) {}

  void accept();
  void flush_snapshots();
  void handle_frame(std::string_view text, const std::shared_ptr<WsSession>& from);
  void reply(const std::weak_ptr<WsSession>& to, std::string message);
  void publish(const Simulation& sim);
  void sim_loop();
  void request_stop();

  Scenario scenario;
  ServeOptions options;
  std::string scenario_json;

  net::io_context ioc{1};
  tcp::acceptor acceptor;
  net::signal_set signals;

  // Touched only on the io thread.
  std::vector<std::weak_ptr<WsSession>> sessions;
  std::shared_ptr<const SimFrame> latest;

  BoundedQueue<std::shared_ptr<const SimFrame>> snapshots;
  BoundedQueue<PendingCommand> commands;

  std::thread io_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};
  std::mutex stop_mutex;
  std::condition_variable stop_cv;
  bool stop_requested = false;
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, TelemetryServer::Impl& server)
      : ws_(std::move(socket)), server_(server) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->server_.sessions.push_back(self);
      if (self->server_.latest) self->offer(self->server_.latest);
      self->read();
    });
  }

  /// Latest-wins: a frame not yet written is replaced by a newer one.
  void offer(std::shared_ptr<const SimFrame> frame) {
    pending_ = std::move(frame);
    pump();
  }

  void send_control(std::string message) {
    control_.push_back(std::move(message));
    pump();
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.handle_frame(text, self);
      self->read();
    });
  }

  void pump() {
    if (writing_ || closed_) return;
    if (!control_.empty()) {
      out_ = std::move(control_.front());
      control_.pop_front();
    } else if (pending_) {
      out_ = encode_snapshot(make_snapshot(*pending_, differ_));
      pending_.reset();
    } else {
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(out_),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (ec) {
                        self->closed_ = true;
                        return;
                      }
                      self->pump();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  TelemetryServer::Impl& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> control_;
  std::shared_ptr<const SimFrame> pending_;
  MapDiffer differ_;
  std::string out_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, TelemetryServer::Impl& server)
      : stream_(std::move(socket)), server_(server) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->handle();
                     });
  }

  void handle() {
    if (websocket::is_upgrade(req_) && req_.target() == "/ws") {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), server_)->run(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(req_.keep_alive());
    res->set(http::field::server, "indoornav");
    res->set(http::field::access_control_allow_origin, "*");
    if (req_.method() != http::verb::get) {
      res->result(http::status::method_not_allowed);
      res->set(http::field::content_type, "text/plain");
      res->body() = "method not allowed\n";
    } else if (req_.target() == "/scenario") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->body() = server_.scenario_json;
    } else if (req_.target() == "/healthz") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "text/plain");
      res->body() = "ok\n";
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!res->keep_alive()) {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                          return;
                        }
                        self->read();
                      });
  }

  beast::tcp_stream stream_;
  TelemetryServer::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void TelemetryServer::Impl::accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    accept();
  });
}

void TelemetryServer::Impl::flush_snapshots() {
  for (auto& frame : snapshots.drain()) latest = std::move(frame);
  if (!latest) return;
  std::erase_if(sessions, [](const std::weak_ptr<WsSession>& w) { return w.expired(); });
  for (const auto& w : sessions) {
    if (auto s = w.lock()) s->offer(latest);
  }
}

void TelemetryServer::Impl::handle_frame(std::string_view text,
                                         const std::shared_ptr<WsSession>& from) {
  OperatorCommand command;
  try {
    command = parse_command(text);
  } catch (const ProtocolError& e) {
    from->send_control(encode_error(e.what()));
    return;
  }
  if (!commands.try_push({command, from})) {
    from->send_control(encode_error("command queue full"));
  }
}

void TelemetryServer::Impl::reply(const std::weak_ptr<WsSession>& to, std::string message) {
  net::post(ioc, [to, message = std::move(message)]() mutable {
    if (auto s = to.lock()) s->send_control(std::move(message));
  });
}

void TelemetryServer::Impl::publish(const Simulation& sim) {
  snapshots.push_drop_oldest(std::make_shared<const SimFrame>(capture_frame(sim)));
  net::post(ioc, [this] { flush_snapshots(); });
}

void TelemetryServer::Impl::sim_loop() {
  using clock = std::chrono::steady_clock;
  Simulation sim(scenario);
  publish(sim);
  auto next = clock::now();
  auto last_idle_publish = clock::now();
  while (running) {
    for (PendingCommand& pc : commands.drain()) {
      try {
        sim.submit(pc.command);
        reply(pc.from, encode_ack(command_name(pc.command)));
      } catch (const CommandRejected& e) {
        reply(pc.from, encode_error(e.what()));
      }
    }
    const std::int64_t before = sim.state().tick;
    sim.step();
    const bool advanced = sim.state().tick != before;

    const auto now = clock::now();
    if (advanced) {
      if (sim.state().tick % options.publish_every == 0) publish(sim);
      if (options.realtime_factor > 0.0) {
        next += std::chrono::duration_cast<clock::duration>(
            std::chrono::duration<double>(sim.state().dt / options.realtime_factor));
        if (next < now - std::chrono::seconds(1)) next = now;
        std::this_thread::sleep_until(next);
      }
    } else {
      // Paused or finished: keep viewers fed at a low rate.
      if (now - last_idle_publish > std::chrono::milliseconds(100)) {
        publish(sim);
        last_idle_publish = now;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      next = clock::now();
    }
  }
}

void TelemetryServer::Impl::request_stop() {
  {
    std::lock_guard lock(stop_mutex);
    stop_requested = true;
  }
  stop_cv.notify_all();
}

TelemetryServer::TelemetryServer(Scenario scenario, ServeOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), options)) {}

TelemetryServer::~TelemetryServer() { stop(); }

unsigned short TelemetryServer::start() {
  Impl& s = *impl_;
  const tcp::endpoint endpoint(net::ip::make_address(s.options.address), s.options.port);
  s.acceptor.open(endpoint.protocol());
  s.acceptor.set_option(net::socket_base::reuse_address(true));
  s.acceptor.bind(endpoint);
  s.acceptor.listen(net::socket_base::max_listen_connections);
  const unsigned short port = s.acceptor.local_endpoint().port();

  s.signals.add(SIGINT);
  s.signals.add(SIGTERM);
  s.signals.async_wait([&s](beast::error_code ec, int) {
    if (!ec) s.request_stop();
  });

  s.accept();
  s.running = true;
  s.io_thread = std::thread([&s] { s.ioc.run(); });
  s.sim_thread = std::thread([&s] { s.sim_loop(); });
  return port;
}

void TelemetryServer::stop() {
  Impl& s = *impl_;
  s.running = false;
  if (s.sim_thread.joinable()) s.sim_thread.join();
  s.ioc.stop();
  if (s.io_thread.joinable()) s.io_thread.join();
  s.request_stop();
}

void TelemetryServer::wait() {
  std::unique_lock lock(impl_->stop_mutex);
  impl_->stop_cv.wait(lock, [this] { return impl_->stop_requested; });
}

}  // namespace indoornav
