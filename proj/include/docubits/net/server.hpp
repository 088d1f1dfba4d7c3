#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <boost/asio/io_context.hpp>

#include "docubits/config.hpp"
#include "docubits/net/server_core.hpp"
#include "docubits/session.hpp"

namespace docubits::net {

struct ServerConfig {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = 7400;  // newline-delimited JSON over TCP; 0 picks a free port
  std::uint16_t ws_port = 0;  // WebSocket + HTTP; 0 picks a free port
  std::optional<std::filesystem::path> log_path;
  // Written after every commit when set.
  std::optional<std::filesystem::path> snapshot_out;
  std::optional<std::filesystem::path> static_dir;
  bool validate_each_commit = false;
  EngineConfig engine;
};

// Authoritative server on a single io_context thread. All sockets, the
// engine, and file writes run on that thread, so proposals from every
// connection are committed in one total order.
//
// The WebSocket port also answers plain HTTP: GET /state returns the current
// snapshot, GET /derived the clone/anchor/appearance view, and other paths
// are served from static_dir when configured.
class Server {
 public:
  // Binds both endpoints; throws boost::system::system_error on failure.
  Server(boost::asio::io_context& io, ServerConfig config, SessionState initial);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t tcp_port() const;
  std::uint16_t ws_port() const;

  // Closes acceptors and connections. Safe to call from any thread.
  void stop();

  // Current authoritative state. Call only from the io_context thread.
  const SessionState& state() const;

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace docubits::net
