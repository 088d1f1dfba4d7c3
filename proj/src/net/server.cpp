#include "docubits/net/server.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "docubits/persist.hpp"

namespace docubits::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::string_view mime_type(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

class Connection {
 public:
  virtual ~Connection() = default;
  virtual void send(std::string line) = 0;
  virtual void close() = 0;
};

struct Server::Impl : std::enable_shared_from_this<Server::Impl> {
  Impl(asio::io_context& io_, ServerConfig cfg, SessionState initial)
      : io(io_),
        config(std::move(cfg)),
        core(std::move(initial), ServerCore::Options{config.validate_each_commit, wall_clock_ms,
                                                      [this](const CommittedEvent& ev) { persist(ev); }}),
        tcp_acceptor(io_),
        ws_acceptor(io_) {
    if (config.log_path) log.emplace(*config.log_path);
    open(tcp_acceptor, config.port);
    open(ws_acceptor, config.ws_port);
    tcp_port = tcp_acceptor.local_endpoint().port();
    ws_port = ws_acceptor.local_endpoint().port();
  }

  void open(tcp::acceptor& acc, std::uint16_t port) {
    const tcp::endpoint ep(asio::ip::make_address(config.bind_address), port);
    acc.open(ep.protocol());
    acc.set_option(asio::socket_base::reuse_address(true));
    acc.bind(ep);
    acc.listen();
  }

  void persist(const CommittedEvent& ev) {
    try {
      if (log) log->append(ev);
      if (config.snapshot_out) save_snapshot(core.state(), *config.snapshot_out, ev.ts);
    } catch (const std::exception& e) {
      std::cerr << "persist failed at seq " << ev.seq << ": " << e.what() << '\n';
    }
  }

  void start() {
    accept_tcp();
    accept_ws();
  }

  void accept_tcp();
  void accept_ws();

  ConnId attach(const std::shared_ptr<Connection>& conn) {
    const ConnId id = next_conn++;
    conns[id] = conn;
    core.connect(id);
    return id;
  }

  void detach(ConnId id) {
    conns.erase(id);
    core.disconnect(id);
  }

  void handle(ConnId id, std::string_view line) { route(core.handle(id, line)); }

  void route(const std::vector<Outbound>& out) {
    for (const auto& o : out) {
      auto it = conns.find(o.to);
      if (it == conns.end()) continue;
      if (auto c = it->second.lock()) c->send(o.line);
    }
  }

  void shutdown() {
    stopped = true;
    beast::error_code ec;
    tcp_acceptor.close(ec);
    ws_acceptor.close(ec);
    auto snapshot = conns;
    for (auto& [id, weak] : snapshot) {
      if (auto c = weak.lock()) c->close();
    }
  }

  asio::io_context& io;
  ServerConfig config;
  std::optional<EventLog> log;
  ServerCore core;
  tcp::acceptor tcp_acceptor;
  tcp::acceptor ws_acceptor;
  std::map<ConnId, std::weak_ptr<Connection>> conns;
  std::uint16_t tcp_port = 0;
  std::uint16_t ws_port = 0;
  ConnId next_conn = 1;
  bool stopped = false;
};

namespace {

class TcpConnection : public Connection, public std::enable_shared_from_this<TcpConnection> {
 public:
  TcpConnection(tcp::socket socket, std::shared_ptr<Server::Impl> server)
      : socket_(std::move(socket)), server_(std::move(server)) {}

  void start() {
    id_ = server_->attach(shared_from_this());
    read();
  }

  void send(std::string line) override {
    line += '\n';
    queue_.push_back(std::move(line));
    if (queue_.size() == 1) write();
  }

  void close() override {
    beast::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
  }

 private:
  void read() {
    socket_.async_read_some(asio::buffer(chunk_), [self = shared_from_this()](beast::error_code ec, std::size_t n) {
      if (ec) {
        self->server_->detach(self->id_);
        return;
      }
      self->consume(std::string_view(self->chunk_.data(), n));
      self->read();
    });
  }

  void consume(std::string_view data) {
    pending_.append(data);
    std::size_t start = 0;
    for (;;) {
      const auto nl = pending_.find('\n', start);
      if (nl == std::string::npos) break;
      const std::string_view line(pending_.data() + start, nl - start);
      if (discarding_) {
        discarding_ = false;
      } else if (!line.empty() && line.find_first_not_of(" \t\r") != std::string_view::npos) {
        server_->handle(id_, line);
      }
      start = nl + 1;
    }
    pending_.erase(0, start);
    if (pending_.size() >= kMaxMessageBytes) {
      // Oversize line: answer once, then drop bytes up to the next newline.
      if (!discarding_) server_->handle(id_, std::string_view(pending_.data(), kMaxMessageBytes));
      discarding_ = true;
      pending_.clear();
    }
  }

  void write() {
    asio::async_write(socket_, asio::buffer(queue_.front()),
                      [self = shared_from_this()](beast::error_code ec, std::size_t) {
                        if (ec) {
                          self->close();
                          return;
                        }
                        self->queue_.pop_front();
                        if (!self->queue_.empty()) self->write();
                      });
  }

  tcp::socket socket_;
  std::shared_ptr<Server::Impl> server_;
  ConnId id_ = 0;
  std::array<char, 8192> chunk_{};
  std::string pending_;
  bool discarding_ = false;
  std::deque<std::string> queue_;
};

class WsConnection : public Connection, public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, std::shared_ptr<Server::Impl> server)
      : ws_(std::move(socket)), server_(std::move(server)) {}

  void start(http::request<http::string_body> req) {
    req_ = std::move(req);
    ws_.read_message_max(4 * kMaxMessageBytes);
    ws_.text(true);
    ws_.async_accept(req_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->server_->attach(self);
      self->read();
    });
  }

  void send(std::string line) override {
    queue_.push_back(std::move(line));
    if (queue_.size() == 1) write();
  }

  void close() override {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_->detach(self->id_);
        return;
      }
      const std::string msg = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_->handle(self->id_, msg);
      self->read();
    });
  }

  void write() {
    ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->close();
        return;
      }
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  websocket::stream<tcp::socket> ws_;
  http::request<http::string_body> req_;
  std::shared_ptr<Server::Impl> server_;
  ConnId id_ = 0;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

// Reads one HTTP request on the WebSocket port and either upgrades it or
// answers it and closes.
class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, std::shared_ptr<Server::Impl> server)
      : socket_(std::move(socket)), server_(std::move(server)) {}

  void start() {
    http::async_read(socket_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->dispatch();
    });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      std::make_shared<WsConnection>(std::move(socket_), server_)->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    res->set(http::field::access_control_allow_origin, "*");
    const std::string target(req_.target());
    if (req_.method() != http::verb::get) {
      res->result(http::status::method_not_allowed);
    } else if (target == "/state") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->body() = canonical_state(server_->core.state());
    } else if (target == "/derived") {
      res->result(http::status::ok);
      res->set(http::field::content_type, "application/json");
      res->body() = canonical_dump(derived_view(server_->core.state(), server_->config.engine, wall_clock_ms()));
    } else if (auto file = static_file(target)) {
      res->result(http::status::ok);
      res->set(http::field::content_type, std::string(mime_type(*file)));
      std::ifstream in(*file, std::ios::binary);
      std::ostringstream body;
      body << in.rdbuf();
      res->body() = body.str();
    } else {
      res->result(http::status::not_found);
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(socket_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ignored;
      self->socket_.shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  std::optional<std::filesystem::path> static_file(std::string target) const {
    if (!server_->config.static_dir) return std::nullopt;
    if (auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target == "/") target = "/index.html";
    if (target.find("..") != std::string::npos) return std::nullopt;
    const auto path = *server_->config.static_dir / target.substr(1);
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
    return path;
  }

  tcp::socket socket_;
  std::shared_ptr<Server::Impl> server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Server::Impl::accept_tcp() {
  tcp_acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (self->stopped) return;
    if (!ec) std::make_shared<TcpConnection>(std::move(socket), self)->start();
    self->accept_tcp();
  });
}

void Server::Impl::accept_ws() {
  ws_acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (self->stopped) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), self)->start();
    self->accept_ws();
  });
}

Server::Server(asio::io_context& io, ServerConfig config, SessionState initial)
    : impl_(std::make_shared<Impl>(io, std::move(config), std::move(initial))) {
  impl_->start();
}

Server::~Server() = default;

std::uint16_t Server::tcp_port() const { return impl_->tcp_port; }

std::uint16_t Server::ws_port() const { return impl_->ws_port; }

void Server::stop() {
  asio::post(impl_->io, [impl = impl_] { impl->shutdown(); });
}

const SessionState& Server::state() const { return impl_->core.state(); }

}  // namespace docubits::net
