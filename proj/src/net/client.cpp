#include "docubits/net/client.hpp"

#include <chrono>
#include <memory>
#include <random>

#include <boost/asio.hpp>

#include "docubits/codec.hpp"
#include "docubits/net/mirror.hpp"

namespace docubits::net {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

class ScriptedClient {
 public:
  ScriptedClient(asio::io_context& io, const ClientOptions& opts)
      : io_(io), opts_(opts), socket_(io), deadline_(io), mirror_(/*validate=*/true), rng_(opts.seed) {}

  ClientOutcome run() {
    try {
      tcp::resolver resolver(io_);
      asio::connect(socket_, resolver.resolve(opts_.host, std::to_string(opts_.port)));
    } catch (const std::exception& e) {
      return fail(2, std::string("connect failed: ") + e.what());
    }
    deadline_.expires_after(std::chrono::milliseconds(opts_.timeout_ms));
    deadline_.async_wait([this](boost::system::error_code ec) {
      if (!ec) finish(2, "timed out waiting for outcomes");
    });
    send(make_hello(opts_.name));
    read();
    io_.run();
    return outcome_;
  }

 private:
  ClientOutcome fail(int code, std::string why) {
    ClientOutcome o;
    o.exit_code = code;
    o.error = std::move(why);
    return o;
  }

  void send(const Json& msg) {
    auto line = std::make_shared<std::string>(encode(msg) + "\n");
    asio::async_write(socket_, asio::buffer(*line), [this, line](boost::system::error_code ec, std::size_t) {
      if (ec) finish(2, "write failed: " + ec.message());
    });
  }

  void read() {
    asio::async_read_until(socket_, asio::dynamic_buffer(buffer_), '\n',
                           [this](boost::system::error_code ec, std::size_t n) {
                             if (done_) return;
                             if (ec) {
                               finish(2, "connection lost: " + ec.message());
                               return;
                             }
                             std::string line = buffer_.substr(0, n - 1);
                             buffer_.erase(0, n);
                             on_line(line);
                             if (!done_) read();
                           });
  }

  void on_line(std::string_view line) {
    auto msg = decode(line);
    if (!msg) {
      finish(2, "undecodable server message");
      return;
    }
    const bool first_welcome = msg->value("t", std::string()) == "welcome" && !mirror_.welcomed();
    mirror_.on_message(*msg);
    if (mirror_.fault()) {
      finish(3, *mirror_.fault());
      return;
    }
    if (first_welcome) start_script();
    maybe_done();
  }

  void start_script() {
    std::uniform_real_distribution<double> jitter(0.0, opts_.jitter_ms);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < opts_.script.size(); ++i) {
      const double extra = opts_.jitter_ms > 0 ? jitter(rng_) : 0.0;
      auto timer = std::make_shared<asio::steady_timer>(io_);
      timer->expires_at(start + std::chrono::microseconds(
                                    static_cast<std::int64_t>((opts_.script[i].at_ms + extra) * 1000)));
      timer->async_wait([this, timer, i](boost::system::error_code ec) {
        if (ec || done_) return;
        const std::int64_t pid = next_pid_++;
        mirror_.note_proposed(pid);
        send(make_propose(pid, opts_.script[i].event));
        ++sent_;
      });
    }
    maybe_done();
  }

  void maybe_done() {
    if (mirror_.welcomed() && sent_ == opts_.script.size() && mirror_.pending().empty()) finish(0, {});
  }

  void finish(int code, std::string why) {
    if (done_) return;
    done_ = true;
    outcome_.exit_code = code;
    if (!why.empty()) outcome_.error = std::move(why);
    outcome_.user = mirror_.user().value_or("");
    outcome_.seq = mirror_.state().last_seq;
    outcome_.hash = snapshot_hash(mirror_.state());
    outcome_.commits = mirror_.own_commits();
    outcome_.rejects = mirror_.own_rejects();
    outcome_.reject_reasons = mirror_.reject_reasons();
    boost::system::error_code ec;
    deadline_.cancel();
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
    io_.stop();
  }

  asio::io_context& io_;
  const ClientOptions& opts_;
  tcp::socket socket_;
  asio::steady_timer deadline_;
  Mirror mirror_;
  std::mt19937_64 rng_;
  std::string buffer_;
  std::int64_t next_pid_ = 1;
  std::size_t sent_ = 0;
  bool done_ = false;
  ClientOutcome outcome_;
};

}  // namespace

ClientOutcome run_client(const ClientOptions& options) {
  asio::io_context io;
  ScriptedClient client(io, options);
  return client.run();
}

}  // namespace docubits::net
