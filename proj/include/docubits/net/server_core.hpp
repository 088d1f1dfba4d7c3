#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docubits/net/protocol.hpp"
#include "docubits/session.hpp"

namespace docubits::net {

using ConnId = std::uint64_t;

struct Outbound {
  ConnId to = 0;
  std::string line;  // encoded message, no trailing newline
};

// Transport-independent authoritative server. Every call must come from one
// thread (or one simulated timeline); the caller owns delivery of the
// returned messages and must preserve their order per connection.
class ServerCore {
 public:
  struct Options {
    // Run check_invariants/check_transition after every commit.
    bool validate_each_commit = false;
    std::function<std::int64_t()> clock;
    std::function<void(const CommittedEvent&)> on_commit;
  };

  struct Stats {
    std::uint64_t proposals = 0;
    std::uint64_t commits = 0;
    std::uint64_t rejects = 0;  // rejected proposals only
    std::uint64_t protocol_errors = 0;
  };

  ServerCore(SessionState initial, Options options);

  void connect(ConnId conn);
  void disconnect(ConnId conn);
  std::vector<Outbound> handle(ConnId conn, std::string_view line);

  const SessionState& state() const { return state_; }
  const Stats& stats() const { return stats_; }
  // First invariant violation seen when validate_each_commit is on.
  const std::optional<std::string>& violation() const { return violation_; }

 private:
  struct Conn {
    std::optional<std::string> user;
  };

  std::vector<Outbound> on_hello(ConnId conn, const Json& msg);
  std::vector<Outbound> on_propose(ConnId conn, const Json& msg);
  std::string fresh_user_id();
  bool user_bound(std::string_view user) const;
  std::int64_t next_ts();

  SessionState state_;
  Options options_;
  std::map<ConnId, Conn> conns_;
  std::uint64_t next_user_ = 1;
  std::int64_t last_ts_ = 0;
  Stats stats_;
  std::optional<std::string> violation_;
};

}  // namespace docubits::net
