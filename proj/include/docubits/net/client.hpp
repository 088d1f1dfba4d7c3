#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "docubits/net/script.hpp"

namespace docubits::net {

struct ClientOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7400;
  std::string name = "client";
  ActionScript script;
  std::uint64_t seed = 1;
  // Extra uniform delay in [0, jitter_ms] added to each scripted step.
  double jitter_ms = 0.0;
  std::int64_t timeout_ms = 30000;
};

struct ClientOutcome {
  // 0 ok, 2 I/O or protocol failure, 3 local invariant failure.
  int exit_code = 0;
  std::string user;
  std::uint64_t seq = 0;
  std::string hash;
  std::uint64_t commits = 0;
  std::uint64_t rejects = 0;
  std::map<std::string, std::uint64_t> reject_reasons;
  std::optional<std::string> error;
};

// Connects over TCP, says hello, plays the script timed from the welcome,
// and returns once every proposal has been committed or rejected. The
// local mirror checks session invariants after every commit.
ClientOutcome run_client(const ClientOptions& options);

}  // namespace docubits::net
