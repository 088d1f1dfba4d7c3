#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docubits/codec.hpp"
#include "docubits/net/script.hpp"
#include "docubits/session.hpp"

namespace docubits::net {

struct SimConfig {
  int clients = 2;
  // Each message is delayed by latency +- uniform jitter, floored at zero.
  // Delays are drawn per message, so deliveries on one link may reorder.
  double latency_ms = 50.0;
  double jitter_ms = 0.0;
  std::uint64_t seed = 42;

  // Scripted mode: client i plays scripts[i] (if present), timed from its
  // first welcome.
  std::vector<ActionScript> scripts;

  // Random mode (used when scripts is empty): this many proposals in total,
  // each chosen from the proposing client's current view.
  int random_proposals = 0;
  // Per-tick chance that a random-mode client drops its connection and
  // later reconnects with hello + resync.
  double drop_probability = 0.0;
  std::optional<SourceDocument> document;  // random mode; defaults to a built-in 8-step lab

  bool validate = false;
  SessionState initial = empty_state();
};

struct SimClientReport {
  std::string user;
  std::string hash;
  std::uint64_t seq = 0;
  std::uint64_t proposals = 0;
  std::uint64_t commits = 0;  // own proposals committed
  std::uint64_t rejects = 0;  // own proposals rejected
  int reconnects = 0;
  std::map<std::string, std::uint64_t> reject_reasons;
  std::optional<std::string> fault;
};

struct ConvergenceReport {
  std::vector<SimClientReport> clients;
  std::string server_hash;
  std::uint64_t server_seq = 0;
  std::uint64_t server_proposals = 0;
  std::uint64_t server_commits = 0;
  std::uint64_t server_rejects = 0;
  std::optional<std::string> server_violation;
  bool convergent = false;
  // Every proposal earned exactly one outcome and seqs are dense.
  bool exactly_once = false;
  std::int64_t quiesced_at_ms = 0;

  // Not part of the JSON report.
  std::vector<CommittedEvent> log;
  SessionState final_state;
};

ConvergenceReport simulate(const SimConfig& config);

Json to_json(const ConvergenceReport& r);

SourceDocument default_lab_document();

}  // namespace docubits::net
