#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docubits/codec.hpp"
#include "docubits/session.hpp"

namespace docubits {

struct UserMetrics {
  int completed_solo = 0;
  // Completed after at least one ownership takeover; credited to the
  // owner at completion time. Joint completion is not representable with
  // single-owner bits.
  int completed_collaborative = 0;
  int total_completed = 0;

  friend bool operator==(const UserMetrics&, const UserMetrics&) = default;
};

struct BitMetrics {
  int owners = 0;  // owner_history length
  std::optional<std::int64_t> time_to_complete_ms;  // creation commit to completion commit

  friend bool operator==(const BitMetrics&, const BitMetrics&) = default;
};

struct MetricsReport {
  std::map<std::string, UserMetrics> per_user;
  int distribution_gap = 0;
  std::optional<std::int64_t> session_duration_ms;
  std::map<std::string, BitMetrics> per_bit;
  std::map<std::string, std::string> names;  // display name per user id

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Replays the log; throws CorruptLog on gaps or rejected events.
MetricsReport compute_metrics(const std::vector<CommittedEvent>& log);

Json to_json(const MetricsReport& r);
// One row per user then a summary row.
std::string to_csv(const MetricsReport& r);

}  // namespace docubits
