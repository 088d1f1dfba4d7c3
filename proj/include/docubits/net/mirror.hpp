#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "docubits/net/protocol.hpp"
#include "docubits/session.hpp"

namespace docubits::net {

// Client-side replica. Applies welcome snapshots and commits strictly in
// seq order, buffering anything that arrives early. Tracks the fate of the
// owner's own proposals by pid.
class Mirror {
 public:
  explicit Mirror(bool validate = false) : validate_(validate) {}

  // Dispatches one decoded server message. Unknown variants are ignored.
  void on_message(const Json& msg);

  void on_welcome(const Json& msg);
  void on_commit(const CommittedEvent& ev, std::optional<std::int64_t> pid);
  void on_reject(std::optional<std::int64_t> pid, std::string reason);

  void note_proposed(std::int64_t pid) { pending_.insert(pid); }

  const SessionState& state() const { return state_; }
  const std::optional<std::string>& user() const { return user_; }
  bool welcomed() const { return welcomed_; }
  std::size_t buffered() const { return buffer_.size(); }
  const std::set<std::int64_t>& pending() const { return pending_; }

  // Set when a commit fails to apply or a checked invariant breaks.
  const std::optional<std::string>& fault() const { return fault_; }

  std::uint64_t own_commits() const { return own_commits_; }
  std::uint64_t own_rejects() const { return own_rejects_; }
  // Outcomes received for pids never proposed, or received twice.
  std::uint64_t duplicate_outcomes() const { return duplicate_outcomes_; }
  const std::map<std::string, std::uint64_t>& reject_reasons() const { return reject_reasons_; }

 private:
  void drain();
  void settle(std::int64_t pid);

  bool validate_;
  SessionState state_ = empty_state();
  std::optional<std::string> user_;
  bool welcomed_ = false;
  std::map<std::uint64_t, std::pair<CommittedEvent, std::optional<std::int64_t>>> buffer_;
  std::set<std::int64_t> pending_;
  std::set<std::int64_t> settled_;
  std::optional<std::string> fault_;
  std::uint64_t own_commits_ = 0;
  std::uint64_t own_rejects_ = 0;
  std::uint64_t duplicate_outcomes_ = 0;
  std::map<std::string, std::uint64_t> reject_reasons_;
};

}  // namespace docubits::net
