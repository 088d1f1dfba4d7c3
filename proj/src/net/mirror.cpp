#include "docubits/net/mirror.hpp"

#include "docubits/validate.hpp"

namespace docubits::net {

void Mirror::on_message(const Json& msg) {
  const auto t = msg.value("t", std::string());
  try {
    if (t == "welcome") {
      on_welcome(msg);
    } else if (t == "commit") {
      std::optional<std::int64_t> pid;
      if (msg.contains("pid") && msg["pid"].is_number_integer()) pid = msg["pid"].get<std::int64_t>();
      on_commit(committed_from_json(msg), pid);
    } else if (t == "reject") {
      std::optional<std::int64_t> pid;
      if (msg.contains("pid") && msg["pid"].is_number_integer()) pid = msg["pid"].get<std::int64_t>();
      on_reject(pid, msg.value("reason", std::string()));
    }
  } catch (const std::exception& e) {
    if (!fault_) fault_ = std::string("undecodable ") + t + ": " + e.what();
  }
}

void Mirror::on_welcome(const Json& msg) {
  user_ = msg.at("user").get<std::string>();
  const auto seq = msg.at("seq").get<std::uint64_t>();
  // A late welcome older than what we already applied carries nothing new.
  if (!welcomed_ || seq > state_.last_seq) {
    state_ = state_from_json(msg.at("snapshot"));
    if (state_.last_seq != seq && !fault_) fault_ = "welcome seq disagrees with its snapshot";
  }
  welcomed_ = true;
  drain();
}

void Mirror::on_commit(const CommittedEvent& ev, std::optional<std::int64_t> pid) {
  if (ev.seq <= state_.last_seq) return;
  buffer_.try_emplace(ev.seq, ev, pid);
  drain();
}

void Mirror::on_reject(std::optional<std::int64_t> pid, std::string reason) {
  ++reject_reasons_[reason];
  if (!pid) return;
  ++own_rejects_;
  settle(*pid);
}

void Mirror::settle(std::int64_t pid) {
  if (pending_.erase(pid) == 0 || !settled_.insert(pid).second) ++duplicate_outcomes_;
}

void Mirror::drain() {
  if (!welcomed_) return;
  while (!buffer_.empty()) {
    auto it = buffer_.begin();
    if (it->first <= state_.last_seq) {
      buffer_.erase(it);
      continue;
    }
    if (it->first != state_.last_seq + 1) break;
    auto [ev, pid] = std::move(it->second);
    buffer_.erase(it);

    std::optional<SessionState> before;
    if (validate_) before = state_;
    if (auto reason = apply_in_place(state_, ev)) {
      if (!fault_) {
        fault_ = "commit " + std::to_string(ev.seq) + " rejected locally: " + std::string(to_string(*reason));
      }
      return;
    }
    if (before && !fault_) {
      if (auto v = check_invariants(state_)) fault_ = *v;
      else if (auto tv = check_transition(*before, state_)) fault_ = *tv;
    }
    if (pid && user_ && ev.actor == *user_) {
      ++own_commits_;
      settle(*pid);
    }
  }
}

}  // namespace docubits::net
