#include "docubits/net/server_core.hpp"

#include <algorithm>

#include "docubits/validate.hpp"

namespace docubits::net {

ServerCore::ServerCore(SessionState initial, Options options)
    : state_(std::move(initial)), options_(std::move(options)) {}

void ServerCore::connect(ConnId conn) { conns_[conn]; }

void ServerCore::disconnect(ConnId conn) { conns_.erase(conn); }

std::int64_t ServerCore::next_ts() {
  const std::int64_t now = options_.clock ? options_.clock() : 0;
  last_ts_ = std::max(last_ts_, now);
  return last_ts_;
}

bool ServerCore::user_bound(std::string_view user) const {
  return std::any_of(conns_.begin(), conns_.end(),
                     [&](const auto& c) { return c.second.user && *c.second.user == user; });
}

std::string ServerCore::fresh_user_id() {
  for (;;) {
    std::string id = "u" + std::to_string(next_user_++);
    if (!state_.users.contains(id) && !user_bound(id)) return id;
  }
}

std::vector<Outbound> ServerCore::handle(ConnId conn, std::string_view line) {
  auto it = conns_.find(conn);
  if (it == conns_.end()) return {};

  auto msg = decode(line);
  if (!msg) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(std::nullopt, kReasonMalformed))}};
  }
  const Json* t = msg->contains("t") ? &(*msg)["t"] : nullptr;
  if (t == nullptr || !t->is_string()) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(std::nullopt, kReasonMalformed))}};
  }
  const std::string type = t->get<std::string>();
  if (type == "hello") return on_hello(conn, *msg);
  if (type == "propose") return on_propose(conn, *msg);
  if (type == "resync") {
    if (!it->second.user) return {{conn, encode(make_reject(std::nullopt, kReasonNotHello))}};
    return {{conn, encode(make_welcome(*it->second.user, state_))}};
  }
  if (type == "ping") return {{conn, encode(make_pong())}};
  if (type == "pong") return {};

  ++stats_.protocol_errors;
  std::optional<std::int64_t> pid;
  if (auto p = msg->find("pid"); p != msg->end() && p->is_number_integer()) pid = p->get<std::int64_t>();
  return {{conn, encode(make_reject(pid, kReasonUnknownType))}};
}

std::vector<Outbound> ServerCore::on_hello(ConnId conn, const Json& msg) {
  auto& c = conns_.at(conn);
  auto v = msg.find("v");
  auto name = msg.find("name");
  if (v == msg.end() || !v->is_number_integer() || v->get<int>() != kProtocolVersion ||
      name == msg.end() || !name->is_string()) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(std::nullopt, kReasonMalformed))}};
  }
  if (!c.user) {
    auto resume = msg.find("user");
    if (resume != msg.end() && resume->is_string() && !resume->get<std::string>().empty() &&
        !user_bound(resume->get<std::string>())) {
      c.user = resume->get<std::string>();
    } else {
      c.user = fresh_user_id();
    }
  }
  return {{conn, encode(make_welcome(*c.user, state_))}};
}

std::vector<Outbound> ServerCore::on_propose(ConnId conn, const Json& msg) {
  const auto& c = conns_.at(conn);
  auto p = msg.find("pid");
  if (p == msg.end() || !p->is_number_integer()) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(std::nullopt, kReasonMalformed))}};
  }
  const std::int64_t pid = p->get<std::int64_t>();
  if (!c.user) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(pid, kReasonNotHello))}};
  }
  auto e = msg.find("event");
  if (e == msg.end()) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(pid, kReasonMalformed))}};
  }
  SessionEvent event;
  try {
    event = event_from_json(*e);
  } catch (const DecodeError&) {
    ++stats_.protocol_errors;
    return {{conn, encode(make_reject(pid, kReasonMalformed))}};
  }

  ++stats_.proposals;
  CommittedEvent committed{state_.last_seq + 1, *c.user, next_ts(), std::move(event)};

  std::optional<SessionState> before;
  if (options_.validate_each_commit) before = state_;
  if (auto reason = apply_in_place(state_, committed)) {
    ++stats_.rejects;
    return {{conn, encode(make_reject(pid, to_string(*reason)))}};
  }
  ++stats_.commits;
  if (before && !violation_) {
    if (auto v = check_invariants(state_)) {
      violation_ = "after seq " + std::to_string(committed.seq) + ": " + *v;
    } else if (auto t = check_transition(*before, state_)) {
      violation_ = "after seq " + std::to_string(committed.seq) + ": " + *t;
    }
  }
  if (options_.on_commit) options_.on_commit(committed);

  const std::string line = encode(make_commit(committed, pid));
  std::vector<Outbound> out;
  for (const auto& [id, other] : conns_) {
    if (other.user) out.push_back({id, line});
  }
  return out;
}

}  // namespace docubits::net
