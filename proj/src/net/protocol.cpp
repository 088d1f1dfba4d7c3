#include "docubits/net/protocol.hpp"

namespace docubits::net {

std::string encode(const Json& msg) { return canonical_dump(msg); }

std::optional<Json> decode(std::string_view line) {
  if (line.size() >= kMaxMessageBytes) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Json j = Json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

Json make_hello(std::string_view name, std::optional<std::string> resume_user) {
  Json j{{"t", "hello"}, {"v", kProtocolVersion}, {"name", name}};
  if (resume_user) j["user"] = *resume_user;
  return j;
}

Json make_welcome(std::string_view user, const SessionState& state) {
  return {{"t", "welcome"},
          {"v", kProtocolVersion},
          {"user", user},
          {"seq", state.last_seq},
          {"snapshot", to_json(state)}};
}

Json make_propose(std::int64_t pid, const SessionEvent& event) {
  return {{"t", "propose"}, {"pid", pid}, {"event", to_json(event)}};
}

Json make_commit(const CommittedEvent& ev, std::optional<std::int64_t> pid) {
  return {{"t", "commit"},
          {"seq", ev.seq},
          {"actor", ev.actor},
          {"ts", ev.ts},
          {"pid", pid ? Json(*pid) : Json(nullptr)},
          {"event", to_json(ev.event)}};
}

Json make_reject(std::optional<std::int64_t> pid, std::string_view reason) {
  return {{"t", "reject"}, {"pid", pid ? Json(*pid) : Json(nullptr)}, {"reason", reason}};
}

Json make_resync() { return {{"t", "resync"}}; }
Json make_ping() { return {{"t", "ping"}}; }
Json make_pong() { return {{"t", "pong"}}; }

}  // namespace docubits::net
