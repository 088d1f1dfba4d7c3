#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "docubits/codec.hpp"

// Newline-delimited (TCP) or one-per-frame (WebSocket) JSON messages. The
// "t" field selects the variant:
//   client -> server: hello{v,name[,user]}  propose{pid,event}  resync{}
//   server -> client: welcome{v,user,seq,snapshot}  commit{seq,actor,ts,pid,event}
//                     reject{pid,reason}  pong{}
//   both ways:        ping{}
namespace docubits::net {

inline constexpr std::size_t kMaxMessageBytes = 1u << 20;
inline constexpr int kProtocolVersion = 1;

// Reject reasons that are not session rule violations.
inline constexpr std::string_view kReasonMalformed = "Malformed";
inline constexpr std::string_view kReasonUnknownType = "UnknownType";
inline constexpr std::string_view kReasonNotHello = "UnknownUser";

std::string encode(const Json& msg);

// nullopt for oversize input, invalid JSON or a non-object payload.
std::optional<Json> decode(std::string_view line);

Json make_hello(std::string_view name, std::optional<std::string> resume_user = std::nullopt);
Json make_welcome(std::string_view user, const SessionState& state);
Json make_propose(std::int64_t pid, const SessionEvent& event);
Json make_commit(const CommittedEvent& ev, std::optional<std::int64_t> pid);
Json make_reject(std::optional<std::int64_t> pid, std::string_view reason);
Json make_resync();
Json make_ping();
Json make_pong();

}  // namespace docubits::net
