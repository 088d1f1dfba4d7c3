#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "docubits/bit_state.hpp"
#include "docubits/doc_model.hpp"
#include "docubits/result.hpp"
#include "docubits/spatial.hpp"

namespace docubits {

namespace event {

struct Join {
  std::string name;
  friend bool operator==(const Join&, const Join&) = default;
};
struct Leave {
  friend bool operator==(const Leave&, const Leave&) = default;
};
struct LoadDocument {
  SourceDocument document;
  friend bool operator==(const LoadDocument&, const LoadDocument&) = default;
};
struct FragmentSteps {
  int user_count = 0;
  friend bool operator==(const FragmentSteps&, const FragmentSteps&) = default;
};
struct FragmentHighlight {
  Span span;
  friend bool operator==(const FragmentHighlight&, const FragmentHighlight&) = default;
};
struct Claim {
  std::string bit_id;
  friend bool operator==(const Claim&, const Claim&) = default;
};
struct Place {
  std::string bit_id;
  Vec3 position;
  friend bool operator==(const Place&, const Place&) = default;
};
struct ReturnToStack {
  std::string bit_id;
  friend bool operator==(const ReturnToStack&, const ReturnToStack&) = default;
};
struct SetStatus {
  std::string bit_id;
  Status status = Status::NotAttempted;
  friend bool operator==(const SetStatus&, const SetStatus&) = default;
};
struct MovePose {
  Pose pose;
  friend bool operator==(const MovePose&, const MovePose&) = default;
};
struct ReorderStack {
  std::vector<std::string> bit_ids;
  friend bool operator==(const ReorderStack&, const ReorderStack&) = default;
};

}  // namespace event

using SessionEvent =
    std::variant<event::Join, event::Leave, event::LoadDocument, event::FragmentSteps,
                 event::FragmentHighlight, event::Claim, event::Place, event::ReturnToStack,
                 event::SetStatus, event::MovePose, event::ReorderStack>;

std::string_view event_type(const SessionEvent& e);

struct CommittedEvent {
  std::uint64_t seq = 0;
  std::string actor;
  std::int64_t ts = 0;  // server-assigned, milliseconds
  SessionEvent event;

  friend bool operator==(const CommittedEvent&, const CommittedEvent&) = default;
};

struct UserRecord {
  std::string name;
  UserColor color;
  Pose pose;
  std::vector<std::string> stack;  // bit ids, index == stack_position
  bool present = true;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct SessionState {
  std::string session_id = "main";
  std::optional<SourceDocument> document;
  std::map<std::string, UserRecord> users;
  std::vector<std::string> join_order;  // every user ever joined, first join order
  std::map<std::string, DocuBit> bits;
  std::uint64_t last_seq = 0;
  std::uint64_t next_bit = 1;
  std::int64_t started_at = 0;  // ts of seq 1

  friend bool operator==(const SessionState&, const SessionState&) = default;
};

SessionState empty_state(std::string session_id = "main");

/// Validates and commits one event. Pure: on rejection the input state is
/// untouched and the reason is returned; on success the new state has
/// last_seq == ev.seq. Requires ev.seq == state.last_seq + 1 (else BadSpan).
Result<SessionState> apply(const SessionState& state, const CommittedEvent& ev);

// In-place variant used on hot paths; leaves `state` unchanged on rejection.
std::optional<Reason> apply_in_place(SessionState& state, const CommittedEvent& ev);

class CorruptLog : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Folds apply over a committed log starting at `base` (normally empty).
// Seq gaps and rejections throw CorruptLog.
SessionState replay(const std::vector<CommittedEvent>& events, SessionState base = empty_state());

}  // namespace docubits
