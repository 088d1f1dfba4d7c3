#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "docubits/session.hpp"

namespace docubits {

using Json = nlohmann::json;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sorted keys, no whitespace, doubles as shortest round-trip decimal
// (negative zero prints as 0). Non-finite numbers throw DecodeError.
std::string canonical_dump(const Json& j);

std::string sha256_hex(std::string_view bytes);

Json to_json(const Vec3& v);
Json to_json(const Pose& p);
Json to_json(const SourceDocument& d);
Json to_json(const StepSegment& s);
Json to_json(const HighlightSegment& s);
Json to_json(const DocuBit& b);
Json to_json(const SessionEvent& e);
Json to_json(const CommittedEvent& e);
Json to_json(const SessionState& s);

// All decoders throw DecodeError on missing fields, wrong types, or values
// that break a type invariant (e.g. a non-orthonormal pose).
Vec3 vec3_from_json(const Json& j);
Pose pose_from_json(const Json& j);
SourceDocument document_from_json(const Json& j);
CohesionGroups cohesion_from_json(const Json& j);
SessionEvent event_from_json(const Json& j);
CommittedEvent committed_from_json(const Json& j);
SessionState state_from_json(const Json& j);

std::string canonical_state(const SessionState& s);

/// SHA-256 of the canonical serialization, lowercase hex.
std::string snapshot_hash(const SessionState& s);

}  // namespace docubits
