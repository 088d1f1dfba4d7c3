#include "docubits/result.hpp"

#include <array>
#include <utility>

namespace docubits {
namespace {

constexpr std::array<std::pair<Reason, std::string_view>, 15> kNames{{
    {Reason::NotOwner, "NotOwner"},
    {Reason::AlreadyCompleted, "AlreadyCompleted"},
    {Reason::NoDocument, "NoDocument"},
    {Reason::AlreadyFragmented, "AlreadyFragmented"},
    {Reason::UnknownBit, "UnknownBit"},
    {Reason::OverlapsExisting, "OverlapsExisting"},
    {Reason::EmptyAfterTrim, "EmptyAfterTrim"},
    {Reason::NoSteps, "NoSteps"},
    {Reason::MalformedNumbering, "MalformedNumbering"},
    {Reason::MoreUsersThanGroups, "MoreUsersThanGroups"},
    {Reason::SelfClaim, "SelfClaim"},
    {Reason::NoChange, "NoChange"},
    {Reason::BadSpan, "BadSpan"},
    {Reason::UnknownUser, "UnknownUser"},
    {Reason::Malformed, "Malformed"},
}};

}  // namespace

std::string_view to_string(Reason r) {
  for (const auto& [reason, name] : kNames) {
    if (reason == r) return name;
  }
  return "Unknown";
}

std::optional<Reason> reason_from_string(std::string_view s) {
  for (const auto& [reason, name] : kNames) {
    if (name == s) return reason;
  }
  return std::nullopt;
}

}  // namespace docubits
