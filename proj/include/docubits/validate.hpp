#pragma once

#include <optional>
#include <string>

#include "docubits/session.hpp"

namespace docubits {

// Structural invariants of a single state: single owner per bit matching the
// tail of owner_history, contiguous stacks, no placed bit in a stack, owners
// known to the session, bit text equal to the document slice, and
// non-overlapping spans. Returns a description of the first violation.
std::optional<std::string> check_invariants(const SessionState& state);

// Invariants spanning one commit: owner_history only grows, Completed is
// absorbing, and a completed bit's owner, span, text and placement (kind and
// position) never change.
std::optional<std::string> check_transition(const SessionState& before, const SessionState& after);

}  // namespace docubits
