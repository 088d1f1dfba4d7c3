#include "docubits/validate.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace docubits {

std::optional<std::string> check_invariants(const SessionState& state) {
  std::set<std::string> seen_in_stacks;
  for (const auto& [user, rec] : state.users) {
    if (std::find(state.join_order.begin(), state.join_order.end(), user) == state.join_order.end()) {
      return "user " + user + " missing from join order";
    }
    for (std::size_t i = 0; i < rec.stack.size(); ++i) {
      const auto& id = rec.stack[i];
      auto it = state.bits.find(id);
      if (it == state.bits.end()) return "stack of " + user + " names unknown bit " + id;
      const DocuBit& bit = it->second;
      if (bit.owner != user) return "bit " + id + " sits in a stack not owned by its owner";
      const auto* in = std::get_if<InStack>(&bit.placement);
      if (in == nullptr) return "placed bit " + id + " appears in a stack";
      if (in->stack_position != static_cast<int>(i)) return "stack of " + user + " not contiguous";
      if (!seen_in_stacks.insert(id).second) return "bit " + id + " appears twice in stacks";
    }
  }
  if (state.join_order.size() != state.users.size()) return "join order and users disagree";

  std::vector<Span> spans;
  for (const auto& [id, bit] : state.bits) {
    if (bit.bit_id != id) return "bit key mismatch for " + id;
    if (bit.owner_history.empty() || bit.owner_history.back().user != bit.owner) {
      return "bit " + id + " owner differs from owner_history tail";
    }
    for (const auto& h : bit.owner_history) {
      if (!state.users.contains(h.user)) return "bit " + id + " owned by unknown user " + h.user;
    }
    for (std::size_t i = 1; i < bit.owner_history.size(); ++i) {
      if (bit.owner_history[i].seq <= bit.owner_history[i - 1].seq) {
        return "bit " + id + " owner_history not in commit order";
      }
    }
    if (std::holds_alternative<InStack>(bit.placement) && !seen_in_stacks.contains(id)) {
      return "in-stack bit " + id + " missing from every stack";
    }
    if (!state.document) return "bit " + id + " exists without a document";
    if (bit.span.end > state.document->body.size() ||
        state.document->body.compare(bit.span.start, bit.span.size(), bit.text) != 0) {
      return "bit " + id + " text is not the document slice at its span";
    }
    spans.push_back(bit.span);
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i - 1].overlaps(spans[i])) return "bit spans overlap";
  }
  return std::nullopt;
}

std::optional<std::string> check_transition(const SessionState& before, const SessionState& after) {
  for (const auto& [id, old] : before.bits) {
    auto it = after.bits.find(id);
    if (it == after.bits.end()) return "bit " + id + " disappeared";
    const DocuBit& now = it->second;
    if (now.owner_history.size() < old.owner_history.size() ||
        !std::equal(old.owner_history.begin(), old.owner_history.end(), now.owner_history.begin())) {
      return "owner_history of " + id + " rewritten";
    }
    if (old.status != Status::Completed) continue;
    if (now.status != Status::Completed) return "completed bit " + id + " reopened";
    if (now.owner != old.owner || now.owner_history != old.owner_history) {
      return "completed bit " + id + " changed owner";
    }
    if (now.span != old.span || now.text != old.text) return "completed bit " + id + " changed text";
    if (now.placement.index() != old.placement.index()) return "completed bit " + id + " moved";
    if (const auto* p = std::get_if<Placed>(&old.placement);
        p && std::get<Placed>(now.placement).position != p->position) {
      return "completed bit " + id + " moved";
    }
    if (now.status_changed_at != old.status_changed_at) return "completed bit " + id + " re-stamped";
  }
  return std::nullopt;
}

}  // namespace docubits
