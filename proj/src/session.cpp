#include "docubits/session.hpp"

#include <algorithm>

namespace docubits {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void renumber(SessionState& s, const std::string& user) {
  auto& stack = s.users.at(user).stack;
  for (std::size_t i = 0; i < stack.size(); ++i) {
    s.bits.at(stack[i]).placement = InStack{static_cast<int>(i)};
  }
}

void remove_from_stack(SessionState& s, const DocuBit& bit) {
  if (!std::holds_alternative<InStack>(bit.placement)) return;
  auto& stack = s.users.at(bit.owner).stack;
  std::erase(stack, bit.bit_id);
  renumber(s, bit.owner);
}

std::string mint_bit_id(SessionState& s) { return "b" + std::to_string(s.next_bit++); }

// Each handler validates fully before mutating anything.
class Applier {
 public:
  Applier(SessionState& s, const CommittedEvent& ev) : s_(s), ev_(ev) {}

  std::optional<Reason> operator()(const event::Join& e) {
    if (ev_.actor.empty()) return Reason::Malformed;
    auto it = s_.users.find(ev_.actor);
    if (it != s_.users.end()) {
      if (it->second.present) return Reason::NoChange;
      it->second.present = true;
      it->second.name = e.name;
      return std::nullopt;
    }
    UserRecord u;
    u.name = e.name;
    u.color = color_for_join_index(s_.join_order.size());
    s_.users.emplace(ev_.actor, std::move(u));
    s_.join_order.push_back(ev_.actor);
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::Leave&) {
    s_.users.at(ev_.actor).present = false;
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::LoadDocument& e) {
    if (!document_well_formed(e.document)) return Reason::Malformed;
    if (!s_.bits.empty()) return Reason::AlreadyFragmented;
    s_.document = e.document;
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::FragmentSteps& e) {
    if (!s_.document) return Reason::NoDocument;
    if (!s_.bits.empty()) return Reason::AlreadyFragmented;
    auto steps = parse_steps(*s_.document);
    if (!steps) return steps.error();

    std::vector<std::string> present;
    for (const auto& id : s_.join_order) {
      if (s_.users.at(id).present) present.push_back(id);
    }
    if (e.user_count < 1 || static_cast<std::size_t>(e.user_count) > present.size()) {
      return Reason::Malformed;
    }
    present.resize(static_cast<std::size_t>(e.user_count));
    auto split = assign_split(*steps, s_.document->cohesion, present);
    if (!split) return split.error();

    std::map<int, std::string> owner_of;
    for (const auto& [user, ordinals] : *split) {
      for (int o : ordinals) owner_of[o] = user;
    }
    for (const StepSegment& seg : *steps) {
      DocuBit bit;
      bit.bit_id = mint_bit_id(s_);
      bit.doc_id = s_.document->doc_id;
      bit.span = seg.span;
      bit.text = seg.text;
      bit.ordinal = seg.ordinal;
      bit.owner = owner_of.at(seg.ordinal);
      bit.owner_history.push_back({bit.owner, ev_.seq});
      bit.status_changed_at = now();
      bit.created_by = ev_.actor;
      auto& stack = s_.users.at(bit.owner).stack;
      bit.placement = InStack{static_cast<int>(stack.size())};
      stack.push_back(bit.bit_id);
      s_.bits.emplace(bit.bit_id, std::move(bit));
    }
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::FragmentHighlight& e) {
    if (!s_.document) return Reason::NoDocument;
    std::vector<Span> existing;
    existing.reserve(s_.bits.size());
    for (const auto& [id, bit] : s_.bits) existing.push_back(bit.span);
    auto seg = segment_by_highlight(*s_.document, e.span, existing, ev_.actor);
    if (!seg) return seg.error();

    DocuBit bit;
    bit.bit_id = mint_bit_id(s_);
    bit.doc_id = s_.document->doc_id;
    bit.span = seg->span;
    bit.text = seg->text;
    bit.owner = ev_.actor;
    bit.owner_history.push_back({bit.owner, ev_.seq});
    bit.status_changed_at = now();
    bit.created_by = ev_.actor;
    auto& stack = s_.users.at(bit.owner).stack;
    bit.placement = InStack{static_cast<int>(stack.size())};
    stack.push_back(bit.bit_id);
    s_.bits.emplace(bit.bit_id, std::move(bit));
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::Claim& e) {
    auto it = s_.bits.find(e.bit_id);
    if (it == s_.bits.end()) return Reason::UnknownBit;
    const int tail = static_cast<int>(s_.users.at(ev_.actor).stack.size());
    auto next = claim(it->second, ev_.actor, ev_.seq, tail);
    if (!next) return next.error();
    remove_from_stack(s_, it->second);
    it->second = std::move(next).value();
    s_.users.at(ev_.actor).stack.push_back(e.bit_id);
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::Place& e) {
    auto it = s_.bits.find(e.bit_id);
    if (it == s_.bits.end()) return Reason::UnknownBit;
    if (!e.position.finite()) return Reason::Malformed;
    DocuBit& bit = it->second;
    if (bit.owner != ev_.actor) return Reason::NotOwner;
    if (bit.status == Status::Completed) return Reason::AlreadyCompleted;
    if (auto* p = std::get_if<Placed>(&bit.placement); p && p->position == e.position) {
      return Reason::NoChange;
    }
    remove_from_stack(s_, bit);
    bit.placement = Placed{e.position};
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::ReturnToStack& e) {
    auto it = s_.bits.find(e.bit_id);
    if (it == s_.bits.end()) return Reason::UnknownBit;
    DocuBit& bit = it->second;
    if (bit.owner != ev_.actor) return Reason::NotOwner;
    if (bit.status == Status::Completed) return Reason::AlreadyCompleted;
    if (std::holds_alternative<InStack>(bit.placement)) return Reason::NoChange;
    auto& stack = s_.users.at(bit.owner).stack;
    bit.placement = InStack{static_cast<int>(stack.size())};
    stack.push_back(bit.bit_id);
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::SetStatus& e) {
    auto it = s_.bits.find(e.bit_id);
    if (it == s_.bits.end()) return Reason::UnknownBit;
    auto next = set_status(it->second, e.status, ev_.actor, now());
    if (!next) return next.error();
    it->second = std::move(next).value();
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::MovePose& e) {
    auto& user = s_.users.at(ev_.actor);
    if (user.pose == e.pose) return Reason::NoChange;
    user.pose = e.pose;
    return std::nullopt;
  }

  std::optional<Reason> operator()(const event::ReorderStack& e) {
    auto& stack = s_.users.at(ev_.actor).stack;
    auto want = e.bit_ids;
    auto have = stack;
    std::sort(want.begin(), want.end());
    std::sort(have.begin(), have.end());
    if (want != have) return Reason::Malformed;
    if (e.bit_ids == stack) return Reason::NoChange;
    stack = e.bit_ids;
    renumber(s_, ev_.actor);
    return std::nullopt;
  }

 private:
  std::int64_t now() const { return ev_.ts - s_.started_at; }

  SessionState& s_;
  const CommittedEvent& ev_;
};

bool needs_present_actor(const SessionEvent& e) { return !std::holds_alternative<event::Join>(e); }

}  // namespace

std::string_view event_type(const SessionEvent& e) {
  return std::visit(
      Overloaded{
          [](const event::Join&) { return std::string_view("Join"); },
          [](const event::Leave&) { return std::string_view("Leave"); },
          [](const event::LoadDocument&) { return std::string_view("LoadDocument"); },
          [](const event::FragmentSteps&) { return std::string_view("FragmentSteps"); },
          [](const event::FragmentHighlight&) { return std::string_view("FragmentHighlight"); },
          [](const event::Claim&) { return std::string_view("Claim"); },
          [](const event::Place&) { return std::string_view("Place"); },
          [](const event::ReturnToStack&) { return std::string_view("ReturnToStack"); },
          [](const event::SetStatus&) { return std::string_view("SetStatus"); },
          [](const event::MovePose&) { return std::string_view("MovePose"); },
          [](const event::ReorderStack&) { return std::string_view("ReorderStack"); },
      },
      e);
}

SessionState empty_state(std::string session_id) {
  SessionState s;
  s.session_id = std::move(session_id);
  return s;
}

std::optional<Reason> apply_in_place(SessionState& state, const CommittedEvent& ev) {
  if (ev.seq != state.last_seq + 1) return Reason::BadSpan;
  if (needs_present_actor(ev.event)) {
    auto it = state.users.find(ev.actor);
    if (it == state.users.end() || !it->second.present) return Reason::UnknownUser;
  }
  const std::int64_t prev_started = state.started_at;
  if (ev.seq == 1) state.started_at = ev.ts;
  if (auto reason = std::visit(Applier(state, ev), ev.event)) {
    state.started_at = prev_started;
    return reason;
  }
  state.last_seq = ev.seq;
  return std::nullopt;
}

Result<SessionState> apply(const SessionState& state, const CommittedEvent& ev) {
  SessionState next = state;
  if (auto reason = apply_in_place(next, ev)) return *reason;
  return next;
}

SessionState replay(const std::vector<CommittedEvent>& events, SessionState base) {
  for (const auto& ev : events) {
    if (ev.seq != base.last_seq + 1) {
      throw CorruptLog("seq " + std::to_string(ev.seq) + " does not follow " +
                       std::to_string(base.last_seq));
    }
    if (auto reason = apply_in_place(base, ev)) {
      throw CorruptLog("seq " + std::to_string(ev.seq) + " rejected on replay: " +
                       std::string(to_string(*reason)));
    }
  }
  return base;
}

}  // namespace docubits
