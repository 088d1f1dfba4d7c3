#include <string>
#include <vector>

#include "doctest.h"
#include "docubits/session.hpp"
#include "docubits/validate.hpp"
#include "oracles.hpp"

using namespace docubits;

namespace {

const SourceDocument kSixSteps{"buffer", "Buffer",
                               "Prepare a buffer.\n"
                               "1. Weigh 2 g of salt\n2. Dissolve in water\n3. Stir\n"
                               "4. Check pH\n5. Adjust pH\n6. Label the bottle\n",
                               std::nullopt};

// Appends events with consecutive seqs and ts = 100 * seq.
struct Builder {
  SessionState state = empty_state();
  std::vector<CommittedEvent> log;

  std::optional<Reason> propose(std::string actor, SessionEvent ev) {
    CommittedEvent c{state.last_seq + 1, std::move(actor), static_cast<std::int64_t>(100 * (state.last_seq + 1)),
                     std::move(ev)};
    auto r = apply(state, c);
    if (!r.ok()) return r.error();
    REQUIRE_FALSE(check_transition(state, *r).has_value());
    state = std::move(r).value();
    REQUIRE_FALSE(check_invariants(state).has_value());
    log.push_back(c);
    return std::nullopt;
  }
  void ok(std::string actor, SessionEvent ev) {
    const auto r = propose(std::move(actor), std::move(ev));
    INFO("rejected: " << (r ? to_string(*r) : "-"));
    REQUIRE_FALSE(r.has_value());
  }
};

Builder two_user_session() {
  Builder b;
  b.ok("u1", event::Join{"Alex"});
  b.ok("u2", event::Join{"Blair"});
  b.ok("u1", event::LoadDocument{kSixSteps});
  b.ok("u1", event::FragmentSteps{2});
  return b;
}

}  // namespace

TEST_CASE("fragment a six-step document for two users") {
  const Builder b = two_user_session();
  const SessionState& s = b.state;
  REQUIRE(s.bits.size() == 6);
  for (const auto& [id, bit] : s.bits) {
    REQUIRE(bit.ordinal.has_value());
    CHECK(bit.owner == (*bit.ordinal <= 3 ? "u1" : "u2"));
    CHECK(bit.placement == Placement{InStack{(*bit.ordinal - 1) % 3}});
    CHECK(bit.status == Status::NotAttempted);
    CHECK(bit.owner_history.size() == 1);
  }
  CHECK(s.users.at("u1").stack == std::vector<std::string>{"b1", "b2", "b3"});
  CHECK(s.users.at("u2").stack == std::vector<std::string>{"b4", "b5", "b6"});
  CHECK(s.bits.at("b4").text == "4. Check pH");
  CHECK(s.users.at("u1").color == UserColor{0, 0});
  CHECK(s.users.at("u2").color == UserColor{1, 0});
  CHECK(s.started_at == 100);
  CHECK(s.last_seq == 4);
}

TEST_CASE("rejections leave the state untouched") {
  Builder b = two_user_session();
  const SessionState before = b.state;
  CHECK(b.propose("u1", event::Claim{"b99"}) == Reason::UnknownBit);
  CHECK(b.state == before);
  CHECK(b.propose("u1", event::Claim{"b1"}) == Reason::SelfClaim);
  CHECK(b.propose("u2", event::SetStatus{"b1", Status::InProgress}) == Reason::NotOwner);
  CHECK(b.propose("ghost", event::Claim{"b1"}) == Reason::UnknownUser);
  CHECK(b.propose("u1", event::FragmentSteps{2}) == Reason::AlreadyFragmented);
  CHECK(b.propose("u1", event::LoadDocument{kSixSteps}) == Reason::AlreadyFragmented);
  CHECK(b.propose("u1", event::Join{"again"}) == Reason::NoChange);
  CHECK(b.state == before);

  SessionState copy = before;
  CommittedEvent wrong_seq{before.last_seq + 2, "u1", 1000, event::Claim{"b4"}};
  CHECK(apply_in_place(copy, wrong_seq) == Reason::BadSpan);
  CHECK(copy == before);
}

TEST_CASE("document and fragmentation preconditions") {
  Builder b;
  b.ok("u1", event::Join{"A"});
  CHECK(b.propose("u1", event::FragmentSteps{1}) == Reason::NoDocument);
  CHECK(b.propose("u1", event::FragmentHighlight{{0, 3}}) == Reason::NoDocument);
  CHECK(b.propose("u1", event::LoadDocument{{"x", "", "", std::nullopt}}) == Reason::Malformed);
  b.ok("u1", event::LoadDocument{{"x", "", "no numbers here", std::nullopt}});
  CHECK(b.propose("u1", event::FragmentSteps{1}) == Reason::NoSteps);
  CHECK(b.propose("u1", event::FragmentSteps{2}) == Reason::NoSteps);
  b.ok("u1", event::FragmentHighlight{{3, 10}});
  CHECK(b.state.bits.at("b1").text == "numbers");
  CHECK(b.propose("u1", event::FragmentHighlight{{5, 12}}) == Reason::OverlapsExisting);
  CHECK(b.propose("u1", event::FragmentSteps{1}) == Reason::AlreadyFragmented);

  Builder c;
  c.ok("u1", event::Join{"A"});
  c.ok("u2", event::Join{"B"});
  c.ok("u3", event::Join{"C"});
  SourceDocument grouped = kSixSteps;
  grouped.cohesion = CohesionGroups{{1, 2, 3, 4}, {5, 6}};
  c.ok("u1", event::LoadDocument{grouped});
  CHECK(c.propose("u1", event::FragmentSteps{4}) == Reason::Malformed);  // only three users present
  CHECK(c.propose("u1", event::FragmentSteps{0}) == Reason::Malformed);
  CHECK(c.propose("u1", event::FragmentSteps{3}) == Reason::MoreUsersThanGroups);
  c.ok("u1", event::FragmentSteps{2});
  CHECK(c.state.users.at("u1").stack.size() == 4);
  CHECK(c.state.users.at("u2").stack.size() == 2);
  CHECK(c.state.users.at("u3").stack.empty());
}

TEST_CASE("claim transfers ownership and renumbers stacks") {
  Builder b = two_user_session();
  b.ok("u2", event::Claim{"b2"});
  CHECK(b.state.users.at("u1").stack == std::vector<std::string>{"b1", "b3"});
  CHECK(b.state.users.at("u2").stack == std::vector<std::string>{"b4", "b5", "b6", "b2"});
  CHECK(b.state.bits.at("b3").placement == Placement{InStack{1}});
  CHECK(b.state.bits.at("b2").placement == Placement{InStack{3}});
  CHECK(b.state.bits.at("b2").owner_history.size() == 2);
}

TEST_CASE("competing claims are resolved by seq order") {
  Builder b;
  for (auto u : {"u1", "u2", "u3"}) b.ok(u, event::Join{u});
  b.ok("u1", event::LoadDocument{kSixSteps});
  b.ok("u1", event::FragmentSteps{1});

  // distinct claimants, incomplete bit: both commit, last one wins
  b.ok("u2", event::Claim{"b1"});
  b.ok("u3", event::Claim{"b1"});
  CHECK(b.state.bits.at("b1").owner == "u3");
  // the same claimant twice: the second is a self-claim
  b.ok("u2", event::Claim{"b2"});
  CHECK(b.propose("u2", event::Claim{"b2"}) == Reason::SelfClaim);
  // completed: every claim rejects
  b.ok("u2", event::SetStatus{"b2", Status::Completed});
  CHECK(b.propose("u1", event::Claim{"b2"}) == Reason::AlreadyCompleted);
  CHECK(b.propose("u3", event::Claim{"b2"}) == Reason::AlreadyCompleted);
}

TEST_CASE("placement, poses and stack order") {
  Builder b = two_user_session();
  b.ok("u1", event::Place{"b2", {1, 1, 1}});
  CHECK(b.state.users.at("u1").stack == std::vector<std::string>{"b1", "b3"});
  CHECK(b.propose("u1", event::Place{"b2", {1, 1, 1}}) == Reason::NoChange);
  CHECK(b.propose("u2", event::Place{"b2", {0, 0, 0}}) == Reason::NotOwner);
  CHECK(b.propose("u1", event::Place{"b2", {NAN, 0, 0}}) == Reason::Malformed);
  b.ok("u1", event::ReturnToStack{"b2"});
  CHECK(b.state.users.at("u1").stack == std::vector<std::string>{"b1", "b3", "b2"});
  CHECK(b.propose("u1", event::ReturnToStack{"b2"}) == Reason::NoChange);

  b.ok("u1", event::ReorderStack{{"b2", "b1", "b3"}});
  CHECK(b.state.bits.at("b2").placement == Placement{InStack{0}});
  CHECK(b.propose("u1", event::ReorderStack{{"b2", "b1", "b3"}}) == Reason::NoChange);
  CHECK(b.propose("u1", event::ReorderStack{{"b2", "b1"}}) == Reason::Malformed);
  CHECK(b.propose("u1", event::ReorderStack{{"b2", "b1", "b4"}}) == Reason::Malformed);

  const auto pose = *Pose::make({1, 1.6, 0}, {1, 0, 0}, {0, 1, 0});
  b.ok("u1", event::MovePose{pose});
  CHECK(b.state.users.at("u1").pose == pose);
  CHECK(b.propose("u1", event::MovePose{pose}) == Reason::NoChange);

  b.ok("u1", event::Place{"b1", {0, 0, 0}});
  b.ok("u1", event::SetStatus{"b1", Status::Completed});
  CHECK(b.propose("u1", event::Place{"b1", {1, 0, 0}}) == Reason::AlreadyCompleted);
  CHECK(b.propose("u1", event::ReturnToStack{"b1"}) == Reason::AlreadyCompleted);
  CHECK(b.state.bits.at("b1").status_changed_at == b.log.back().ts - b.state.started_at);
}

TEST_CASE("leave and rejoin keep ownership") {
  Builder b = two_user_session();
  b.ok("u2", event::Leave{});
  CHECK_FALSE(b.state.users.at("u2").present);
  CHECK(b.propose("u2", event::Claim{"b1"}) == Reason::UnknownUser);
  CHECK(b.state.bits.at("b4").owner == "u2");
  b.ok("u2", event::Join{"Blair"});
  CHECK(b.state.users.at("u2").present);
  CHECK(b.state.users.at("u2").color == UserColor{1, 0});
}

TEST_CASE("replay") {
  CHECK(replay({}) == empty_state());
  CHECK(replay({}).last_seq == 0);

  const Builder b = two_user_session();
  CHECK(replay(b.log) == b.state);

  auto gap = b.log;
  gap.erase(gap.begin() + 1);
  CHECK_THROWS_AS(replay(gap), CorruptLog);

  auto rejected = b.log;
  rejected.push_back({5, "u1", 600, event::Claim{"b404"}});
  CHECK_THROWS_AS(replay(rejected), CorruptLog);
}

TEST_CASE("fuzz: invariants hold and completed bits stay locked") {
  testing::Rng rng(99);
  SessionState s = empty_state();
  std::uint64_t accepted = 0;
  for (int i = 0; i < 3000; ++i) {
    const CommittedEvent ev = testing::random_proposal(rng, s, kSixSteps, 10 * i);
    const SessionState before = s;
    const auto reason = apply_in_place(s, ev);
    if (reason) {
      CHECK(s == before);
    } else {
      ++accepted;
      CHECK(s.last_seq == accepted);
      const auto inv = check_invariants(s);
      const auto tr = check_transition(before, s);
      INFO(inv.value_or("") << tr.value_or(""));
      CHECK_FALSE(inv.has_value());
      CHECK_FALSE(tr.has_value());
    }
    if (const auto* c = std::get_if<event::Claim>(&ev.event)) {
      const auto bit = before.bits.find(c->bit_id);
      const auto actor = before.users.find(ev.actor);
      if (bit != before.bits.end() && bit->second.status == Status::Completed && actor != before.users.end() &&
          actor->second.present) {
        CHECK(reason == Reason::AlreadyCompleted);
      }
    }
  }
  CHECK(accepted > 300);
}
