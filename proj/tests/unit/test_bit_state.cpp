#include <string>
#include <vector>

#include "doctest.h"
#include "docubits/bit_state.hpp"
#include "oracles.hpp"

using namespace docubits;

namespace {

DocuBit bit_owned_by(std::string owner, Status status) {
  DocuBit b;
  b.bit_id = "b1";
  b.owner = owner;
  b.owner_history = {{owner, 3}};
  b.status = status;
  b.placement = InStack{0};
  return b;
}

std::vector<StepSegment> unit_steps(int n) {
  std::vector<StepSegment> out;
  for (int i = 1; i <= n; ++i) out.push_back({i, {}, ""});
  return out;
}

std::vector<int> range(int a, int b) {
  std::vector<int> out;
  for (int i = a; i <= b; ++i) out.push_back(i);
  return out;
}

}  // namespace

TEST_CASE("status string round trip") {
  for (Status s : {Status::NotAttempted, Status::InProgress, Status::Blocked, Status::Completed}) {
    CHECK(status_from_string(to_string(s)) == s);
  }
  CHECK_FALSE(status_from_string("Done").has_value());
}

TEST_CASE("set_status") {
  SUBCASE("owner starts work") {
    auto r = set_status(bit_owned_by("A", Status::NotAttempted), Status::InProgress, "A", 1200);
    REQUIRE(r.ok());
    CHECK(r->status == Status::InProgress);
    CHECK(r->status_changed_at == 1200);
  }
  SUBCASE("completed is absorbing") {
    CHECK(set_status(bit_owned_by("A", Status::Completed), Status::Blocked, "A", 0).error() ==
          Reason::AlreadyCompleted);
  }
  SUBCASE("non-owner") {
    CHECK(set_status(bit_owned_by("A", Status::Blocked), Status::Completed, "B", 0).error() == Reason::NotOwner);
  }
  SUBCASE("same status") {
    CHECK(set_status(bit_owned_by("A", Status::Blocked), Status::Blocked, "A", 0).error() == Reason::NoChange);
  }
  SUBCASE("every non-completed status reaches every other") {
    const Status all[] = {Status::NotAttempted, Status::InProgress, Status::Blocked, Status::Completed};
    for (Status from : all) {
      for (Status to : all) {
        auto r = set_status(bit_owned_by("A", from), to, "A", 5);
        if (from == Status::Completed) {
          CHECK(r.error() == Reason::AlreadyCompleted);
        } else if (from == to) {
          CHECK(r.error() == Reason::NoChange);
        } else {
          CHECK(r.ok());
        }
      }
    }
  }
}

TEST_CASE("claim") {
  SUBCASE("takeover lands at the claimant's stack tail") {
    auto b = bit_owned_by("A", Status::NotAttempted);
    b.placement = Placed{{1, 1, 1}};
    auto r = claim(b, "B", 9, 4);
    REQUIRE(r.ok());
    CHECK(r->owner == "B");
    CHECK(r->placement == Placement{InStack{4}});
    REQUIRE(r->owner_history.size() == 2);
    CHECK(r->owner_history.back() == Ownership{"B", 9});
    CHECK(r->status == Status::NotAttempted);
  }
  SUBCASE("completed bit") {
    CHECK(claim(bit_owned_by("A", Status::Completed), "B", 9, 0).error() == Reason::AlreadyCompleted);
    CHECK(claim(bit_owned_by("A", Status::Completed), "A", 9, 0).error() == Reason::AlreadyCompleted);
  }
  SUBCASE("own bit") {
    CHECK(claim(bit_owned_by("A", Status::InProgress), "A", 9, 0).error() == Reason::SelfClaim);
  }
}

TEST_CASE("colors") {
  CHECK(color_for_join_index(0) == UserColor{0, 0});
  CHECK(color_for_join_index(5) == UserColor{5, 0});
  CHECK(color_for_join_index(6) == UserColor{0, 1});
  CHECK(color_for_join_index(13) == UserColor{1, 2});
  CHECK(kDefaultPalette[0].r > kDefaultPalette[0].g);  // red first
}

TEST_CASE("assign_split examples") {
  const std::vector<std::string> two{"u1", "u2"};

  auto eight = assign_split(unit_steps(8), std::nullopt, two);
  REQUIRE(eight.ok());
  CHECK(eight->at("u1") == range(1, 4));
  CHECK(eight->at("u2") == range(5, 8));

  auto seven = assign_split(unit_steps(7), std::nullopt, two);
  REQUIRE(seven.ok());
  CHECK(seven->at("u1") == range(1, 3));
  CHECK(seven->at("u2") == range(4, 7));

  auto grouped = assign_split(unit_steps(6), CohesionGroups{{1, 2}, {3}, {4, 5, 6}}, two);
  REQUIRE(grouped.ok());
  CHECK(grouped->at("u1") == range(1, 3));
  CHECK(grouped->at("u2") == range(4, 6));
}

TEST_CASE("assign_split errors") {
  const std::vector<std::string> three{"a", "b", "c"};
  CHECK(assign_split(unit_steps(4), CohesionGroups{{1, 2, 3}, {4}}, three).error() == Reason::MoreUsersThanGroups);
  CHECK(assign_split(unit_steps(2), std::nullopt, {}).error() == Reason::Malformed);
  CHECK(assign_split(unit_steps(4), CohesionGroups{{1, 3}}, three).error() == Reason::Malformed);
}

TEST_CASE("split_cuts agrees with brute force on random sizes") {
  testing::Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::size_t> sizes(1 + rng.below(9));
    for (auto& s : sizes) s = 1 + rng.below(5);
    const std::size_t parts = 1 + rng.below(sizes.size());
    const auto expected = testing::brute_force_split(sizes, parts);
    const auto got = split_cuts(sizes, parts);
    REQUIRE(expected.has_value());
    REQUIRE(got.has_value());
    CHECK(*got == expected->cuts);
  }
  CHECK_FALSE(split_cuts(std::vector<std::size_t>{1, 2}, 3).has_value());
  CHECK_FALSE(split_cuts(std::vector<std::size_t>{1, 2}, 0).has_value());
}
