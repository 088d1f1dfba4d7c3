#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "docubits/doc_model.hpp"
#include "docubits/result.hpp"
#include "docubits/spatial.hpp"

namespace docubits {

enum class Status { NotAttempted, InProgress, Blocked, Completed };

std::string_view to_string(Status s);
std::optional<Status> status_from_string(std::string_view s);

struct InStack {
  int stack_position = 0;
  friend bool operator==(const InStack&, const InStack&) = default;
};

struct Placed {
  Vec3 position;
  friend bool operator==(const Placed&, const Placed&) = default;
};

using Placement = std::variant<InStack, Placed>;

struct Ownership {
  std::string user;
  std::uint64_t seq = 0;
  friend bool operator==(const Ownership&, const Ownership&) = default;
};

struct DocuBit {
  std::string bit_id;
  std::string doc_id;
  Span span;
  std::string text;
  std::optional<int> ordinal;
  std::string owner;
  // Append-only; back() is always the current owner.
  std::vector<Ownership> owner_history;
  Status status = Status::NotAttempted;
  Placement placement = InStack{};
  // Milliseconds since session start.
  std::int64_t status_changed_at = 0;
  std::string created_by;

  friend bool operator==(const DocuBit&, const DocuBit&) = default;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// red, green, blue, orange, purple, teal
inline constexpr std::array<Rgb, 6> kDefaultPalette{{
    {230, 57, 70},
    {46, 204, 64},
    {0, 116, 217},
    {255, 133, 27},
    {177, 13, 201},
    {57, 204, 204},
}};

// Past the palette size colors repeat and `badge` tells the users apart.
struct UserColor {
  int index = 0;
  int badge = 0;
  friend bool operator==(const UserColor&, const UserColor&) = default;
};

UserColor color_for_join_index(std::size_t join_index, std::size_t palette_size = kDefaultPalette.size());

// Owner-only manual status selection; Completed is absorbing.
Result<DocuBit> set_status(const DocuBit& bit, Status new_status, std::string_view actor,
                           std::int64_t at);

// Ownership transfer. The bit lands at `stack_position` in the new owner's
// stack; callers pass the current tail index.
Result<DocuBit> claim(const DocuBit& bit, std::string_view new_owner, std::uint64_t at_seq,
                      int stack_position);

using Assignment = std::map<std::string, std::vector<int>>;

/// Splits cohesion groups into |users| contiguous runs in document order,
/// minimizing the largest per-user step count. Ties go to the
/// lexicographically smallest cut sequence, so earlier users never get more
/// than needed. Absent cohesion means one group per step.
Result<Assignment> assign_split(std::span<const StepSegment> segments,
                                const std::optional<CohesionGroups>& cohesion,
                                std::span<const std::string> users);

// Cut positions (group indices where each run after the first starts) for the
// same optimization over raw group sizes.
std::optional<std::vector<std::size_t>> split_cuts(std::span<const std::size_t> group_sizes,
                                                   std::size_t parts);

}  // namespace docubits
