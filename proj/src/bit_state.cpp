#include "docubits/bit_state.hpp"

#include <algorithm>
#include <numeric>

namespace docubits {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::NotAttempted: return "NotAttempted";
    case Status::InProgress: return "InProgress";
    case Status::Blocked: return "Blocked";
    case Status::Completed: return "Completed";
  }
  return "NotAttempted";
}

std::optional<Status> status_from_string(std::string_view s) {
  for (Status st : {Status::NotAttempted, Status::InProgress, Status::Blocked, Status::Completed}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

UserColor color_for_join_index(std::size_t join_index, std::size_t palette_size) {
  if (palette_size == 0) palette_size = 1;
  return {static_cast<int>(join_index % palette_size), static_cast<int>(join_index / palette_size)};
}

Result<DocuBit> set_status(const DocuBit& bit, Status new_status, std::string_view actor,
                           std::int64_t at) {
  if (actor != bit.owner) return Reason::NotOwner;
  if (bit.status == Status::Completed) return Reason::AlreadyCompleted;
  if (new_status == bit.status) return Reason::NoChange;
  DocuBit out = bit;
  out.status = new_status;
  out.status_changed_at = at;
  return out;
}

Result<DocuBit> claim(const DocuBit& bit, std::string_view new_owner, std::uint64_t at_seq,
                      int stack_position) {
  if (bit.status == Status::Completed) return Reason::AlreadyCompleted;
  if (new_owner == bit.owner) return Reason::SelfClaim;
  DocuBit out = bit;
  out.owner = std::string(new_owner);
  out.owner_history.push_back({out.owner, at_seq});
  out.placement = InStack{stack_position};
  return out;
}

namespace {

// Fewest contiguous runs with load <= cap, or SIZE_MAX if some group exceeds cap.
std::size_t min_runs(std::span<const std::size_t> sizes, std::size_t cap) {
  std::size_t runs = 0;
  std::size_t load = 0;
  for (std::size_t s : sizes) {
    if (s > cap) return SIZE_MAX;
    if (runs == 0 || load + s > cap) {
      ++runs;
      load = s;
    } else {
      load += s;
    }
  }
  return runs;
}

bool feasible(std::span<const std::size_t> sizes, std::size_t parts, std::size_t cap) {
  return sizes.size() >= parts && min_runs(sizes, cap) <= parts;
}

}  // namespace

std::optional<std::vector<std::size_t>> split_cuts(std::span<const std::size_t> group_sizes,
                                                   std::size_t parts) {
  const std::size_t n = group_sizes.size();
  if (parts == 0 || parts > n) return std::nullopt;

  std::size_t lo = *std::max_element(group_sizes.begin(), group_sizes.end());
  std::size_t hi = std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0});
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(group_sizes, parts, mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const std::size_t cap = lo;

  std::vector<std::size_t> cuts;
  std::size_t begin = 0;
  for (std::size_t part = 1; part < parts; ++part) {
    std::size_t load = 0;
    std::size_t end = begin;
    bool found = false;
    while (end < n) {
      load += group_sizes[end];
      ++end;
      if (load > cap) break;
      if (feasible(group_sizes.subspan(end), parts - part, cap)) {
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
    cuts.push_back(end);
    begin = end;
  }
  return cuts;
}

Result<Assignment> assign_split(std::span<const StepSegment> segments,
                                const std::optional<CohesionGroups>& cohesion,
                                std::span<const std::string> users) {
  if (users.empty()) return Reason::Malformed;
  auto groups = resolve_cohesion(cohesion, segments);
  if (!groups) return Reason::Malformed;
  if (users.size() > groups->size()) return Reason::MoreUsersThanGroups;

  std::vector<std::size_t> sizes;
  sizes.reserve(groups->size());
  for (const auto& g : *groups) sizes.push_back(g.size());
  auto cuts = split_cuts(sizes, users.size());
  if (!cuts) return Reason::MoreUsersThanGroups;

  Assignment out;
  std::size_t g = 0;
  for (std::size_t u = 0; u < users.size(); ++u) {
    const std::size_t stop = u < cuts->size() ? (*cuts)[u] : groups->size();
    auto& steps = out[users[u]];
    for (; g < stop; ++g) steps.insert(steps.end(), (*groups)[g].begin(), (*groups)[g].end());
  }
  return out;
}

}  // namespace docubits
