#include "docubits/doc_model.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <set>

namespace docubits {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

struct Header {
  std::size_t line_start = 0;
  std::size_t text_start = 0;
  long long ordinal = 0;
};

// Matches the header grammar against the line beginning at `pos`.
std::optional<Header> match_header(std::string_view body, std::size_t pos) {
  std::size_t i = pos;
  while (i < body.size() && is_blank(body[i])) ++i;
  const std::size_t text_start = i;
  long long value = 0;
  bool overflow = false;
  while (i < body.size() && is_digit(body[i])) {
    if (value > (LLONG_MAX - 9) / 10) overflow = true;
    if (!overflow) value = value * 10 + (body[i] - '0');
    ++i;
  }
  if (i == text_start) return std::nullopt;
  if (i >= body.size() || (body[i] != '.' && body[i] != ')')) return std::nullopt;
  ++i;
  if (i >= body.size() || !is_space(body[i])) return std::nullopt;
  return Header{pos, text_start, overflow ? LLONG_MAX : value};
}

}  // namespace

Result<std::vector<StepSegment>> parse_steps(const SourceDocument& doc) {
  const std::string_view body = doc.body;

  std::vector<Header> headers;
  std::size_t line = 0;
  while (line <= body.size()) {
    if (auto h = match_header(body, line)) headers.push_back(*h);
    const auto nl = body.find('\n', line);
    if (nl == std::string_view::npos) break;
    line = nl + 1;
  }
  if (headers.empty()) return Reason::NoSteps;

  std::vector<StepSegment> out;
  out.reserve(headers.size());
  long long prev = LLONG_MIN;
  for (std::size_t k = 0; k < headers.size(); ++k) {
    const Header& h = headers[k];
    if (h.ordinal <= prev || h.ordinal > INT_MAX) return Reason::MalformedNumbering;
    prev = h.ordinal;

    std::size_t end = k + 1 < headers.size() ? headers[k + 1].line_start : body.size();
    while (end > h.text_start && (body[end - 1] == '\n' || body[end - 1] == '\r')) --end;

    StepSegment seg;
    seg.ordinal = static_cast<int>(h.ordinal);
    seg.span = {h.text_start, end};
    seg.text = std::string(body.substr(h.text_start, end - h.text_start));
    out.push_back(std::move(seg));
  }
  return out;
}

Result<HighlightSegment> segment_by_highlight(const SourceDocument& doc, Span raw,
                                              std::span<const Span> existing,
                                              std::string_view creator) {
  if (raw.start >= raw.end || raw.end > doc.body.size()) return Reason::BadSpan;

  Span s = raw;
  while (s.start < s.end && is_space(doc.body[s.start])) ++s.start;
  while (s.end > s.start && is_space(doc.body[s.end - 1])) --s.end;
  if (s.empty()) return Reason::EmptyAfterTrim;

  for (const Span& e : existing) {
    if (s.overlaps(e)) return Reason::OverlapsExisting;
  }
  return HighlightSegment{s, doc.body.substr(s.start, s.size()), std::string(creator)};
}

bool document_well_formed(const SourceDocument& doc) {
  if (doc.body.empty()) return false;
  if (!doc.cohesion) return true;
  std::set<int> seen;
  for (const auto& group : *doc.cohesion) {
    if (group.empty()) return false;
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (group[i] <= 0) return false;
      if (i > 0 && group[i] <= group[i - 1]) return false;
      if (!seen.insert(group[i]).second) return false;
    }
  }
  return true;
}

std::optional<CohesionGroups> resolve_cohesion(const std::optional<CohesionGroups>& cohesion,
                                               std::span<const StepSegment> steps) {
  std::map<int, std::size_t> index_of;
  for (std::size_t i = 0; i < steps.size(); ++i) index_of[steps[i].ordinal] = i;

  // group id per step index; -1 means not covered yet
  std::vector<int> owner(steps.size(), -1);
  if (cohesion) {
    for (std::size_t g = 0; g < cohesion->size(); ++g) {
      const auto& group = (*cohesion)[g];
      if (group.empty()) return std::nullopt;
      std::optional<std::size_t> prev;
      for (int ordinal : group) {
        auto it = index_of.find(ordinal);
        if (it == index_of.end()) return std::nullopt;
        if (prev && it->second != *prev + 1) return std::nullopt;
        if (owner[it->second] != -1) return std::nullopt;
        owner[it->second] = static_cast<int>(g);
        prev = it->second;
      }
    }
  }

  CohesionGroups out;
  int current = -2;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (owner[i] == -1) {
      out.push_back({steps[i].ordinal});
      current = -2;
    } else if (owner[i] == current) {
      out.back().push_back(steps[i].ordinal);
    } else {
      out.push_back({steps[i].ordinal});
      current = owner[i];
    }
  }
  return out;
}

}  // namespace docubits
