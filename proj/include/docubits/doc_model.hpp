#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docubits/result.hpp"

namespace docubits {

// Half-open byte interval [start, end) into a UTF-8 body.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool empty() const { return end <= start; }
  bool overlaps(const Span& o) const { return start < o.end && o.start < end; }
  friend bool operator==(const Span&, const Span&) = default;
};

using CohesionGroups = std::vector<std::vector<int>>;

struct SourceDocument {
  std::string doc_id;
  std::string title;
  std::string body;
  // Author-identified runs of step ordinals that must stay with one user.
  std::optional<CohesionGroups> cohesion;

  friend bool operator==(const SourceDocument&, const SourceDocument&) = default;
};

struct StepSegment {
  int ordinal = 0;
  Span span;
  std::string text;

  friend bool operator==(const StepSegment&, const StepSegment&) = default;
};

struct HighlightSegment {
  Span span;
  std::string text;
  std::string creator;

  friend bool operator==(const HighlightSegment&, const HighlightSegment&) = default;
};

/// Splits the body at numbered step headers.
///
/// A header line is: optional leading blanks, decimal digits, '.' or ')',
/// then at least one whitespace character. A step spans from the header's
/// first non-blank byte to just before the next header line, minus trailing
/// newlines. Anything before the first header is preamble and is dropped.
Result<std::vector<StepSegment>> parse_steps(const SourceDocument& doc);

/// Trims whitespace off both ends of `raw` and checks it against `existing`.
/// `raw` must satisfy start < end <= body.size(), otherwise BadSpan.
Result<HighlightSegment> segment_by_highlight(const SourceDocument& doc, Span raw,
                                              std::span<const Span> existing,
                                              std::string_view creator);

inline const std::string& full_view(const SourceDocument& doc) { return doc.body; }

// Empty body or a structurally broken cohesion list (non-positive ordinals,
// overlapping groups, non-consecutive runs).
bool document_well_formed(const SourceDocument& doc);

// Checks cohesion against a parse result and expands it to cover every step,
// filling gaps with singleton groups in document order. Returns nullopt when a
// group names an unknown ordinal or the groups are out of document order.
std::optional<CohesionGroups> resolve_cohesion(const std::optional<CohesionGroups>& cohesion,
                                               std::span<const StepSegment> steps);

}  // namespace docubits
