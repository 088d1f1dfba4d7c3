#include <string>
#include <vector>

#include "doctest.h"
#include "docubits/doc_model.hpp"
#include "oracles.hpp"

using namespace docubits;

namespace {

SourceDocument doc_of(std::string body) { return {"d", "t", std::move(body), std::nullopt}; }

std::vector<int> ordinals(const std::vector<StepSegment>& s) {
  std::vector<int> out;
  for (const auto& x : s) out.push_back(x.ordinal);
  return out;
}

}  // namespace

TEST_CASE("parse_steps: two simple steps") {
  auto r = parse_steps(doc_of("1. Heat the flask\n2. Add solution"));
  REQUIRE(r.ok());
  REQUIRE(r->size() == 2);
  CHECK(ordinals(*r) == std::vector<int>{1, 2});
  CHECK((*r)[0].text == "1. Heat the flask");
  CHECK((*r)[1].text == "2. Add solution");
}

TEST_CASE("parse_steps: no numbered lines") {
  auto r = parse_steps(doc_of("Intro text only, no numbers"));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error() == Reason::NoSteps);
}

TEST_CASE("parse_steps: decimal inside a step is body text") {
  auto r = parse_steps(doc_of("1. A\n2.1 is a ratio\n3. B"));
  REQUIRE(r.ok());
  CHECK(ordinals(*r) == std::vector<int>{1, 3});
  CHECK((*r)[0].text == "1. A\n2.1 is a ratio");
  CHECK((*r)[1].text == "3. B");
}

TEST_CASE("parse_steps: grammar details") {
  SUBCASE("paren separator and indentation") {
    auto r = parse_steps(doc_of("Preamble\n  1) first\n\n  2) second\n"));
    REQUIRE(r.ok());
    CHECK((*r)[0].text == "1) first");
    CHECK((*r)[0].span.start == 11);
    CHECK((*r)[1].text == "2) second");
  }
  SUBCASE("non-increasing ordinals") {
    auto r = parse_steps(doc_of("2. b\n1. a"));
    REQUIRE_FALSE(r.ok());
    CHECK(r.error() == Reason::MalformedNumbering);
    CHECK(parse_steps(doc_of("1. a\n1. again")).error() == Reason::MalformedNumbering);
  }
  SUBCASE("header needs whitespace after the separator") {
    CHECK(parse_steps(doc_of("1.x\n2.y")).error() == Reason::NoSteps);
    CHECK(parse_steps(doc_of("1.")).error() == Reason::NoSteps);
  }
  SUBCASE("header followed directly by newline") {
    auto r = parse_steps(doc_of("1.\nfirst\n2. second"));
    REQUIRE(r.ok());
    CHECK((*r)[0].text == "1.\nfirst");
  }
  SUBCASE("crlf line endings trimmed at segment end") {
    auto r = parse_steps(doc_of("1. a\r\n2. b\r\n"));
    REQUIRE(r.ok());
    CHECK((*r)[0].text == "1. a");
    CHECK((*r)[1].text == "2. b");
  }
  SUBCASE("huge ordinal") {
    CHECK(parse_steps(doc_of("99999999999999999999. x")).error() == Reason::MalformedNumbering);
  }
}

TEST_CASE("segment_by_highlight") {
  const auto doc = doc_of("First,  pour slowly  then stir.     \n");
  const std::size_t at = doc.body.find("  pour");

  SUBCASE("trims whitespace") {
    auto r = segment_by_highlight(doc, {at, at + 15}, {}, "u1");
    REQUIRE(r.ok());
    CHECK(r->text == "pour slowly");
    CHECK(r->span == Span{at + 2, at + 13});
    CHECK(r->creator == "u1");
  }
  SUBCASE("whitespace only") {
    const std::size_t ws = doc.body.find("     ");
    CHECK(segment_by_highlight(doc, {ws, ws + 5}, {}, "u1").error() == Reason::EmptyAfterTrim);
  }
  SUBCASE("one byte overlap") {
    const std::vector<Span> existing{{at + 12, at + 20}};
    CHECK(segment_by_highlight(doc, {at, at + 15}, existing, "u1").error() == Reason::OverlapsExisting);
    const std::vector<Span> touching{{at + 13, at + 20}};
    CHECK(segment_by_highlight(doc, {at, at + 15}, touching, "u1").ok());
  }
  SUBCASE("bad spans") {
    CHECK(segment_by_highlight(doc, {5, 5}, {}, "u").error() == Reason::BadSpan);
    CHECK(segment_by_highlight(doc, {6, 5}, {}, "u").error() == Reason::BadSpan);
    CHECK(segment_by_highlight(doc, {0, doc.body.size() + 1}, {}, "u").error() == Reason::BadSpan);
  }
}

TEST_CASE("full_view is the body, untouched by segmentation") {
  auto doc = doc_of("1. a\n2. b\n");
  const std::string before = doc.body;
  CHECK(full_view(doc) == before);
  doc.title.clear();
  CHECK(full_view(doc) == before);
  (void)parse_steps(doc);
  (void)segment_by_highlight(doc, {0, 4}, {}, "u");
  CHECK(full_view(doc) == before);
  CHECK(&full_view(doc) == &doc.body);
}

TEST_CASE("document_well_formed and resolve_cohesion") {
  auto doc = doc_of("1. a\n2. b\n3. c\n4. d");
  CHECK(document_well_formed(doc));
  CHECK_FALSE(document_well_formed(doc_of("")));
  doc.cohesion = CohesionGroups{{1, 2}, {2, 3}};
  CHECK_FALSE(document_well_formed(doc));
  doc.cohesion = CohesionGroups{{0}};
  CHECK_FALSE(document_well_formed(doc));

  const auto steps = *parse_steps(doc_of("1. a\n2. b\n3. c\n4. d"));
  CHECK(resolve_cohesion(std::nullopt, steps) == CohesionGroups{{1}, {2}, {3}, {4}});
  CHECK(resolve_cohesion(CohesionGroups{{2, 3}}, steps) == CohesionGroups{{1}, {2, 3}, {4}});
  CHECK_FALSE(resolve_cohesion(CohesionGroups{{1, 3}}, steps).has_value());
  CHECK_FALSE(resolve_cohesion(CohesionGroups{{5}}, steps).has_value());
}

TEST_CASE("parse_steps property: generated documents") {
  testing::Rng rng(7);
  for (int doc_i = 0; doc_i < 300; ++doc_i) {
    const auto g = testing::generate_steps_doc(rng);
    auto r = parse_steps(doc_of(g.body));
    REQUIRE(r.ok());
    REQUIRE(r->size() == g.texts.size());
    for (std::size_t i = 0; i < r->size(); ++i) {
      const auto& seg = (*r)[i];
      CHECK(seg.text == g.texts[i]);
      CHECK(seg.ordinal == g.ordinals[i]);
      CHECK(seg.text == g.body.substr(seg.span.start, seg.span.size()));
      if (i > 0) {
        CHECK((*r)[i - 1].span.end <= seg.span.start);
        CHECK((*r)[i - 1].ordinal < seg.ordinal);
      }
    }
  }
}
