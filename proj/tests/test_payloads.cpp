#include <gtest/gtest.h>

#include <cmath>

#include "reasonsum/payloads.hpp"

using namespace reasonsum;
using namespace reasonsum::payloads;

namespace {

const std::vector<std::string> kSentences = {"Alpha rises.", "Beta falls.", "Gamma holds.", "Delta ends."};

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

json extraction(json selected, int total = 4) {
  return {{"stats", {{"total_sentences", total}, {"selected_budget", selected.size()}}}, {"selected", selected}};
}

std::vector<Question> asked() { return {{"q1", "topic", "What?"}, {"q2", "numbers", "How many?"}}; }

json cited(std::string summary, json alignments) {
  return {{"summary_text", std::move(summary)}, {"alignments", std::move(alignments)}};
}

json alignment(int id, json support, int strength = 4) {
  return {{"summary_id", id}, {"support", std::move(support)}, {"importance_reason", "why"}, {"support_strength", strength}};
}

json chunk(const std::string& id, json span, int contexts = 3) {
  json c = json::array();
  for (int i = 0; i < contexts; ++i) c.push_back("ctx" + std::to_string(i));
  return {{"id", id}, {"span", std::move(span)}, {"summary", "s " + id}, {"contexts", c}};
}

json chunk_plan(json chunks, int total) {
  return {{"doc_stats", {{"total_sentences", total}, {"chunk_count", chunks.size()}}}, {"chunks", std::move(chunks)}};
}

json write_plan(int salient = 3) {
  json s = json::array();
  for (int i = 0; i < salient; ++i) s.push_back("item" + std::to_string(i));
  return {{"domain", "news"}, {"goal", "inform"},   {"audience", "public"},
          {"style", "plain"}, {"salient_info", s}, {"length_guidance", "short"}};
}

}  // namespace

TEST(E2ABudget, PolicyAtBoundaries) {
  // Independent restatement of the budget table, checked for every n up to 100.
  auto oracle = [](int n) {
    if (n <= 0) return 0;
    int k;
    if (n <= 6) k = n < 3 ? n : 3;
    else if (n > 60) k = 14;
    else k = std::max(3, std::min(14, static_cast<int>(std::ceil(n / 5.0))));
    return std::min(k, n);
  };
  for (int n = 0; n <= 100; ++n) EXPECT_EQ(e2a_expected_budget(n), oracle(n)) << n;
  EXPECT_EQ(e2a_expected_budget(16), 4);
  EXPECT_EQ(e2a_expected_budget(60), 12);
  EXPECT_EQ(e2a_expected_budget(61), 14);
  EXPECT_EQ(e2a_expected_budget(100, 8), 8);
}

TEST(Extraction, AcceptsVerbatimSelection) {
  const auto r = check_extraction(extraction(json::array({{{"index", 0}, {"text", "Alpha rises."}},
                                                          {{"index", 2}, {"text", "Gamma holds."}}})),
                                  kSentences);
  ASSERT_TRUE(r.ok()) << r.violations.front();
  EXPECT_EQ(r.value->selected.size(), 2u);
  EXPECT_EQ(r.value->selected[1].text, "Gamma holds.");
  EXPECT_TRUE(mentions(r.flags, "budget_differs_from_policy"));  // policy says 3
}

TEST(Extraction, RepairsNonVerbatimText) {
  const auto r = check_extraction(extraction(json::array({{{"index", 1}, {"text", "beta fell"}},
                                                          {{"index", 2}, {"text", "Gamma holds."}},
                                                          {{"index", 3}, {"text", "Delta ends."}}})),
                                  kSentences);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value->selected[0].text, "Beta falls.");
  EXPECT_EQ(r.flags, std::vector<std::string>{"repaired_text@1"});
}

TEST(Extraction, RejectsOutOfRangeAndUnorderedIndices) {
  auto r = check_extraction(extraction(json::array({{{"index", 4}, {"text", "x"}}})), kSentences);
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r.violations, "outside [0, 4)"));
  r = check_extraction(extraction(json::array({{{"index", 2}, {"text", "x"}}, {{"index", 1}, {"text", "y"}}})),
                       kSentences);
  EXPECT_TRUE(mentions(r.violations, "strictly increasing"));
  r = check_extraction(extraction(json::array({{{"index", -1}, {"text", "x"}}})), kSentences);
  EXPECT_FALSE(r.ok());
}

TEST(Extraction, RejectsBudgetMismatchAndEmptySelection) {
  json p = extraction(json::array({{{"index", 0}, {"text", "Alpha rises."}}}));
  p["stats"]["selected_budget"] = 3;
  EXPECT_TRUE(mentions(check_extraction(p, kSentences).violations, "must equal the number"));
  EXPECT_TRUE(mentions(check_extraction(extraction(json::array()), kSentences).violations, "at least one"));
}

TEST(Extraction, StructuralProblems) {
  EXPECT_FALSE(check_extraction(json::array(), kSentences).ok());
  EXPECT_FALSE(check_extraction(json{{"selected", json::array()}}, kSentences).ok());
  EXPECT_TRUE(mentions(check_extraction(json{{"stats", {{"total_sentences", 4}, {"selected_budget", 1}}},
                                             {"selected", json::array({{{"index", "zero"}, {"text", "x"}}})}},
                                        kSentences)
                           .violations,
                       "must be an integer"));
}

TEST(Extraction, IntegralFloatsCountAsIntegers) {
  const auto r = check_extraction(
      json{{"stats", {{"total_sentences", 4.0}, {"selected_budget", 1}}},
           {"selected", json::array({{{"index", 1.0}, {"text", "Beta falls."}}})}},
      kSentences);
  EXPECT_TRUE(r.ok());
  EXPECT_FALSE(check_extraction(json{{"stats", {{"total_sentences", 4}, {"selected_budget", 1}}},
                                     {"selected", json::array({{{"index", 1.5}, {"text", "x"}}})}},
                                kSentences)
                   .ok());
}

TEST(Extraction, FlagsTotalMismatchAndOverCap) {
  json sel = json::array();
  for (int i = 0; i < 4; ++i) sel.push_back({{"index", i}, {"text", kSentences[static_cast<std::size_t>(i)]}});
  const auto r = check_extraction(extraction(sel, 9), kSentences, 2);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(mentions(r.flags, "total_sentences_mismatch"));
  EXPECT_TRUE(mentions(r.flags, "exceeds_e2a_max_k"));
}

TEST(Questions, AcceptsRangeAndIntegerIds) {
  json p{{"questions", json::array({{{"id", 1}, {"facet", "topic"}, {"question", "A?"}},
                                    {{"id", "q2"}, {"facet", "timeline"}, {"question", "B?"}}})}};
  const auto r = check_questions(p, {2, 4});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ((*r.value)[0].id, "1");
  EXPECT_FALSE(check_questions(p, {3, 4}).ok());
  EXPECT_FALSE(check_questions(p, {1, 1}).ok());
}

TEST(Questions, RejectsDuplicateIdsUnknownFacetsAndBlanks) {
  json p{{"questions", json::array({{{"id", "a"}, {"facet", "topic"}, {"question", "A?"}},
                                    {{"id", "a"}, {"facet", "mood"}, {"question", "  "}}})}};
  const auto r = check_questions(p, {1, 8});
  EXPECT_TRUE(mentions(r.violations, "duplicated"));
  EXPECT_TRUE(mentions(r.violations, "not a known facet"));
  EXPECT_TRUE(mentions(r.violations, "must not be empty"));
}

TEST(Answers, EveryQuestionAnswered) {
  const auto qs = asked();
  json p{{"answers", json::array({{{"id", "q1"}, {"question", "What?"}, {"answer", "x"}, {"confidence", 5}},
                                  {{"id", "q2"}, {"answer", "3"}, {"confidence", 1}}})}};
  const auto r = check_answers(p, qs);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ((*r.value)[1].question, "How many?");
  EXPECT_EQ(r.flags, std::vector<std::string>{"question_text_filled@q2"});

  p["answers"].erase(1);
  EXPECT_TRUE(mentions(check_answers(p, qs).violations, "'q2' has no answer"));
}

TEST(Answers, RejectsUnknownIdAndBadConfidence) {
  const auto qs = asked();
  json p{{"answers", json::array({{{"id", "q1"}, {"answer", "x"}, {"confidence", 6}},
                                  {{"id", "q2"}, {"answer", "y"}, {"confidence", 0}},
                                  {{"id", "q9"}, {"answer", "z"}, {"confidence", 3}}})}};
  const auto r = check_answers(p, qs);
  EXPECT_TRUE(mentions(r.violations, "outside [1, 5]"));
  EXPECT_TRUE(mentions(r.violations, "'q9' does not match"));
}

TEST(Cited, ZeroAndOneBasedIds) {
  const auto zero = check_cited_summary(cited("One. Two.", json::array({alignment(0, {0}), alignment(1, {1, 2})})), 4);
  ASSERT_TRUE(zero.ok());
  EXPECT_TRUE(zero.flags.empty());
  const auto one = check_cited_summary(cited("One. Two.", json::array({alignment(1, {0}), alignment(2, {3})})), 4);
  ASSERT_TRUE(one.ok());
  EXPECT_EQ(one.flags, std::vector<std::string>{"one_based_summary_ids"});
  EXPECT_FALSE(check_cited_summary(cited("One. Two.", json::array({alignment(0, {0}), alignment(2, {0})})), 4).ok());
}

TEST(Cited, SupportBoundsAndStrength) {
  EXPECT_FALSE(check_cited_summary(cited("One.", json::array({alignment(0, json::array())})), 4).ok());
  EXPECT_FALSE(check_cited_summary(cited("One.", json::array({alignment(0, {0, 1, 2, 3})})), 4).ok());
  EXPECT_FALSE(check_cited_summary(cited("One.", json::array({alignment(0, {4})})), 4).ok());
  EXPECT_FALSE(check_cited_summary(cited("One.", json::array({alignment(0, {0}, 0)})), 4).ok());
  EXPECT_FALSE(check_cited_summary(cited("One.", json::array({alignment(0, {"x"})})), 4).ok());
}

TEST(Cited, SummaryAndAlignmentsRequired) {
  EXPECT_FALSE(check_cited_summary(cited("  ", json::array({alignment(0, {0})})), 4).ok());
  EXPECT_FALSE(check_cited_summary(cited("One.", json::array()), 4).ok());
  EXPECT_FALSE(check_cited_summary(json{{"summary_text", "One."}}, 4).ok());
}

TEST(ChunkPlanCheck, TilingSpansInBothForms) {
  const auto r = check_chunk_plan(
      chunk_plan(json::array({chunk("c1", {0, 4}), chunk("c2", {{"start", 5}, {"end", 9}}, 6)}), 10), 10);
  ASSERT_TRUE(r.ok()) << r.violations.front();
  EXPECT_EQ(r.value->chunks[1].start, 5);
  EXPECT_EQ(r.value->chunks[1].end, 9);
  EXPECT_TRUE(r.flags.empty());
}

TEST(ChunkPlanCheck, GapsOverlapsAndShortTiling) {
  auto violations = [](json chunks, int total) { return check_chunk_plan(chunk_plan(std::move(chunks), total)).violations; };
  EXPECT_TRUE(mentions(violations(json::array({chunk("a", {0, 3}), chunk("b", {5, 9})}), 10), "gap"));
  EXPECT_TRUE(mentions(violations(json::array({chunk("a", {0, 5}), chunk("b", {5, 9})}), 10), "overlaps"));
  EXPECT_TRUE(mentions(violations(json::array({chunk("a", {0, 8})}), 10), "end at 8"));
  EXPECT_TRUE(mentions(violations(json::array({chunk("a", {1, 9})}), 10), "gap"));
  EXPECT_TRUE(mentions(violations(json::array({chunk("a", {3, 2})}), 10), "exceeds end"));
}

TEST(ChunkPlanCheck, ContextCountAndChunkCount) {
  EXPECT_FALSE(check_chunk_plan(chunk_plan(json::array({chunk("a", {0, 1}, 2)}), 2)).ok());
  EXPECT_FALSE(check_chunk_plan(chunk_plan(json::array({chunk("a", {0, 1}, 7)}), 2)).ok());
  json p = chunk_plan(json::array({chunk("a", {0, 1})}), 2);
  p["doc_stats"]["chunk_count"] = 2;
  EXPECT_TRUE(mentions(check_chunk_plan(p).violations, "chunk_count 2"));
}

TEST(ChunkPlanCheck, HarnessCountMismatchIsOnlyFlagged) {
  const auto r = check_chunk_plan(chunk_plan(json::array({chunk("a", {0, 1})}), 2), 3);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.flags, std::vector<std::string>{"total_sentences_mismatch"});
}

TEST(ChunkPlanCheck, SlotRenderings) {
  const auto r = check_chunk_plan(chunk_plan(json::array({chunk("a", {0, 1})}), 2));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(chunk_summaries_json(*r.value), json::parse(R"([{"id":"a","summary":"s a"}])"));
  EXPECT_EQ(chunk_contexts_json(*r.value)[0]["contexts"].size(), 3u);
}

TEST(WritePlanCheck, SalientInfoBounds) {
  EXPECT_TRUE(check_write_plan(write_plan(3)).ok());
  EXPECT_TRUE(check_write_plan(write_plan(5)).ok());
  EXPECT_FALSE(check_write_plan(write_plan(2)).ok());
  EXPECT_FALSE(check_write_plan(write_plan(6)).ok());
  json p = write_plan();
  p["salient_info"][1] = "";
  EXPECT_FALSE(check_write_plan(p).ok());
  p = write_plan();
  p.erase("audience");
  EXPECT_TRUE(mentions(check_write_plan(p).violations, "audience is missing"));
}

TEST(WritePlanCheck, RoundTrip) {
  const auto r = check_write_plan(write_plan(4));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(to_json(*r.value), write_plan(4));
}

TEST(IREval, StopRules) {
  json hold{{"score", 3}, {"suggestions", json::array({{{"type", "add"}, {"content", "x"}, {"evidence", "y"}}})}, {"stop", true}};
  EXPECT_TRUE(mentions(check_ir_evaluation(hold).violations, "stop is true"));
  hold["score"] = 5;
  EXPECT_TRUE(check_ir_evaluation(hold).ok());
  json quiet{{"score", 2}, {"suggestions", json::array({{{"type", "none"}}})}, {"stop", true}};
  EXPECT_TRUE(check_ir_evaluation(quiet).ok());
}

TEST(IREval, Terminal) {
  IREvaluation e;
  e.score = 5;
  EXPECT_TRUE(e.terminal());
  e.suggestions = {{SuggestionType::shorten, "x", ""}};
  EXPECT_FALSE(e.terminal());
  e.score = 3;
  e.suggestions = {{SuggestionType::none, "", ""}};
  EXPECT_TRUE(e.terminal());
  e.suggestions.clear();
  EXPECT_FALSE(e.terminal());
}

TEST(IREval, FieldTypes) {
  EXPECT_FALSE(check_ir_evaluation(json{{"score", 6}, {"suggestions", json::array()}, {"stop", false}}).ok());
  EXPECT_FALSE(check_ir_evaluation(json{{"score", 3}, {"suggestions", json::array()}, {"stop", "no"}}).ok());
  EXPECT_FALSE(check_ir_evaluation(json{{"score", 3}, {"suggestions", json::array({{{"type", "expand"}}})}, {"stop", false}}).ok());
  EXPECT_FALSE(check_ir_evaluation(json{{"score", 3}, {"suggestions", json::array({{{"type", "add"}, {"content", 3}}})}, {"stop", false}}).ok());
  const auto ok = check_ir_evaluation(json{{"score", 3}, {"suggestions", json::array({{{"type", "add"}, {"content", nullptr}}})}, {"stop", false}});
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ(to_json(*ok.value)["suggestions"][0]["type"], "add");
}
