#include <gtest/gtest.h>

#include "reasonsum/core.hpp"

using namespace reasonsum;

TEST(Core, StrategyNamesRoundTrip) {
  for (auto id : kAllStrategies) {
    auto parsed = parse_strategy(to_string(id));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(*parsed, id);
  }
  EXPECT_FALSE(parse_strategy("tree-of-thought").has_value());
  EXPECT_FALSE(parse_strategy("").has_value());
}

TEST(Core, EffortNamesRoundTrip) {
  for (auto e : {ReasoningEffort::none, ReasoningEffort::minimal, ReasoningEffort::low, ReasoningEffort::medium,
                 ReasoningEffort::high}) {
    EXPECT_EQ(parse_effort(to_string(e)), e);
  }
  EXPECT_FALSE(parse_effort("max").has_value());
}

TEST(Core, ValidateSpecAcceptsDefaults) { EXPECT_TRUE(validate_spec(StrategySpec{}).empty()); }

TEST(Core, ValidateSpecRejectsEachBadKnob) {
  StrategySpec s;
  s.shots = 1;
  EXPECT_EQ(validate_spec(s).size(), 1u);
  s = {};
  s.e2a_max_k = 0;
  EXPECT_EQ(validate_spec(s).size(), 1u);
  s = {};
  s.qag_question_range = {5, 4};
  EXPECT_EQ(validate_spec(s).size(), 1u);
  s = {};
  s.qag_question_range = {0, 4};
  EXPECT_EQ(validate_spec(s).size(), 1u);
  s = {};
  s.sc_n = 1;
  EXPECT_EQ(validate_spec(s).size(), 1u);
  s = {};
  s.ir_max_iters = 0;
  EXPECT_EQ(validate_spec(s).size(), 1u);
}

TEST(Core, MethodLabelAddsEffort) {
  StrategySpec s;
  EXPECT_EQ(method_label(s), "vanilla");
  s.reasoning_effort = ReasoningEffort::high;
  EXPECT_EQ(method_label(s), "vanilla@high");
}

TEST(Core, SummaryResultJsonRoundTrip) {
  SummaryResult r;
  r.sample_id = "s1";
  r.dataset_id = "cnn_dm";
  r.strategy_spec.strategy = StrategyId::qag;
  r.strategy_spec.qag_question_range = {3, 5};
  r.summary = "A summary.";
  StageRecord st;
  st.stage_name = "qag_questions";
  st.prompt_messages = {{Role::user, "hi"}};
  st.raw_response = "{\"questions\": []}";
  st.parsed_payload = json{{"questions", json::array()}};
  st.prompt_tokens = 3;
  st.flags = {"reask"};
  r.trace.stages = {st};
  r.created_at = "2026-01-01T00:00:00Z";

  const json j = r;
  EXPECT_EQ(j.at("trace").at("total_calls"), 1);
  EXPECT_EQ(j.get<SummaryResult>(), r);
}

TEST(Core, TraceTotalCallsMustMatchStages) {
  json j = PipelineTrace{};
  j["total_calls"] = 2;
  EXPECT_THROW(j.get<PipelineTrace>(), Error);
}

TEST(Core, StrategySpecJsonRejectsUnknownStrategy) {
  json j{{"strategy", "nope"}};
  try {
    (void)j.get<StrategySpec>();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
  }
}

TEST(Core, Fnv1aPublishedVectors) {
  EXPECT_EQ(hex64(fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
  EXPECT_EQ(hex64(fnv1a64("foobar")), "85944171f73967e8");
}

TEST(Core, TraceHasFlag) {
  PipelineTrace t;
  t.stages.resize(2);
  t.stages[1].flags = {"schema_violation"};
  EXPECT_TRUE(t.has_flag("schema_violation"));
  EXPECT_FALSE(t.has_flag("reask"));
}

TEST(Core, ErrorMessageCarriesCode) {
  Error e(ErrorCode::budget_exceeded, "out of calls");
  EXPECT_EQ(std::string(e.what()), "budget_exceeded: out of calls");
}

TEST(Core, TimestampIsUtcIso8601) {
  const auto ts = utc_timestamp();
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts[4], '-');
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}
