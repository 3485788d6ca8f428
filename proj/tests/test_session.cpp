#include <gtest/gtest.h>

#include "reasonsum/mock_provider.hpp"
#include "reasonsum/session.hpp"

using namespace reasonsum;
using namespace reasonsum::provider;

namespace {

// Accepts objects with an integer "n".
payloads::Checked<int> check_n(const json& j) {
  payloads::Checked<int> out;
  if (j.is_object() && j.contains("n") && j["n"].is_number_integer()) {
    out.value = j["n"].get<int>();
    if (*out.value > 9) out.flags.push_back("large_n");
  } else {
    out.violations.push_back("n must be an integer");
  }
  return out;
}

struct Fixture {
  explicit Fixture(json script, StageSettings settings = {})
      : mock(std::make_shared<MockTransport>(MockScript::from_json(script))),
        gateway(mock, nullptr),
        session(gateway, std::move(settings)) {}

  std::shared_ptr<MockTransport> mock;
  Gateway gateway;
  Session session;
};

std::vector<ChatMessage> ask() { return {{Role::user, "Give n."}}; }

}  // namespace

TEST(Session, TextStageRecordsTrace) {
  Fixture f(json{{"stages", {{"s", {{"text", "hi"}, {"prompt_tokens", 4}, {"completion_tokens", 1}}}}}});
  EXPECT_EQ(f.session.text("s", ask()), "hi");
  const auto& st = f.session.trace().stages.at(0);
  EXPECT_EQ(st.stage_name, "s");
  EXPECT_EQ(st.raw_response, "hi");
  EXPECT_EQ(st.prompt_tokens, 4);
  EXPECT_EQ(st.prompt_messages, ask());
  EXPECT_TRUE(st.flags.empty());
  EXPECT_EQ(f.mock->requests()[0].response_kind, ResponseKind::free_text);
}

TEST(Session, StructuredAcceptsFirstValidPayload) {
  Fixture f(json{{"stages", {{"s", "Here you go: {\"n\": 12}"}}}});
  EXPECT_EQ(f.session.structured<int>("s", ask(), check_n), 12);
  const auto& st = f.session.trace().stages.at(0);
  EXPECT_EQ(st.parsed_payload, (json{{"n", 12}}));
  EXPECT_EQ(st.flags, std::vector<std::string>{"large_n"});
  EXPECT_EQ(f.mock->requests()[0].response_kind, ResponseKind::json_object);
}

TEST(Session, ReasksOnceWithReasons) {
  Fixture f(json{{"stages", {{"s", json::array({"{\"n\": \"x\"}", "{\"n\": 3}"})}}}});
  EXPECT_EQ(f.session.structured<int>("s", ask(), check_n), 3);
  const auto& stages = f.session.trace().stages;
  ASSERT_EQ(stages.size(), 2u);
  EXPECT_EQ(stages[0].flags, std::vector<std::string>{"schema_violation"});
  EXPECT_EQ(stages[1].flags, std::vector<std::string>{"reask"});

  const auto second = f.mock->requests().at(1).messages;
  ASSERT_EQ(second.size(), 3u);
  EXPECT_EQ(second[1].role, Role::assistant);
  EXPECT_EQ(second[1].text, "{\"n\": \"x\"}");
  EXPECT_EQ(second[2].text, std::string(Session::kReaskPrefix) +
                                "n must be an integer. Return ONLY a corrected JSON object.");
}

TEST(Session, SecondFailureIsSchemaViolation) {
  Fixture f(json{{"stages", {{"s", json::array({"no json at all", "{\"m\": 1}", "{\"n\": 1}"})}}}});
  try {
    f.session.structured<int>("s", ask(), check_n);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::schema_violation);
    EXPECT_NE(std::string(e.what()).find("s: n must be an integer"), std::string::npos);
  }
  EXPECT_EQ(f.mock->request_count(), 2u);
  const auto& stages = f.session.trace().stages;
  ASSERT_EQ(stages.size(), 2u);
  EXPECT_EQ(stages[1].flags, (std::vector<std::string>{"reask", "schema_violation"}));
  const auto reask = f.mock->requests().at(1).messages.back().text;
  EXPECT_NE(reask.find("contained no JSON object"), std::string::npos);
}

TEST(Session, StageModelOverrides) {
  StageSettings settings;
  settings.stage_models = {{"", "default-model"}, {"judge", "judge-model"}};
  Fixture f(json{{"fallback", "echo"}}, settings);
  f.session.text("judge", ask());
  f.session.text("other", ask());
  EXPECT_EQ(f.mock->requests()[0].model, "judge-model");
  EXPECT_EQ(f.mock->requests()[1].model, "default-model");
}

TEST(Session, EffortAndTemperatureOverride) {
  StageSettings settings;
  settings.effort = ReasoningEffort::low;
  Fixture f(json{{"fallback", "echo"}}, settings);
  f.session.text("s", ask(), 0.7);
  const auto r = f.mock->requests()[0];
  EXPECT_EQ(r.reasoning_effort, ReasoningEffort::low);
  EXPECT_EQ(r.temperature, 0.7);
  EXPECT_EQ(r.max_output_tokens, 10000);
}

TEST(Session, NonStopFinishIsFlagged) {
  Fixture f(json{{"stages", {{"s", {{"text", "cut"}, {"finish_reason", "length"}}}}}});
  f.session.text("s", ask());
  EXPECT_EQ(f.session.trace().stages[0].flags, std::vector<std::string>{"finish_reason=length"});
}

TEST(Session, FlagTouchesLastRecord) {
  Fixture f(json{{"fallback", "echo"}});
  f.session.flag("ignored");  // no stage yet
  f.session.text("a", ask());
  f.session.text("b", ask());
  f.session.flag("mark");
  EXPECT_TRUE(f.session.trace().stages[0].flags.empty());
  EXPECT_EQ(f.session.trace().stages[1].flags, std::vector<std::string>{"mark"});
  EXPECT_EQ(f.session.take_trace().stages.size(), 2u);
}

TEST(Session, TransportErrorsPropagateWithoutRecord) {
  Fixture f(json{{"stages", {{"s", {{"error", "fatal"}}}}}});
  EXPECT_THROW(f.session.structured<int>("s", ask(), check_n), TransportFailure);
  EXPECT_TRUE(f.session.trace().stages.empty());
}
