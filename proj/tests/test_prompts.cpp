#include <gtest/gtest.h>

#include <set>

#include "reasonsum/prompts.hpp"
#include "reasonsum/resources.hpp"

using namespace reasonsum;
using namespace reasonsum::prompts;

namespace {

const std::vector<std::string> kTemplates = {
    "vanilla_summarize", "cot_summarize", "e2a_extract", "e2a_abstract", "qag_questions", "qag_answer",
    "qag_summarize",     "cite_summarize", "deco_chunk", "deco_merge",   "plan_plan",     "plan_write",
    "ir_draft",          "ir_evaluate",   "ir_revise",  "sc_candidate", "sc_judge",      "geval_score"};

// Stages whose output is the summary itself; only these see exemplars.
const std::set<std::string> kFinalStages = {"vanilla_summarize", "cot_summarize", "e2a_abstract",
                                            "qag_summarize",     "cite_summarize", "deco_merge",
                                            "plan_write",        "ir_draft",      "sc_candidate"};

}  // namespace

TEST(Template, EveryStageTemplateLoads) {
  for (const auto& name : kTemplates) {
    const auto t = load_template(name);
    EXPECT_FALSE(t.empty()) << name;
    EXPECT_NE(t.back(), '\n') << name;
    EXPECT_EQ(t.find("%%"), std::string::npos) << name;
  }
}

TEST(Template, UnknownNameThrowsMissingTemplate) {
  try {
    load_template("nope_stage");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_template);
  }
}

TEST(Template, ExemplarSlotOnlyInFinalStages) {
  for (const auto& name : kTemplates) {
    const auto slots = slot_names(load_template(name));
    const bool has = std::find(slots.begin(), slots.end(), "exemplars") != slots.end();
    EXPECT_EQ(has, kFinalStages.count(name) == 1) << name;
  }
}

TEST(Template, EveryTemplateRendersWhenAllSlotsFilled) {
  for (const auto& name : kTemplates) {
    const auto tmpl = load_template(name);
    Slots slots;
    for (const auto& s : slot_names(tmpl)) slots[s] = "<" + s + ">";
    const auto out = render(tmpl, slots);
    EXPECT_EQ(out.find("{{"), std::string::npos) << name;
  }
}

TEST(Render, FillsInOrderAndIgnoresExtras) {
  EXPECT_EQ(render("a {{x}} b {{y}} {{x}}", {{"x", "1"}, {"y", "2"}, {"z", "3"}}), "a 1 b 2 1");
}

TEST(Render, ValuesAreNotRescanned) { EXPECT_EQ(render("{{x}}", {{"x", "{{y}}"}}), "{{y}}"); }

TEST(Render, MissingSlotNamesIt) {
  try {
    render("{{doc}} {{plan}}", {{"doc", "d"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::missing_slot);
    EXPECT_NE(std::string(e.what()).find("plan"), std::string::npos);
  }
}

TEST(Render, UnclosedBraceIsLiteral) { EXPECT_EQ(render("a {{b", {}), "a {{b"); }

TEST(SlotNames, FirstAppearanceOrderDeduplicated) {
  EXPECT_EQ(slot_names("{{b}} {{a}} {{b}}"), (std::vector<std::string>{"b", "a"}));
}

TEST(TemplateName, StrategyPrefix) {
  EXPECT_EQ(template_name(StrategyId::e2a, "extract"), "e2a_extract");
  EXPECT_EQ(template_name(StrategyId::sc, "judge"), "sc_judge");
}

TEST(Assemble, ZeroShotHasNoExemplarBlock) {
  const auto msgs = assemble_prompt(StrategyId::vanilla, "summarize", "The doc.");
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs[0].role, Role::user);
  EXPECT_NE(msgs[0].text.find("[Begin Document]\nThe doc.\n[End Document]"), std::string::npos);
  EXPECT_EQ(msgs[0].text.find("[Example"), std::string::npos);
}

TEST(Assemble, TwoShotPlacesExemplarsBeforeTarget) {
  const std::vector<Exemplar> ex = {{"Doc one.", "Sum one."}, {"Doc two.", "Sum two."}};
  const auto text = assemble_prompt(StrategyId::vanilla, "summarize", "Target.", ex)[0].text;
  const auto e1 = text.find("[Example 1]");
  const auto e2 = text.find("[Example 2]");
  const auto target = text.find("Target.");
  ASSERT_NE(e1, std::string::npos);
  ASSERT_NE(e2, std::string::npos);
  EXPECT_LT(e1, e2);
  EXPECT_LT(e2, target);
  EXPECT_NE(text.find("SUMMARY: Sum two."), std::string::npos);
}

TEST(Assemble, IntermediateStageIgnoresExemplars) {
  const std::vector<Exemplar> ex = {{"Doc one.", "Sum one."}};
  const auto text = assemble_prompt(StrategyId::e2a, "extract", "Target.", ex)[0].text;
  EXPECT_EQ(text.find("Sum one."), std::string::npos);
}

TEST(Assemble, MissingPayloadSlotThrows) {
  EXPECT_THROW(assemble_prompt(StrategyId::e2a, "abstract", "Doc."), Error);
}

TEST(ExemplarBlock, EmptyForNoExemplars) { EXPECT_EQ(exemplar_block({}), ""); }

TEST(Guidance, KnownAndFallbackDomains) {
  const auto news = reasoning_guidance("news");
  const auto generic = reasoning_guidance("generic");
  EXPECT_FALSE(news.empty());
  EXPECT_NE(news, generic);
  EXPECT_EQ(reasoning_guidance("astrology"), generic);
}

TEST(Checksums, CoverTemplatesAndCotBlocks) {
  const auto sums = template_checksums();
  EXPECT_EQ(sums.size(), kTemplates.size() + resources::list("cot/").size());
  EXPECT_EQ(sums.at("prompts/vanilla_summarize.txt"),
            hex64(fnv1a64(resources::get("prompts/vanilla_summarize.txt"))));
  EXPECT_EQ(sums.at("prompts/vanilla_summarize.txt").size(), 16u);
}

TEST(Dump, CompactJson) { EXPECT_EQ(dump(json{{"a", json::array({1, 2})}}), "{\"a\":[1,2]}"); }
