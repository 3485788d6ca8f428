#include "reasonsum/strategies.hpp"

#include <algorithm>

#include "reasonsum/payloads.hpp"
#include "reasonsum/textproc.hpp"

namespace reasonsum::strategies {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

void require(const StrategySpec& spec, StrategyId expected) {
  if (spec.strategy != expected) {
    throw Error(ErrorCode::invalid_argument, "spec is for '" + std::string(to_string(spec.strategy)) +
                                                 "', not '" + std::string(to_string(expected)) + "'");
  }
  const auto violations = validate_spec(spec);
  if (!violations.empty()) throw Error(ErrorCode::invalid_argument, violations.front());
}

std::span<const prompts::Exemplar> shots_for(const PipelineInput& input, const StrategySpec& spec) {
  if (spec.shots == 0) return {};
  if (input.exemplars.size() < static_cast<std::size_t>(spec.shots)) {
    throw Error(ErrorCode::insufficient_train_data,
                "a " + std::to_string(spec.shots) + "-shot run needs " + std::to_string(spec.shots) +
                    " exemplars, got " + std::to_string(input.exemplars.size()));
  }
  return std::span(input.exemplars).first(static_cast<std::size_t>(spec.shots));
}

std::vector<std::string> sentences_of(const SampleRecord& sample) {
  auto sentences = text::split_sentences(sample.document);
  if (sentences.empty()) {
    throw Error(ErrorCode::empty_document, "sample '" + sample.sample_id + "' has no sentences");
  }
  return sentences;
}

Session open_session(provider::Gateway& gateway, const StrategySpec& spec,
                     const PipelineOptions& options) {
  return Session(gateway, StageSettings{options.decoding, spec.reasoning_effort, options.stage_models});
}

SummaryResult finish(const PipelineInput& input, const StrategySpec& spec, Session& session,
                     std::string_view raw_summary) {
  SummaryResult result;
  result.sample_id = input.sample.sample_id;
  result.dataset_id = input.sample.dataset_id;
  result.strategy_spec = spec;
  result.summary = trim(raw_summary);
  result.trace = session.take_trace();
  result.created_at = utc_timestamp();
  if (result.summary.empty()) {
    throw Error(ErrorCode::empty_summary, std::string(to_string(spec.strategy)) +
                                              " produced a blank summary for '" +
                                              input.sample.sample_id + "'");
  }
  return result;
}

std::string stage(StrategyId strategy, std::string_view name) {
  return prompts::template_name(strategy, name);
}

bool mentions(std::string_view text, std::initializer_list<std::string_view> words) {
  for (const auto& token : text::tokenize(text)) {
    if (std::find(words.begin(), words.end(), token) != words.end()) return true;
  }
  return false;
}

}  // namespace

SummaryResult run_vanilla(const PipelineInput& input, const StrategySpec& spec,
                          provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::vanilla);
  auto session = open_session(gateway, spec, options);
  auto messages = prompts::assemble_prompt(StrategyId::vanilla, "summarize", input.sample.document,
                                           shots_for(input, spec));
  const auto summary = session.text(stage(StrategyId::vanilla, "summarize"), std::move(messages));
  return finish(input, spec, session, summary);
}

SummaryResult run_cot(const PipelineInput& input, const StrategySpec& spec,
                      provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::cot);
  auto session = open_session(gateway, spec, options);
  auto messages = prompts::assemble_prompt(
      StrategyId::cot, "summarize", input.sample.document, shots_for(input, spec),
      {{"reasoning_guidance", prompts::reasoning_guidance(input.domain)}});
  const auto summary = session.text(stage(StrategyId::cot, "summarize"), std::move(messages));
  return finish(input, spec, session, summary);
}

SummaryResult run_e2a(const PipelineInput& input, const StrategySpec& spec,
                      provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::e2a);
  const auto sentences = sentences_of(input.sample);
  auto session = open_session(gateway, spec, options);

  auto extract = prompts::assemble_prompt(StrategyId::e2a, "extract", input.sample.document);
  const auto extraction = session.structured<payloads::Extraction>(
      stage(StrategyId::e2a, "extract"), std::move(extract), [&](const json& payload) {
        return payloads::check_extraction(payload, sentences, spec.e2a_max_k);
      });

  auto abstract = prompts::assemble_prompt(
      StrategyId::e2a, "abstract", input.sample.document, shots_for(input, spec),
      {{"evidence_json", prompts::dump(payloads::evidence_json(extraction))}});
  const auto summary = session.text(stage(StrategyId::e2a, "abstract"), std::move(abstract));
  return finish(input, spec, session, summary);
}

SummaryResult run_qag(const PipelineInput& input, const StrategySpec& spec,
                      provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::qag);
  auto session = open_session(gateway, spec, options);

  auto ask = prompts::assemble_prompt(StrategyId::qag, "questions", input.sample.document);
  const auto questions = session.structured<std::vector<payloads::Question>>(
      stage(StrategyId::qag, "questions"), std::move(ask), [&](const json& payload) {
        return payloads::check_questions(payload, spec.qag_question_range);
      });

  // One answering call per question.
  std::vector<payloads::Answer> table;
  for (const auto& question : questions) {
    const std::span<const payloads::Question> asked(&question, 1);
    auto messages = prompts::assemble_prompt(
        StrategyId::qag, "answer", input.sample.document, {},
        {{"questions_json", prompts::dump(payloads::questions_json(asked))}});
    auto answers = session.structured<std::vector<payloads::Answer>>(
        stage(StrategyId::qag, "answer"), std::move(messages),
        [&](const json& payload) { return payloads::check_answers(payload, asked); });
    for (auto& answer : answers) {
      if (answer.confidence >= options.qag_min_confidence) table.push_back(std::move(answer));
    }
  }

  auto summarize = prompts::assemble_prompt(
      StrategyId::qag, "summarize", input.sample.document, shots_for(input, spec),
      {{"qa_table", prompts::dump(payloads::answers_json(table))}});
  const auto summary = session.text(stage(StrategyId::qag, "summarize"), std::move(summarize));
  return finish(input, spec, session, summary);
}

SummaryResult run_cite(const PipelineInput& input, const StrategySpec& spec,
                       provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::cite);
  const auto sentences = sentences_of(input.sample);
  auto session = open_session(gateway, spec, options);
  auto messages = prompts::assemble_prompt(StrategyId::cite, "summarize", input.sample.document,
                                           shots_for(input, spec),
                                           {{"sentences_json", prompts::dump(json(sentences))}});
  const auto cited = session.structured<payloads::CitedSummary>(
      stage(StrategyId::cite, "summarize"), std::move(messages),
      [&](const json& payload) { return payloads::check_cited_summary(payload, sentences.size()); });
  return finish(input, spec, session, cited.summary_text);
}

SummaryResult run_deco(const PipelineInput& input, const StrategySpec& spec,
                       provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::deco);
  const auto sentence_count = text::split_sentences(input.sample.document).size();
  auto session = open_session(gateway, spec, options);

  auto decompose = prompts::assemble_prompt(StrategyId::deco, "chunk", input.sample.document);
  const auto plan = session.structured<payloads::ChunkPlan>(
      stage(StrategyId::deco, "chunk"), std::move(decompose),
      [&](const json& payload) { return payloads::check_chunk_plan(payload, sentence_count); });

  // The merge stage sees only the chunk summaries and contexts.
  auto merge = prompts::assemble_prompt(
      StrategyId::deco, "merge", {}, shots_for(input, spec),
      {{"chunk_summaries", prompts::dump(payloads::chunk_summaries_json(plan))},
       {"chunk_contexts", prompts::dump(payloads::chunk_contexts_json(plan))}});
  const auto summary = session.text(stage(StrategyId::deco, "merge"), std::move(merge));
  if (mentions(summary, {"chunk", "chunks"})) session.flag("mentions_chunk");
  if (mentions(summary, {"document", "documents"})) session.flag("mentions_document");
  return finish(input, spec, session, summary);
}

SummaryResult run_plan(const PipelineInput& input, const StrategySpec& spec,
                       provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::plan);
  auto session = open_session(gateway, spec, options);

  auto plan_prompt = prompts::assemble_prompt(StrategyId::plan, "plan", input.sample.document);
  const auto plan = session.structured<payloads::WritePlan>(
      stage(StrategyId::plan, "plan"), std::move(plan_prompt),
      [](const json& payload) { return payloads::check_write_plan(payload); });

  auto write = prompts::assemble_prompt(StrategyId::plan, "write", input.sample.document,
                                        shots_for(input, spec),
                                        {{"domain", plan.domain},
                                         {"style", plan.style},
                                         {"salient_info", text::join(plan.salient_info, "; ")},
                                         {"length_guidance", plan.length_guidance},
                                         {"plan_json", prompts::dump(payloads::to_json(plan))}});
  const auto summary = session.text(stage(StrategyId::plan, "write"), std::move(write));
  return finish(input, spec, session, summary);
}

SummaryResult run_ir(const PipelineInput& input, const StrategySpec& spec,
                     provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::ir);
  auto session = open_session(gateway, spec, options);

  auto draft = prompts::assemble_prompt(StrategyId::ir, "draft", input.sample.document,
                                        shots_for(input, spec));
  auto current = trim(session.text(stage(StrategyId::ir, "draft"), std::move(draft)));
  if (current.empty()) {
    throw Error(ErrorCode::empty_summary, "ir draft is blank for '" + input.sample.sample_id + "'");
  }

  for (int iteration = 1; iteration <= spec.ir_max_iters; ++iteration) {
    const auto evaluation = judge::ir_evaluate(session, input.sample.document, current);
    if (evaluation.terminal()) break;
    auto revise = prompts::assemble_prompt(
        StrategyId::ir, "revise", input.sample.document, {},
        {{"current_summary", current},
         {"evaluation_json", prompts::dump(payloads::to_json(evaluation))}});
    auto revised = trim(session.text(stage(StrategyId::ir, "revise"), std::move(revise)));
    if (revised.empty()) {
      throw Error(ErrorCode::empty_summary,
                  "ir revision " + std::to_string(iteration) + " is blank for '" +
                      input.sample.sample_id + "'");
    }
    current = std::move(revised);
  }
  return finish(input, spec, session, current);
}

SummaryResult run_sc(const PipelineInput& input, const StrategySpec& spec,
                     provider::Gateway& gateway, const PipelineOptions& options) {
  require(spec, StrategyId::sc);
  auto session = open_session(gateway, spec, options);

  std::vector<std::string> candidates;
  for (int i = 0; i < spec.sc_n; ++i) {
    auto messages = prompts::assemble_prompt(StrategyId::sc, "candidate", input.sample.document,
                                             shots_for(input, spec));
    candidates.push_back(trim(session.text(stage(StrategyId::sc, "candidate"), std::move(messages),
                                           options.decoding.sc_temperature)));
  }
  const auto verdict = judge::judge_select(session, input.sample.document, candidates, options.weights);
  return finish(input, spec, session, candidates[verdict.winner_index]);
}

SummaryResult run_strategy(const PipelineInput& input, const StrategySpec& spec,
                           provider::Gateway& gateway, const PipelineOptions& options) {
  switch (spec.strategy) {
    case StrategyId::vanilla: return run_vanilla(input, spec, gateway, options);
    case StrategyId::cot: return run_cot(input, spec, gateway, options);
    case StrategyId::e2a: return run_e2a(input, spec, gateway, options);
    case StrategyId::qag: return run_qag(input, spec, gateway, options);
    case StrategyId::cite: return run_cite(input, spec, gateway, options);
    case StrategyId::deco: return run_deco(input, spec, gateway, options);
    case StrategyId::plan: return run_plan(input, spec, gateway, options);
    case StrategyId::ir: return run_ir(input, spec, gateway, options);
    case StrategyId::sc: return run_sc(input, spec, gateway, options);
  }
  throw Error(ErrorCode::invalid_argument, "unknown strategy");
}

std::pair<int, int> expected_calls(const StrategySpec& spec) {
  switch (spec.strategy) {
    case StrategyId::vanilla:
    case StrategyId::cot:
    case StrategyId::cite: return {1, 1};
    case StrategyId::e2a:
    case StrategyId::deco:
    case StrategyId::plan: return {2, 2};
    case StrategyId::qag:
      return {spec.qag_question_range.first + 2, spec.qag_question_range.second + 2};
    case StrategyId::ir: return {2, 1 + 2 * spec.ir_max_iters};
    case StrategyId::sc: return {spec.sc_n + 1, spec.sc_n + 1};
  }
  return {0, 0};
}

}  // namespace reasonsum::strategies
