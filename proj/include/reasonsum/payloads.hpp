#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "reasonsum/core.hpp"

// Typed views of the JSON payloads that structured pipeline stages return,
// with validators that enforce every payload invariant before anything is
// handed to a downstream stage.
namespace reasonsum::payloads {

/// Outcome of validating one payload. `value` is set iff `violations` is
/// empty. `flags` carries repairs and soft warnings that do not fail the stage.
template <typename T>
struct Checked {
  std::optional<T> value;
  std::vector<std::string> violations;
  std::vector<std::string> flags;

  bool ok() const noexcept { return violations.empty() && value.has_value(); }
};

/// Extraction budget policy for a document with `n` sentences:
/// min(n, 3) up to 6 sentences, ceil(n / 5) clamped to [3, cap] up to 60,
/// `cap` (14) beyond that. Never exceeds n.
int e2a_expected_budget(int n, int cap = 14);

struct SelectedSentence {
  int index = 0;
  std::string text;
  bool operator==(const SelectedSentence&) const = default;
};

struct Extraction {
  int total_sentences = 0;
  int selected_budget = 0;
  std::vector<SelectedSentence> selected;
};

/// Indices are checked against the harness's own sentence split. A selected
/// text that is not verbatim at its index is replaced by the true sentence
/// and flagged `repaired_text@<index>`.
Checked<Extraction> check_extraction(const json& payload, std::span<const std::string> sentences,
                                     int max_k = 14);
json evidence_json(const Extraction& extraction);

inline constexpr std::array<std::string_view, 8> kFacets = {
    "topic", "key_pts", "entities", "timeline", "numbers", "outcomes", "challenges", "insights"};

struct Question {
  std::string id;
  std::string facet;
  std::string question;
};

struct Answer {
  std::string id;
  std::string question;
  std::string answer;
  int confidence = 0;
};

struct QASet {
  std::vector<Question> questions;
  std::vector<Answer> answers;
};

Checked<std::vector<Question>> check_questions(const json& payload, std::pair<int, int> range);
/// Every asked question must be answered; unknown ids are rejected.
Checked<std::vector<Answer>> check_answers(const json& payload, std::span<const Question> asked);
json questions_json(std::span<const Question> questions);
json answers_json(std::span<const Answer> answers);

struct Alignment {
  int summary_id = 0;
  std::vector<int> support;
  std::string importance_reason;
  int support_strength = 0;
};

struct CitedSummary {
  std::string summary_text;
  std::vector<Alignment> alignments;
};

Checked<CitedSummary> check_cited_summary(const json& payload, std::size_t sentence_count);

struct Chunk {
  std::string id;
  int start = 0;  // inclusive
  int end = 0;    // inclusive
  std::string summary;
  std::vector<std::string> contexts;
};

struct ChunkPlan {
  int total_sentences = 0;
  std::vector<Chunk> chunks;
};

/// Spans are inclusive sentence ranges that must tile [0, total_sentences)
/// in order: first.start == 0, next.start == prev.end + 1,
/// last.end == total_sentences - 1. `sentence_count` is the harness's own
/// split, used only to flag disagreement with the payload's total.
Checked<ChunkPlan> check_chunk_plan(const json& payload, std::optional<std::size_t> sentence_count = {});
json chunk_summaries_json(const ChunkPlan& plan);
json chunk_contexts_json(const ChunkPlan& plan);

struct WritePlan {
  std::string domain;
  std::string goal;
  std::string audience;
  std::string style;
  std::vector<std::string> salient_info;
  std::string length_guidance;
};

Checked<WritePlan> check_write_plan(const json& payload);
json to_json(const WritePlan& plan);

enum class SuggestionType { add, remove, rephrase, shorten, none };

std::string_view to_string(SuggestionType type) noexcept;

struct Suggestion {
  SuggestionType type = SuggestionType::none;
  std::string content;
  std::string evidence;
};

struct IREvaluation {
  int score = 0;
  std::vector<Suggestion> suggestions;
  bool stop = false;

  bool has_actionable() const noexcept;
  /// stop, or a perfect score with nothing actionable, or only "none"
  /// suggestions.
  bool terminal() const noexcept;
};

/// Rejects stop=true unless score == 5 or nothing actionable remains.
Checked<IREvaluation> check_ir_evaluation(const json& payload);
json to_json(const IREvaluation& evaluation);

}  // namespace reasonsum::payloads
