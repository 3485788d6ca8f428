#include "reasonsum/payloads.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "reasonsum/textproc.hpp"

namespace reasonsum::payloads {

namespace {

using Violations = std::vector<std::string>;

std::optional<long long> as_integer(const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d) return static_cast<long long>(d);
  }
  return std::nullopt;
}

const json* member(const json& obj, const char* key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::optional<long long> int_field(const json& obj, const char* key, const std::string& path,
                                   Violations& out) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    out.push_back(path + "." + key + " is missing");
    return std::nullopt;
  }
  auto value = as_integer(*v);
  if (!value) out.push_back(path + "." + key + " must be an integer");
  return value;
}

std::optional<std::string> string_field(const json& obj, const char* key, const std::string& path,
                                        Violations& out, bool non_empty) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    out.push_back(path + "." + key + " is missing");
    return std::nullopt;
  }
  if (!v->is_string()) {
    out.push_back(path + "." + key + " must be a string");
    return std::nullopt;
  }
  auto s = v->get<std::string>();
  if (non_empty && text::normalize_whitespace(s).empty()) {
    out.push_back(path + "." + key + " must not be empty");
    return std::nullopt;
  }
  return s;
}

const json* array_field(const json& obj, const char* key, const std::string& path, Violations& out) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    out.push_back(path + "." + key + " is missing");
    return nullptr;
  }
  if (!v->is_array()) {
    out.push_back(path + "." + key + " must be an array");
    return nullptr;
  }
  return v;
}

// Ids are accepted as strings or integers and kept in string form.
std::optional<std::string> id_field(const json& obj, const char* key, const std::string& path,
                                    Violations& out) {
  const json* v = member(obj, key);
  if (v == nullptr) {
    out.push_back(path + "." + key + " is missing");
    return std::nullopt;
  }
  if (v->is_string()) return v->get<std::string>();
  if (auto n = as_integer(*v)) return std::to_string(*n);
  out.push_back(path + "." + key + " must be a string or integer");
  return std::nullopt;
}

bool require_object(const json& payload, Violations& out) {
  if (!payload.is_object()) {
    out.emplace_back("payload must be a JSON object");
    return false;
  }
  return true;
}

std::string at(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

}  // namespace

int e2a_expected_budget(int n, int cap) {
  if (n <= 0) return 0;
  int k = 0;
  if (n <= 6) {
    k = std::min(n, 3);
  } else if (n > 60) {
    k = cap;
  } else {
    k = std::clamp((n + 4) / 5, 3, cap);
  }
  return std::min(k, n);
}

Checked<Extraction> check_extraction(const json& payload, std::span<const std::string> sentences,
                                     int max_k) {
  Checked<Extraction> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;
  const auto n = static_cast<long long>(sentences.size());

  Extraction extraction;
  const json* stats = member(payload, "stats");
  if (stats == nullptr || !stats->is_object()) {
    bad.emplace_back("stats must be an object with total_sentences and selected_budget");
  } else {
    auto total = int_field(*stats, "total_sentences", "stats", bad);
    auto budget = int_field(*stats, "selected_budget", "stats", bad);
    if (total) {
      extraction.total_sentences = static_cast<int>(*total);
      if (*total != n) result.flags.push_back("total_sentences_mismatch");
    }
    if (budget) extraction.selected_budget = static_cast<int>(*budget);
  }

  if (const json* selected = array_field(payload, "selected", "payload", bad)) {
    if (selected->empty()) bad.emplace_back("selected must contain at least one sentence");
    long long previous = -1;
    for (std::size_t i = 0; i < selected->size(); ++i) {
      const auto path = at("selected", i);
      const json& item = (*selected)[i];
      if (!item.is_object()) {
        bad.push_back(path + " must be an object");
        continue;
      }
      auto index = int_field(item, "index", path, bad);
      auto sentence = string_field(item, "text", path, bad, false);
      if (!index) continue;
      if (*index < 0 || *index >= n) {
        bad.push_back(path + ".index " + std::to_string(*index) + " is outside [0, " +
                      std::to_string(n) + ")");
        continue;
      }
      if (*index <= previous) bad.push_back(path + ".index must be strictly increasing");
      previous = *index;
      const auto& truth = sentences[static_cast<std::size_t>(*index)];
      if (sentence && *sentence != truth) {
        result.flags.push_back("repaired_text@" + std::to_string(*index));
      }
      extraction.selected.push_back({static_cast<int>(*index), truth});
    }
    if (stats != nullptr && stats->is_object() && bad.empty() &&
        extraction.selected_budget != static_cast<int>(selected->size())) {
      bad.push_back("stats.selected_budget " + std::to_string(extraction.selected_budget) +
                    " must equal the number of selected sentences (" +
                    std::to_string(selected->size()) + ")");
    }
  }

  if (!bad.empty()) return result;
  const int k = static_cast<int>(extraction.selected.size());
  if (k > max_k) result.flags.push_back("exceeds_e2a_max_k");
  if (k != e2a_expected_budget(static_cast<int>(n), max_k)) {
    result.flags.push_back("budget_differs_from_policy");
  }
  result.value = std::move(extraction);
  return result;
}

json evidence_json(const Extraction& extraction) {
  json out = json::array();
  for (const auto& s : extraction.selected) out.push_back({{"index", s.index}, {"text", s.text}});
  return out;
}

Checked<std::vector<Question>> check_questions(const json& payload, std::pair<int, int> range) {
  Checked<std::vector<Question>> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;
  const json* items = array_field(payload, "questions", "payload", bad);
  if (items == nullptr) return result;

  const auto count = static_cast<int>(items->size());
  if (count < range.first || count > range.second) {
    bad.push_back("expected " + std::to_string(range.first) + "–" + std::to_string(range.second) +
                  " questions, got " + std::to_string(count));
  }
  std::vector<Question> questions;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const auto path = at("questions", i);
    const json& item = (*items)[i];
    if (!item.is_object()) {
      bad.push_back(path + " must be an object");
      continue;
    }
    auto id = id_field(item, "id", path, bad);
    auto facet = string_field(item, "facet", path, bad, true);
    auto question = string_field(item, "question", path, bad, true);
    if (id && !seen.insert(*id).second) bad.push_back(path + ".id '" + *id + "' is duplicated");
    if (facet && std::find(kFacets.begin(), kFacets.end(), *facet) == kFacets.end()) {
      bad.push_back(path + ".facet '" + *facet + "' is not a known facet");
    }
    if (id && facet && question) questions.push_back({*id, *facet, *question});
  }
  if (bad.empty()) result.value = std::move(questions);
  return result;
}

Checked<std::vector<Answer>> check_answers(const json& payload, std::span<const Question> asked) {
  Checked<std::vector<Answer>> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;
  const json* items = array_field(payload, "answers", "payload", bad);
  if (items == nullptr) return result;

  std::vector<Answer> answers;
  std::set<std::string> answered;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const auto path = at("answers", i);
    const json& item = (*items)[i];
    if (!item.is_object()) {
      bad.push_back(path + " must be an object");
      continue;
    }
    auto id = id_field(item, "id", path, bad);
    auto answer = string_field(item, "answer", path, bad, false);
    auto confidence = int_field(item, "confidence", path, bad);
    if (confidence && (*confidence < 1 || *confidence > 5)) {
      bad.push_back(path + ".confidence " + std::to_string(*confidence) + " is outside [1, 5]");
    }
    if (!id) continue;
    auto source = std::find_if(asked.begin(), asked.end(),
                               [&](const Question& q) { return q.id == *id; });
    if (source == asked.end()) {
      bad.push_back(path + ".id '" + *id + "' does not match an asked question");
      continue;
    }
    std::string question = source->question;
    if (const json* q = member(item, "question"); q != nullptr && q->is_string()) {
      question = q->get<std::string>();
    } else {
      result.flags.push_back("question_text_filled@" + *id);
    }
    answered.insert(*id);
    if (answer && confidence) {
      answers.push_back({*id, std::move(question), *answer, static_cast<int>(*confidence)});
    }
  }
  for (const auto& q : asked) {
    if (!answered.count(q.id)) bad.push_back("question '" + q.id + "' has no answer");
  }
  if (bad.empty()) result.value = std::move(answers);
  return result;
}

json questions_json(std::span<const Question> questions) {
  json out = json::array();
  for (const auto& q : questions) {
    out.push_back({{"id", q.id}, {"facet", q.facet}, {"question", q.question}});
  }
  return out;
}

json answers_json(std::span<const Answer> answers) {
  json out = json::array();
  for (const auto& a : answers) {
    out.push_back({{"id", a.id}, {"question", a.question}, {"answer", a.answer},
                   {"confidence", a.confidence}});
  }
  return out;
}

Checked<CitedSummary> check_cited_summary(const json& payload, std::size_t sentence_count) {
  Checked<CitedSummary> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;

  CitedSummary cited;
  auto summary = string_field(payload, "summary_text", "payload", bad, true);
  if (summary) cited.summary_text = *summary;
  const json* items = array_field(payload, "alignments", "payload", bad);
  if (items != nullptr && items->empty()) bad.emplace_back("alignments must not be empty");

  const auto n = static_cast<long long>(sentence_count);
  std::vector<long long> summary_ids;
  if (items != nullptr) {
    for (std::size_t i = 0; i < items->size(); ++i) {
      const auto path = at("alignments", i);
      const json& item = (*items)[i];
      if (!item.is_object()) {
        bad.push_back(path + " must be an object");
        continue;
      }
      Alignment alignment;
      auto sid = int_field(item, "summary_id", path, bad);
      if (sid) summary_ids.push_back(*sid);
      if (const json* support = array_field(item, "support", path, bad)) {
        if (support->empty() || support->size() > 3) {
          bad.push_back(path + ".support must list 1–3 sentence indices, got " +
                        std::to_string(support->size()));
        }
        for (std::size_t k = 0; k < support->size(); ++k) {
          auto idx = as_integer((*support)[k]);
          if (!idx) {
            bad.push_back(at(path + ".support", k) + " must be an integer");
          } else if (*idx < 0 || *idx >= n) {
            bad.push_back(at(path + ".support", k) + " index " + std::to_string(*idx) +
                          " is outside [0, " + std::to_string(n) + ")");
          } else {
            alignment.support.push_back(static_cast<int>(*idx));
          }
        }
      }
      auto reason = string_field(item, "importance_reason", path, bad, false);
      auto strength = int_field(item, "support_strength", path, bad);
      if (strength && (*strength < 1 || *strength > 5)) {
        bad.push_back(path + ".support_strength " + std::to_string(*strength) +
                      " is outside [1, 5]");
      }
      if (sid) alignment.summary_id = static_cast<int>(*sid);
      if (reason) alignment.importance_reason = *reason;
      if (strength) alignment.support_strength = static_cast<int>(*strength);
      cited.alignments.push_back(std::move(alignment));
    }
  }

  if (summary && !summary_ids.empty()) {
    // Models number summary sentences either from 0 or from 1; both are
    // accepted as long as every id addresses a sentence under one convention.
    const auto m = static_cast<long long>(text::split_sentences(*summary).size());
    const auto [lo, hi] = std::minmax_element(summary_ids.begin(), summary_ids.end());
    if (*lo >= 0 && *hi < m) {
      // zero-based
    } else if (*lo >= 1 && *hi <= m) {
      result.flags.push_back("one_based_summary_ids");
    } else {
      bad.push_back("summary_id values must address one of the " + std::to_string(m) +
                    " summary sentences");
    }
  }
  if (bad.empty()) result.value = std::move(cited);
  return result;
}

Checked<ChunkPlan> check_chunk_plan(const json& payload, std::optional<std::size_t> sentence_count) {
  Checked<ChunkPlan> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;

  ChunkPlan plan;
  std::optional<long long> declared_chunks;
  const json* stats = member(payload, "doc_stats");
  if (stats == nullptr || !stats->is_object()) {
    bad.emplace_back("doc_stats must be an object with total_sentences and chunk_count");
  } else {
    auto total = int_field(*stats, "total_sentences", "doc_stats", bad);
    declared_chunks = int_field(*stats, "chunk_count", "doc_stats", bad);
    if (total) {
      if (*total < 1) bad.emplace_back("doc_stats.total_sentences must be at least 1");
      plan.total_sentences = static_cast<int>(*total);
      if (sentence_count && static_cast<long long>(*sentence_count) != *total) {
        result.flags.push_back("total_sentences_mismatch");
      }
    }
  }

  const json* items = array_field(payload, "chunks", "payload", bad);
  if (items != nullptr) {
    if (items->empty()) bad.emplace_back("chunks must contain at least one chunk");
    if (declared_chunks && *declared_chunks != static_cast<long long>(items->size())) {
      bad.push_back("doc_stats.chunk_count " + std::to_string(*declared_chunks) +
                    " does not match the " + std::to_string(items->size()) + " chunks given");
    }
    long long expected_start = 0;
    for (std::size_t i = 0; i < items->size(); ++i) {
      const auto path = at("chunks", i);
      const json& item = (*items)[i];
      if (!item.is_object()) {
        bad.push_back(path + " must be an object");
        continue;
      }
      Chunk chunk;
      if (auto id = id_field(item, "id", path, bad)) chunk.id = *id;

      std::optional<long long> start, end;
      const json* span = member(item, "span");
      if (span == nullptr) {
        bad.push_back(path + ".span is missing");
      } else if (span->is_array() && span->size() == 2) {
        start = as_integer((*span)[0]);
        end = as_integer((*span)[1]);
        if (!start || !end) bad.push_back(path + ".span entries must be integers");
      } else if (span->is_object()) {
        start = int_field(*span, "start", path + ".span", bad);
        end = int_field(*span, "end", path + ".span", bad);
      } else {
        bad.push_back(path + ".span must be [start, end] or {start, end}");
      }
      if (start && end) {
        if (*start > *end) {
          bad.push_back(path + ".span start " + std::to_string(*start) + " exceeds end " +
                        std::to_string(*end));
        }
        if (*start < expected_start) {
          bad.push_back(path + ".span overlaps the previous chunk at " + std::to_string(*start));
        } else if (*start > expected_start) {
          bad.push_back(path + ".span leaves a gap before " + std::to_string(*start));
        }
        expected_start = *end + 1;
        chunk.start = static_cast<int>(*start);
        chunk.end = static_cast<int>(*end);
      }

      if (auto s = string_field(item, "summary", path, bad, true)) chunk.summary = *s;
      if (const json* contexts = array_field(item, "contexts", path, bad)) {
        if (contexts->size() < 3 || contexts->size() > 6) {
          bad.push_back(path + ".contexts must hold 3–6 entries, got " +
                        std::to_string(contexts->size()));
        }
        for (std::size_t k = 0; k < contexts->size(); ++k) {
          if (!(*contexts)[k].is_string()) {
            bad.push_back(at(path + ".contexts", k) + " must be a string");
          } else {
            chunk.contexts.push_back((*contexts)[k].get<std::string>());
          }
        }
      }
      plan.chunks.push_back(std::move(chunk));
    }
    if (plan.total_sentences > 0 && !items->empty() && expected_start != plan.total_sentences) {
      bad.push_back("chunk spans end at " + std::to_string(expected_start - 1) +
                    " but the document has " + std::to_string(plan.total_sentences) +
                    " sentences");
    }
  }
  if (bad.empty()) result.value = std::move(plan);
  return result;
}

json chunk_summaries_json(const ChunkPlan& plan) {
  json out = json::array();
  for (const auto& c : plan.chunks) out.push_back({{"id", c.id}, {"summary", c.summary}});
  return out;
}

json chunk_contexts_json(const ChunkPlan& plan) {
  json out = json::array();
  for (const auto& c : plan.chunks) out.push_back({{"id", c.id}, {"contexts", c.contexts}});
  return out;
}

Checked<WritePlan> check_write_plan(const json& payload) {
  Checked<WritePlan> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;

  WritePlan plan;
  auto read = [&](const char* key, std::string& out) {
    if (auto s = string_field(payload, key, "payload", bad, true)) out = *s;
  };
  read("domain", plan.domain);
  read("goal", plan.goal);
  read("audience", plan.audience);
  read("style", plan.style);
  read("length_guidance", plan.length_guidance);
  if (const json* salient = array_field(payload, "salient_info", "payload", bad)) {
    if (salient->size() < 3 || salient->size() > 5) {
      bad.push_back("salient_info must list 3–5 categories, got " + std::to_string(salient->size()));
    }
    for (std::size_t i = 0; i < salient->size(); ++i) {
      const json& item = (*salient)[i];
      if (!item.is_string() || text::normalize_whitespace(item.get<std::string>()).empty()) {
        bad.push_back(at("salient_info", i) + " must be a non-empty string");
      } else {
        plan.salient_info.push_back(item.get<std::string>());
      }
    }
  }
  if (bad.empty()) result.value = std::move(plan);
  return result;
}

json to_json(const WritePlan& plan) {
  return json{{"domain", plan.domain},           {"goal", plan.goal},
              {"audience", plan.audience},       {"style", plan.style},
              {"salient_info", plan.salient_info}, {"length_guidance", plan.length_guidance}};
}

std::string_view to_string(SuggestionType type) noexcept {
  switch (type) {
    case SuggestionType::add: return "add";
    case SuggestionType::remove: return "remove";
    case SuggestionType::rephrase: return "rephrase";
    case SuggestionType::shorten: return "shorten";
    case SuggestionType::none: return "none";
  }
  return "none";
}

namespace {
std::optional<SuggestionType> parse_suggestion_type(std::string_view s) {
  for (auto t : {SuggestionType::add, SuggestionType::remove, SuggestionType::rephrase,
                 SuggestionType::shorten, SuggestionType::none}) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}
}  // namespace

bool IREvaluation::has_actionable() const noexcept {
  return std::any_of(suggestions.begin(), suggestions.end(),
                     [](const Suggestion& s) { return s.type != SuggestionType::none; });
}

bool IREvaluation::terminal() const noexcept {
  if (stop) return true;
  if (score == 5 && !has_actionable()) return true;
  return !suggestions.empty() && !has_actionable();
}

Checked<IREvaluation> check_ir_evaluation(const json& payload) {
  Checked<IREvaluation> result;
  auto& bad = result.violations;
  if (!require_object(payload, bad)) return result;

  IREvaluation evaluation;
  if (auto score = int_field(payload, "score", "payload", bad)) {
    if (*score < 1 || *score > 5) {
      bad.push_back("score " + std::to_string(*score) + " is outside [1, 5]");
    }
    evaluation.score = static_cast<int>(*score);
  }
  if (const json* items = array_field(payload, "suggestions", "payload", bad)) {
    for (std::size_t i = 0; i < items->size(); ++i) {
      const auto path = at("suggestions", i);
      const json& item = (*items)[i];
      if (!item.is_object()) {
        bad.push_back(path + " must be an object");
        continue;
      }
      Suggestion suggestion;
      if (auto type = string_field(item, "type", path, bad, true)) {
        if (auto parsed = parse_suggestion_type(*type)) {
          suggestion.type = *parsed;
        } else {
          bad.push_back(path + ".type '" + *type + "' is not add/remove/rephrase/shorten/none");
        }
      }
      if (const json* c = member(item, "content"); c != nullptr && c->is_string()) {
        suggestion.content = c->get<std::string>();
      } else if (c != nullptr && !c->is_null()) {
        bad.push_back(path + ".content must be a string");
      }
      if (const json* e = member(item, "evidence"); e != nullptr && e->is_string()) {
        suggestion.evidence = e->get<std::string>();
      } else if (e != nullptr && !e->is_null()) {
        bad.push_back(path + ".evidence must be a string");
      }
      evaluation.suggestions.push_back(std::move(suggestion));
    }
  }
  if (const json* stop = member(payload, "stop"); stop == nullptr || !stop->is_boolean()) {
    bad.emplace_back("payload.stop must be a boolean");
  } else {
    evaluation.stop = stop->get<bool>();
  }
  if (bad.empty() && evaluation.stop && evaluation.score != 5 && evaluation.has_actionable()) {
    bad.emplace_back("stop is true but the score is below 5 and actionable suggestions remain");
  }
  if (bad.empty()) result.value = std::move(evaluation);
  return result;
}

json to_json(const IREvaluation& evaluation) {
  json suggestions = json::array();
  for (const auto& s : evaluation.suggestions) {
    suggestions.push_back(
        {{"type", to_string(s.type)}, {"content", s.content}, {"evidence", s.evidence}});
  }
  return json{{"score", evaluation.score}, {"suggestions", suggestions}, {"stop", evaluation.stop}};
}

}  // namespace reasonsum::payloads
