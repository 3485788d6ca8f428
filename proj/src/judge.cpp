#include "reasonsum/judge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "reasonsum/textproc.hpp"

namespace reasonsum::judge {

std::vector<std::string> RubricWeights::validate() const {
  std::vector<std::string> out;
  const double values[] = {faithfulness, coverage, coherence, concision};
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    if (!(values[i] >= 0.0)) out.push_back("weight " + std::string(kCriteria[i]) + " must be ≥ 0");
  }
  const double sum = faithfulness + coverage + coherence + concision;
  if (std::abs(sum - 1.0) > 1e-9) out.emplace_back("rubric weights must sum to 1");
  return out;
}

std::string candidate_label(std::size_t i) {
  std::string label;
  std::size_t n = i + 1;
  while (n > 0) {
    --n;
    label.insert(label.begin(), static_cast<char>('A' + n % 26));
    n /= 26;
  }
  return label;
}

namespace {

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

std::string count_word(std::size_t n) {
  static constexpr std::array<std::string_view, 11> kWords = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"};
  return n < kWords.size() ? std::string(kWords[n]) : std::to_string(n);
}

std::string lower(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

double weight_of(const RubricWeights& w, std::string_view criterion) {
  if (criterion == "faithfulness") return w.faithfulness;
  if (criterion == "coverage") return w.coverage;
  if (criterion == "coherence") return w.coherence;
  return w.concision;
}

}  // namespace

prompts::Slots judge_slots(std::span<const std::string> candidates, const RubricWeights& weights) {
  std::string labels, options, block;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto label = candidate_label(i);
    labels += (i ? "/" : "") + label;
    options += (i ? ", '" : "'") + label + "'";
    block += (i ? "\n" : "") + ("CANDIDATE_" + label + ": ") + candidates[i];
  }
  return {{"candidate_count", count_word(candidates.size())},
          {"candidate_labels", labels},
          {"winner_options", options},
          {"weight_faithfulness", format_weight(weights.faithfulness)},
          {"weight_coverage", format_weight(weights.coverage)},
          {"weight_coherence", format_weight(weights.coherence)},
          {"weight_concision", format_weight(weights.concision)},
          {"candidates", block}};
}

payloads::Checked<JudgeVerdict> check_verdict(const json& payload,
                                              std::span<const std::string> candidates,
                                              const RubricWeights& weights) {
  payloads::Checked<JudgeVerdict> result;
  auto& bad = result.violations;
  if (!payload.is_object()) {
    bad.emplace_back("payload must be a JSON object");
    return result;
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < candidates.size(); ++i) labels.push_back(candidate_label(i));

  JudgeVerdict verdict;
  auto winner = payload.find("winner");
  if (winner == payload.end() || !winner->is_string()) {
    bad.emplace_back("winner must be a string label");
  } else {
    verdict.winner = winner->get<std::string>();
    auto it = std::find(labels.begin(), labels.end(), verdict.winner);
    if (it == labels.end()) {
      bad.push_back("winner '" + verdict.winner + "' is not one of the candidate labels");
    } else {
      verdict.winner_index = static_cast<std::size_t>(it - labels.begin());
    }
  }

  auto scores = payload.find("scores");
  if (scores == payload.end() || !scores->is_object()) {
    bad.emplace_back("scores must be an object keyed by candidate label");
  } else {
    for (auto entry = scores->begin(); entry != scores->end(); ++entry) {
      if (std::find(labels.begin(), labels.end(), entry.key()) == labels.end()) {
        bad.push_back("scores has unknown candidate label '" + entry.key() + "'");
        continue;
      }
      CandidateScore score;
      const json& v = entry.value();
      if (v.is_number()) {
        score.judge_total = v.get<double>();
      } else if (v.is_object()) {
        for (auto field = v.begin(); field != v.end(); ++field) {
          if (!field.value().is_number()) continue;
          const auto key = lower(field.key());
          const double x = field.value().get<double>();
          if (key == "total" || key == "weighted_total" || key == "score" || key == "overall") {
            score.judge_total = x;
          } else {
            score.criteria[key] = x;
          }
        }
      } else {
        bad.push_back("scores." + entry.key() + " must be a number or an object of sub-scores");
        continue;
      }
      if (std::all_of(kCriteria.begin(), kCriteria.end(),
                      [&](std::string_view c) { return score.criteria.count(std::string(c)) > 0; })) {
        double total = 0;
        for (auto c : kCriteria) total += weight_of(weights, c) * score.criteria[std::string(c)];
        score.weighted_total = total;
        if (score.judge_total && std::abs(*score.judge_total - total) > 1e-6) {
          result.flags.push_back("judge_total_mismatch:" + entry.key());
        }
      }
      verdict.scores.emplace(entry.key(), std::move(score));
    }
    if (!verdict.winner.empty() && !verdict.scores.count(verdict.winner) && bad.empty()) {
      bad.push_back("scores has no entry for the winner '" + verdict.winner + "'");
    }
    for (const auto& label : labels) {
      if (!verdict.scores.count(label)) result.flags.push_back("scores_missing:" + label);
    }
  }

  auto reason = payload.find("reason");
  if (reason == payload.end() || !reason->is_string()) {
    bad.emplace_back("reason must be a string");
  } else {
    verdict.reason = reason->get<std::string>();
    if (text::tokenize(verdict.reason).size() > 50) result.flags.emplace_back("reason_over_50_words");
  }

  if (!bad.empty()) return result;

  auto final_summary = payload.find("final_summary");
  const auto& truth = candidates[verdict.winner_index];
  if (final_summary == payload.end() || !final_summary->is_string() ||
      final_summary->get<std::string>() != truth) {
    result.flags.emplace_back("final_summary_repaired");
  }
  verdict.final_summary = truth;

  // The judge's winner is authoritative; a disagreeing weighted argmax is
  // only recorded.
  std::optional<std::string> best;
  double best_total = 0;
  bool complete = verdict.scores.size() == labels.size();
  for (const auto& [label, score] : verdict.scores) {
    if (!score.weighted_total) {
      complete = false;
      break;
    }
    if (!best || *score.weighted_total > best_total) {
      best = label;
      best_total = *score.weighted_total;
    }
  }
  if (complete && best && verdict.scores.at(verdict.winner).weighted_total < best_total) {
    result.flags.emplace_back("winner_not_weighted_argmax");
  }
  result.value = std::move(verdict);
  return result;
}

JudgeVerdict judge_select(Session& session, std::string_view document,
                          std::span<const std::string> candidates, const RubricWeights& weights) {
  if (candidates.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "the judge needs at least two candidates");
  }
  auto messages = prompts::assemble_prompt(StrategyId::sc, "judge", document, {},
                                           judge_slots(candidates, weights));
  return session.structured<JudgeVerdict>(
      prompts::template_name(StrategyId::sc, "judge"), std::move(messages),
      [&](const json& payload) { return check_verdict(payload, candidates, weights); });
}

payloads::IREvaluation ir_evaluate(Session& session, std::string_view document,
                                   std::string_view summary) {
  auto messages = prompts::assemble_prompt(StrategyId::ir, "evaluate", document, {},
                                           {{"current_summary", std::string(summary)}});
  return session.structured<payloads::IREvaluation>(
      prompts::template_name(StrategyId::ir, "evaluate"), std::move(messages),
      [](const json& payload) { return payloads::check_ir_evaluation(payload); });
}

void to_json(json& j, const GEvalScores& s) {
  j = json{{"completeness", s.completeness},
           {"conciseness", s.conciseness},
           {"faithfulness", s.faithfulness}};
}

void from_json(const json& j, GEvalScores& s) {
  auto checked = check_geval(j);
  if (!checked.ok()) throw Error(ErrorCode::parse_error, "invalid G-Eval scores: " + checked.violations.front());
  s = *checked.value;
}

payloads::Checked<GEvalScores> check_geval(const json& payload) {
  payloads::Checked<GEvalScores> result;
  if (!payload.is_object()) {
    result.violations.emplace_back("payload must be a JSON object");
    return result;
  }
  GEvalScores scores;
  auto read = [&](const char* key, double& out) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_number()) {
      result.violations.push_back(std::string(key) + " must be a number");
      return;
    }
    out = it->get<double>();
    if (!(out >= 1.0 && out <= 5.0)) {
      result.violations.push_back(std::string(key) + " " + it->dump() + " is outside [1, 5]");
    }
  };
  read("completeness", scores.completeness);
  read("conciseness", scores.conciseness);
  read("faithfulness", scores.faithfulness);
  if (result.violations.empty()) result.value = scores;
  return result;
}

GEvalScores geval_score(Session& session, std::string_view document, std::string_view summary) {
  auto tmpl = prompts::load_template("geval_score");
  std::vector<ChatMessage> messages{
      {Role::user, prompts::render(tmpl, {{"document", std::string(document)},
                                          {"summary", std::string(summary)}})}};
  return session.structured<GEvalScores>("geval_score", std::move(messages), check_geval);
}

}  // namespace reasonsum::judge
