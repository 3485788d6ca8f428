#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reasonsum/core.hpp"
#include "reasonsum/payloads.hpp"
#include "reasonsum/prompts.hpp"
#include "reasonsum/session.hpp"

namespace reasonsum::judge {

struct RubricWeights {
  double faithfulness = 0.35;
  double coverage = 0.35;
  double coherence = 0.15;
  double concision = 0.15;

  /// Non-negative weights summing to 1 within 1e-9.
  std::vector<std::string> validate() const;

  bool operator==(const RubricWeights&) const = default;
};

inline constexpr std::array<std::string_view, 4> kCriteria = {"faithfulness", "coverage",
                                                             "coherence", "concision"};

struct CandidateScore {
  // Sub-scores by criterion name, as the judge reported them.
  std::map<std::string, double> criteria;
  // The judge's own total, when it reported one.
  std::optional<double> judge_total;
  // Σ wᵢ·scoreᵢ over the four criteria, when all four are present.
  std::optional<double> weighted_total;
};

struct JudgeVerdict {
  std::map<std::string, CandidateScore> scores;
  std::string winner;
  std::size_t winner_index = 0;
  std::string reason;
  // Always the winner's exact candidate text after validation.
  std::string final_summary;
};

/// Candidate label for position `i`: A, B, ..., Z, then AA, AB, ...
std::string candidate_label(std::size_t i);

/// Fills the judge template slots for `candidates` (labels, weights, the
/// CANDIDATE_X block).
prompts::Slots judge_slots(std::span<const std::string> candidates, const RubricWeights& weights);

payloads::Checked<JudgeVerdict> check_verdict(const json& payload,
                                              std::span<const std::string> candidates,
                                              const RubricWeights& weights);

/// One `sc_judge` call; the returned selection is always a member of
/// `candidates`.
JudgeVerdict judge_select(Session& session, std::string_view document,
                          std::span<const std::string> candidates, const RubricWeights& weights);

/// One `ir_evaluate` call.
payloads::IREvaluation ir_evaluate(Session& session, std::string_view document,
                                   std::string_view summary);

struct GEvalScores {
  double completeness = 0;
  double conciseness = 0;
  double faithfulness = 0;

  bool operator==(const GEvalScores&) const = default;
};

void to_json(json& j, const GEvalScores& s);
void from_json(const json& j, GEvalScores& s);

/// Values outside [1, 5] are rejected, never clamped.
payloads::Checked<GEvalScores> check_geval(const json& payload);

/// One `geval_score` call.
GEvalScores geval_score(Session& session, std::string_view document, std::string_view summary);

}  // namespace reasonsum::judge
