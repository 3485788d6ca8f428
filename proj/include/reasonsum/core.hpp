#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "reasonsum/error.hpp"

namespace reasonsum {

using json = nlohmann::json;

enum class StrategyId { vanilla, cot, e2a, qag, cite, deco, plan, ir, sc };

inline constexpr std::array<StrategyId, 9> kAllStrategies = {
    StrategyId::vanilla, StrategyId::cot,  StrategyId::e2a, StrategyId::qag, StrategyId::cite,
    StrategyId::deco,    StrategyId::plan, StrategyId::ir,  StrategyId::sc};

std::string_view to_string(StrategyId id) noexcept;
std::optional<StrategyId> parse_strategy(std::string_view name);

enum class ReasoningEffort { none, minimal, low, medium, high };

std::string_view to_string(ReasoningEffort effort) noexcept;
std::optional<ReasoningEffort> parse_effort(std::string_view name);

enum class Split { train, test };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view name);

enum class Role { system, user, assistant };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view name);

struct ChatMessage {
  Role role = Role::user;
  std::string text;

  bool operator==(const ChatMessage&) const = default;
};

/// One document/reference pair. `document` is the source text, `reference`
/// the gold summary (empty only for unlabeled inference runs).
struct SampleRecord {
  std::string sample_id;
  std::string dataset_id;
  std::string document;
  std::string reference;
  Split split = Split::test;

  bool operator==(const SampleRecord&) const = default;
};

/// Which pipeline to run and its knobs. `e2a_max_k` caps the extraction
/// budget, `qag_question_range` bounds the question count, `sc_n` is the
/// candidate count and `ir_max_iters` the refinement iteration bound.
struct StrategySpec {
  StrategyId strategy = StrategyId::vanilla;
  int shots = 0;
  int e2a_max_k = 14;
  std::pair<int, int> qag_question_range{4, 8};
  int sc_n = 3;
  int ir_max_iters = 3;
  ReasoningEffort reasoning_effort = ReasoningEffort::none;

  bool operator==(const StrategySpec&) const = default;
};

/// Returns one message per violated invariant; empty means valid.
std::vector<std::string> validate_spec(const StrategySpec& spec);

/// Row label used in reports: the strategy name, with `@<effort>` appended
/// when a reasoning effort is set (the large-reasoning-model rows).
std::string method_label(const StrategySpec& spec);

struct StageRecord {
  std::string stage_name;
  std::vector<ChatMessage> prompt_messages;
  std::string raw_response;
  std::optional<json> parsed_payload;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t reasoning_tokens = 0;
  std::int64_t latency_ms = 0;
  // Repairs, re-asks and soft warnings raised while handling this stage.
  std::vector<std::string> flags;

  bool operator==(const StageRecord&) const = default;
};

struct PipelineTrace {
  std::vector<StageRecord> stages;

  std::size_t total_calls() const noexcept { return stages.size(); }
  bool has_flag(std::string_view flag) const;

  bool operator==(const PipelineTrace&) const = default;
};

struct SummaryResult {
  std::string sample_id;
  std::string dataset_id;
  StrategySpec strategy_spec;
  std::string summary;
  PipelineTrace trace;
  std::string created_at;

  bool operator==(const SummaryResult&) const = default;
};

// Canonical JSON (snake_case) used by the run store.
void to_json(json& j, const ChatMessage& m);
void from_json(const json& j, ChatMessage& m);
void to_json(json& j, const SampleRecord& r);
void from_json(const json& j, SampleRecord& r);
void to_json(json& j, const StrategySpec& s);
void from_json(const json& j, StrategySpec& s);
void to_json(json& j, const StageRecord& s);
void from_json(const json& j, StageRecord& s);
void to_json(json& j, const PipelineTrace& t);
void from_json(const json& j, PipelineTrace& t);
void to_json(json& j, const SummaryResult& r);
void from_json(const json& j, SummaryResult& r);

/// 64-bit FNV-1a. Used for prompt checksums and request fingerprints.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

}  // namespace reasonsum
