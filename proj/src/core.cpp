#include "reasonsum/core.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace reasonsum {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::missing_field: return "missing_field";
    case ErrorCode::transport_error: return "transport_error";
    case ErrorCode::rate_limited: return "rate_limited";
    case ErrorCode::auth_error: return "auth_error";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::malformed_response: return "malformed_response";
    case ErrorCode::no_json_found: return "no_json_found";
    case ErrorCode::unscripted_request: return "unscripted_request";
    case ErrorCode::missing_template: return "missing_template";
    case ErrorCode::missing_slot: return "missing_slot";
    case ErrorCode::schema_violation: return "schema_violation";
    case ErrorCode::empty_summary: return "empty_summary";
    case ErrorCode::empty_document: return "empty_document";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::too_few_points: return "too_few_points";
    case ErrorCode::zero_variance: return "zero_variance";
    case ErrorCode::unknown_sample: return "unknown_sample";
    case ErrorCode::insufficient_train_data: return "insufficient_train_data";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::empty_run: return "empty_run";
    case ErrorCode::empty_store: return "empty_store";
  }
  return "unknown";
}

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view name,
                           const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [key, value] : table) {
    if (key == name) return value;
  }
  return std::nullopt;
}

constexpr std::array<std::pair<std::string_view, StrategyId>, 9> kStrategyNames{{
    {"vanilla", StrategyId::vanilla},
    {"cot", StrategyId::cot},
    {"e2a", StrategyId::e2a},
    {"qag", StrategyId::qag},
    {"cite", StrategyId::cite},
    {"deco", StrategyId::deco},
    {"plan", StrategyId::plan},
    {"ir", StrategyId::ir},
    {"sc", StrategyId::sc},
}};

constexpr std::array<std::pair<std::string_view, ReasoningEffort>, 5> kEffortNames{{
    {"none", ReasoningEffort::none},
    {"minimal", ReasoningEffort::minimal},
    {"low", ReasoningEffort::low},
    {"medium", ReasoningEffort::medium},
    {"high", ReasoningEffort::high},
}};

constexpr std::array<std::pair<std::string_view, Split>, 2> kSplitNames{{
    {"train", Split::train},
    {"test", Split::test},
}};

constexpr std::array<std::pair<std::string_view, Role>, 3> kRoleNames{{
    {"system", Role::system},
    {"user", Role::user},
    {"assistant", Role::assistant},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [key, v] : table) {
    if (v == value) return key;
  }
  return "unknown";
}

template <typename Enum, typename Parser>
Enum parse_or_throw(const json& j, std::string_view what, Parser parse) {
  if (!j.is_string()) {
    throw Error(ErrorCode::parse_error, std::string(what) + " must be a string");
  }
  auto value = parse(j.get<std::string>());
  if (!value) {
    throw Error(ErrorCode::parse_error,
                "unknown " + std::string(what) + " '" + j.get<std::string>() + "'");
  }
  return *value;
}

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) it->get_to(out);
}

}  // namespace

std::string_view to_string(StrategyId id) noexcept { return name_of(id, kStrategyNames); }
std::optional<StrategyId> parse_strategy(std::string_view name) {
  return lookup(name, kStrategyNames);
}

std::string_view to_string(ReasoningEffort effort) noexcept { return name_of(effort, kEffortNames); }
std::optional<ReasoningEffort> parse_effort(std::string_view name) {
  return lookup(name, kEffortNames);
}

std::string_view to_string(Split split) noexcept { return name_of(split, kSplitNames); }
std::optional<Split> parse_split(std::string_view name) { return lookup(name, kSplitNames); }

std::string_view to_string(Role role) noexcept { return name_of(role, kRoleNames); }
std::optional<Role> parse_role(std::string_view name) { return lookup(name, kRoleNames); }

std::vector<std::string> validate_spec(const StrategySpec& spec) {
  std::vector<std::string> violations;
  if (spec.shots != 0 && spec.shots != 2) violations.emplace_back("shots must be 0 or 2");
  if (spec.e2a_max_k < 1) violations.emplace_back("e2a_max_k must be ≥ 1");
  const auto [lo, hi] = spec.qag_question_range;
  if (lo < 1 || hi < lo) {
    violations.emplace_back("qag_question_range must satisfy 1 ≤ min ≤ max");
  }
  if (spec.sc_n < 2) violations.emplace_back("sc_n must be ≥ 2");
  if (spec.ir_max_iters < 1) violations.emplace_back("ir_max_iters must be ≥ 1");
  return violations;
}

std::string method_label(const StrategySpec& spec) {
  std::string label(to_string(spec.strategy));
  if (spec.reasoning_effort != ReasoningEffort::none) {
    label += "@";
    label += to_string(spec.reasoning_effort);
  }
  return label;
}

bool PipelineTrace::has_flag(std::string_view flag) const {
  return std::any_of(stages.begin(), stages.end(), [&](const StageRecord& s) {
    return std::find(s.flags.begin(), s.flags.end(), flag) != s.flags.end();
  });
}

void to_json(json& j, const ChatMessage& m) {
  j = json{{"role", to_string(m.role)}, {"text", m.text}};
}

void from_json(const json& j, ChatMessage& m) {
  m.role = parse_or_throw<Role>(j.at("role"), "role", parse_role);
  j.at("text").get_to(m.text);
}

void to_json(json& j, const SampleRecord& r) {
  j = json{{"sample_id", r.sample_id}, {"dataset_id", r.dataset_id}, {"document", r.document},
           {"reference", r.reference}, {"split", to_string(r.split)}};
}

void from_json(const json& j, SampleRecord& r) {
  j.at("sample_id").get_to(r.sample_id);
  j.at("dataset_id").get_to(r.dataset_id);
  j.at("document").get_to(r.document);
  read_optional(j, "reference", r.reference);
  r.split = j.contains("split") ? parse_or_throw<Split>(j.at("split"), "split", parse_split)
                                : Split::test;
}

void to_json(json& j, const StrategySpec& s) {
  j = json{{"strategy", to_string(s.strategy)},
           {"shots", s.shots},
           {"e2a_max_k", s.e2a_max_k},
           {"qag_question_range", {s.qag_question_range.first, s.qag_question_range.second}},
           {"sc_n", s.sc_n},
           {"ir_max_iters", s.ir_max_iters},
           {"reasoning_effort", to_string(s.reasoning_effort)}};
}

void from_json(const json& j, StrategySpec& s) {
  s = StrategySpec{};
  s.strategy = parse_or_throw<StrategyId>(j.at("strategy"), "strategy", parse_strategy);
  read_optional(j, "shots", s.shots);
  read_optional(j, "e2a_max_k", s.e2a_max_k);
  if (auto it = j.find("qag_question_range"); it != j.end()) {
    if (!it->is_array() || it->size() != 2) {
      throw Error(ErrorCode::parse_error, "qag_question_range must be a two-element array");
    }
    s.qag_question_range = {it->at(0).get<int>(), it->at(1).get<int>()};
  }
  read_optional(j, "sc_n", s.sc_n);
  read_optional(j, "ir_max_iters", s.ir_max_iters);
  if (j.contains("reasoning_effort")) {
    s.reasoning_effort =
        parse_or_throw<ReasoningEffort>(j.at("reasoning_effort"), "reasoning_effort", parse_effort);
  }
}

void to_json(json& j, const StageRecord& s) {
  j = json{{"stage_name", s.stage_name},
           {"prompt_messages", s.prompt_messages},
           {"raw_response", s.raw_response},
           {"parsed_payload", s.parsed_payload ? *s.parsed_payload : json(nullptr)},
           {"prompt_tokens", s.prompt_tokens},
           {"completion_tokens", s.completion_tokens},
           {"reasoning_tokens", s.reasoning_tokens},
           {"latency_ms", s.latency_ms},
           {"flags", s.flags}};
}

void from_json(const json& j, StageRecord& s) {
  j.at("stage_name").get_to(s.stage_name);
  j.at("prompt_messages").get_to(s.prompt_messages);
  j.at("raw_response").get_to(s.raw_response);
  if (auto it = j.find("parsed_payload"); it != j.end() && !it->is_null()) {
    s.parsed_payload = *it;
  } else {
    s.parsed_payload.reset();
  }
  read_optional(j, "prompt_tokens", s.prompt_tokens);
  read_optional(j, "completion_tokens", s.completion_tokens);
  read_optional(j, "reasoning_tokens", s.reasoning_tokens);
  read_optional(j, "latency_ms", s.latency_ms);
  s.flags.clear();
  read_optional(j, "flags", s.flags);
}

void to_json(json& j, const PipelineTrace& t) {
  j = json{{"stages", t.stages}, {"total_calls", t.total_calls()}};
}

void from_json(const json& j, PipelineTrace& t) {
  j.at("stages").get_to(t.stages);
  if (auto it = j.find("total_calls"); it != j.end() && it->get<std::size_t>() != t.stages.size()) {
    throw Error(ErrorCode::parse_error, "trace total_calls does not match its stage count");
  }
}

void to_json(json& j, const SummaryResult& r) {
  j = json{{"sample_id", r.sample_id},   {"dataset_id", r.dataset_id},
           {"strategy_spec", r.strategy_spec}, {"summary", r.summary},
           {"trace", r.trace},           {"created_at", r.created_at}};
}

void from_json(const json& j, SummaryResult& r) {
  j.at("sample_id").get_to(r.sample_id);
  read_optional(j, "dataset_id", r.dataset_id);
  j.at("strategy_spec").get_to(r.strategy_spec);
  j.at("summary").get_to(r.summary);
  j.at("trace").get_to(r.trace);
  read_optional(j, "created_at", r.created_at);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace reasonsum
