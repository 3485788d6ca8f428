#include "reasonsum/provider.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <thread>

namespace reasonsum::provider {

std::string_view to_string(FinishReason reason) noexcept {
  switch (reason) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::other: return "other";
  }
  return "other";
}

void ChatRequest::validate() const {
  if (messages.empty()) throw Error(ErrorCode::invalid_argument, "request has no messages");
  if (messages.back().role != Role::user) {
    throw Error(ErrorCode::invalid_argument, "last request message must come from the user");
  }
  if (!(temperature >= 0.0)) throw Error(ErrorCode::invalid_argument, "temperature must be >= 0");
  if (max_output_tokens <= 0) {
    throw Error(ErrorCode::invalid_argument, "max_output_tokens must be positive");
  }
}

std::string ChatRequest::fingerprint() const {
  json j{{"messages", messages},
         {"temperature", temperature},
         {"max_output_tokens", max_output_tokens},
         {"reasoning_effort", to_string(reasoning_effort)},
         {"json", response_kind == ResponseKind::json_object},
         {"stage", stage},
         {"model", model}};
  return hex64(fnv1a64(j.dump(-1, ' ', false, json::error_handler_t::replace)));
}

ChatRequest make_request(std::string stage, std::vector<ChatMessage> messages,
                         ReasoningEffort effort, ResponseKind kind,
                         const DecodingSettings& decoding) {
  ChatRequest request;
  request.stage = std::move(stage);
  request.messages = std::move(messages);
  request.temperature = decoding.temperature;
  request.reasoning_effort = effort;
  request.max_output_tokens = effort == ReasoningEffort::none ? decoding.max_output_tokens
                                                              : decoding.reasoning_max_output_tokens;
  request.response_kind = kind;
  return request;
}

namespace {
ErrorCode code_for(TransportFailure::Kind kind) {
  switch (kind) {
    case TransportFailure::Kind::rate_limited: return ErrorCode::rate_limited;
    case TransportFailure::Kind::auth: return ErrorCode::auth_error;
    case TransportFailure::Kind::malformed: return ErrorCode::malformed_response;
    case TransportFailure::Kind::transient:
    case TransportFailure::Kind::fatal: return ErrorCode::transport_error;
  }
  return ErrorCode::transport_error;
}
}  // namespace

TransportFailure::TransportFailure(Kind kind, const std::string& message)
    : Error(code_for(kind), message), kind_(kind) {}

BudgetLedger::BudgetLedger(BudgetLimits limits, std::int64_t spent_calls, std::int64_t spent_tokens)
    : limits_(limits), spent_calls_(spent_calls), spent_tokens_(spent_tokens) {}

bool BudgetLedger::try_reserve() {
  std::lock_guard lock(mutex_);
  if (spent_calls_ + reserved_ >= limits_.max_calls) return false;
  if (spent_tokens_ >= limits_.max_total_tokens) return false;
  ++reserved_;
  return true;
}

void BudgetLedger::commit(std::int64_t tokens) {
  std::lock_guard lock(mutex_);
  --reserved_;
  ++spent_calls_;
  spent_tokens_ += std::max<std::int64_t>(tokens, 0);
}

void BudgetLedger::release() {
  std::lock_guard lock(mutex_);
  --reserved_;
}

bool BudgetLedger::has_headroom() const {
  std::lock_guard lock(mutex_);
  return spent_calls_ + reserved_ < limits_.max_calls && spent_tokens_ < limits_.max_total_tokens;
}

std::int64_t BudgetLedger::spent_calls() const {
  std::lock_guard lock(mutex_);
  return spent_calls_;
}

std::int64_t BudgetLedger::spent_tokens() const {
  std::lock_guard lock(mutex_);
  return spent_tokens_;
}

std::chrono::milliseconds RetryPolicy::ceiling(int attempt) const {
  double delay = static_cast<double>(base_delay.count());
  for (int i = 1; i < attempt; ++i) delay *= multiplier;
  delay = std::min(delay, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(delay));
}

Gateway::Gateway(std::shared_ptr<Transport> transport, std::shared_ptr<BudgetLedger> ledger,
                 RetryPolicy retry, Sleeper sleeper, std::uint64_t jitter_seed)
    : transport_(std::move(transport)),
      ledger_(ledger ? std::move(ledger) : std::make_shared<BudgetLedger>()),
      retry_(retry),
      sleeper_(sleeper ? std::move(sleeper)
                       : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
      rng_(jitter_seed != 0 ? jitter_seed : std::random_device{}()) {
  if (!transport_) throw Error(ErrorCode::invalid_argument, "gateway needs a transport");
  if (retry_.max_attempts < 1) retry_.max_attempts = 1;
}

std::chrono::milliseconds Gateway::backoff(int attempt) {
  const auto ceiling = retry_.ceiling(attempt);
  if (!retry_.full_jitter || ceiling.count() <= 0) return ceiling;
  std::lock_guard lock(rng_mutex_);
  std::uniform_int_distribution<std::int64_t> dist(0, ceiling.count());
  return std::chrono::milliseconds(dist(rng_));
}

ChatResponse Gateway::complete(const ChatRequest& request) {
  request.validate();
  if (!ledger_->try_reserve()) {
    throw Error(ErrorCode::budget_exceeded, "budget exhausted before stage '" + request.stage + "'");
  }
  for (int attempt = 1;; ++attempt) {
    try {
      ChatResponse response = transport_->send(request);
      if (response.text.empty() && response.finish_reason == FinishReason::stop) {
        throw TransportFailure(TransportFailure::Kind::malformed,
                               "empty response text with finish_reason=stop");
      }
      ledger_->commit(response.prompt_tokens + response.completion_tokens);
      return response;
    } catch (const TransportFailure& failure) {
      if (!failure.retryable()) {
        ledger_->release();
        throw;
      }
      if (attempt >= retry_.max_attempts) {
        ledger_->release();
        throw Error(failure.code(), std::string(failure.what()) + " (gave up after " +
                                        std::to_string(attempt) + " attempts)");
      }
      sleeper_(backoff(attempt));
    } catch (...) {
      ledger_->release();
      throw;
    }
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool try_parse(std::string_view text, json& out) {
  out = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  return !out.is_discarded();
}

// Content of the first ``` fenced block, without its info string.
std::optional<std::string_view> fenced_block(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return std::nullopt;
  auto body_start = text.find('\n', open + 3);
  if (body_start == std::string_view::npos) return std::nullopt;
  ++body_start;
  const auto close = text.find("```", body_start);
  if (close == std::string_view::npos) return text.substr(body_start);
  return text.substr(body_start, close - body_start);
}

// End (exclusive) of the balanced object starting at `open`, respecting strings.
std::optional<std::size_t> balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::nullopt;
}

}  // namespace

json extract_json(std::string_view text) {
  json value;
  const auto trimmed = trim(text);
  if (!trimmed.empty() && try_parse(trimmed, value)) return value;
  if (auto block = fenced_block(trimmed)) {
    const auto inner = trim(*block);
    if (!inner.empty() && try_parse(inner, value)) return value;
  }
  for (auto open = trimmed.find('{'); open != std::string_view::npos;
       open = trimmed.find('{', open + 1)) {
    const auto end = balanced_end(trimmed, open);
    if (!end) continue;
    if (try_parse(trimmed.substr(open, *end - open), value) && value.is_object()) return value;
  }
  throw Error(ErrorCode::no_json_found, "no JSON object in model output");
}

}  // namespace reasonsum::provider
