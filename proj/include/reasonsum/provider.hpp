#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "reasonsum/core.hpp"

namespace reasonsum::provider {

enum class ResponseKind { free_text, json_object };
enum class FinishReason { stop, length, other };

std::string_view to_string(FinishReason reason) noexcept;

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_output_tokens = 1000;
  ReasoningEffort reasoning_effort = ReasoningEffort::none;
  ResponseKind response_kind = ResponseKind::free_text;
  // Pipeline stage that issued the request. Not sent to live endpoints; the
  // mock keys its script on it.
  std::string stage;
  // Per-request model override; empty means the transport default.
  std::string model;

  /// Throws invalid_argument unless there is at least one message, the last
  /// one is from the user, temperature >= 0 and max_output_tokens > 0.
  void validate() const;

  /// Stable hash over everything that affects the response.
  std::string fingerprint() const;
};

struct ChatResponse {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t reasoning_tokens = 0;
  FinishReason finish_reason = FinishReason::stop;
};

/// Decoding defaults: temperature 0 and 1000 output tokens for ordinary
/// stages, 10000 when a reasoning effort is requested (thinking tokens count
/// against the completion budget).
struct DecodingSettings {
  double temperature = 0.0;
  int max_output_tokens = 1000;
  int reasoning_max_output_tokens = 10000;
  double sc_temperature = 0.7;
};

ChatRequest make_request(std::string stage, std::vector<ChatMessage> messages,
                         ReasoningEffort effort, ResponseKind kind,
                         const DecodingSettings& decoding = {});

/// Raised by transports for a single failed attempt.
class TransportFailure : public Error {
 public:
  enum class Kind { transient, rate_limited, auth, fatal, malformed };

  TransportFailure(Kind kind, const std::string& message);
  Kind kind() const noexcept { return kind_; }
  bool retryable() const noexcept { return kind_ == Kind::transient || kind_ == Kind::rate_limited; }

 private:
  Kind kind_;
};

/// One attempt against an endpoint, no retries or budgeting.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual ChatResponse send(const ChatRequest& request) = 0;
};

struct BudgetLimits {
  std::int64_t max_calls = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_total_tokens = std::numeric_limits<std::int64_t>::max();
};

/// Call/token accounting shared by every in-flight request. A call slot is
/// reserved before the request goes out, so concurrent callers never push
/// spent_calls past max_calls. Tokens are only known after the response; a
/// request is refused once spent_tokens has reached max_total_tokens.
class BudgetLedger {
 public:
  explicit BudgetLedger(BudgetLimits limits = {}, std::int64_t spent_calls = 0,
                        std::int64_t spent_tokens = 0);

  bool try_reserve();
  void commit(std::int64_t tokens);
  void release();
  bool has_headroom() const;

  BudgetLimits limits() const { return limits_; }
  std::int64_t spent_calls() const;
  std::int64_t spent_tokens() const;

 private:
  mutable std::mutex mutex_;
  BudgetLimits limits_;
  std::int64_t spent_calls_;
  std::int64_t spent_tokens_;
  std::int64_t reserved_ = 0;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{30000};
  bool full_jitter = true;

  /// Upper bound of the wait before attempt `attempt + 1` (attempt is 1-based).
  std::chrono::milliseconds ceiling(int attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// The provider handle pipelines talk to: retries transient failures with
/// exponential backoff, enforces the budget and updates the ledger once per
/// successful call. Safe to share between threads.
class Gateway {
 public:
  Gateway(std::shared_ptr<Transport> transport, std::shared_ptr<BudgetLedger> ledger,
          RetryPolicy retry = {}, Sleeper sleeper = {}, std::uint64_t jitter_seed = 0);

  ChatResponse complete(const ChatRequest& request);

  BudgetLedger& ledger() noexcept { return *ledger_; }
  Transport& transport() noexcept { return *transport_; }

 private:
  std::chrono::milliseconds backoff(int attempt);

  std::shared_ptr<Transport> transport_;
  std::shared_ptr<BudgetLedger> ledger_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
};

/// First syntactically valid JSON value in `text`: the whole text (after
/// stripping code fences) if it parses, otherwise the first balanced `{...}`
/// object that parses. Throws no_json_found.
json extract_json(std::string_view text);

}  // namespace reasonsum::provider
