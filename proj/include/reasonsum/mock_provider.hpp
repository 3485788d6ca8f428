#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "reasonsum/provider.hpp"

namespace reasonsum::provider {

struct MockReply {
  std::string text;
  std::optional<TransportFailure::Kind> failure;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t reasoning_tokens = 0;
  FinishReason finish_reason = FinishReason::stop;
};

/// What the mock answers, resolved in order: exact request fingerprint, the
/// next unconsumed entry of a per-stage sequence, a per-stage constant, then
/// the fallback. With no fallback an unmatched request is an error.
///
/// JSON form:
///   {"fallback": "none" | "simulate" | "echo",
///    "stages": {"<stage>": "text" | {reply} | ["text", {reply}, ...]},
///    "fingerprints": {"<hex>": "text" | {reply}}}
/// where {reply} is {"text": ..., "error": "transient" | "rate_limited" |
/// "auth" | "fatal" | "malformed", "prompt_tokens": n, "completion_tokens": n,
/// "reasoning_tokens": n, "finish_reason": "stop" | "length" | "other"}.
struct MockScript {
  enum class Fallback { none, simulate, echo };

  std::map<std::string, std::vector<MockReply>> sequences;
  std::map<std::string, MockReply> constants;
  std::map<std::string, MockReply> fingerprints;
  Fallback fallback = Fallback::none;

  static MockScript from_json(const json& j);
  static MockScript load(const std::filesystem::path& path);

  /// Shorthand: every stage in `replies` answers with the same text.
  static MockScript constant(std::map<std::string, std::string> replies);
  static MockScript simulated() {
    MockScript s;
    s.fallback = Fallback::simulate;
    return s;
  }
};

/// Deterministic in-process endpoint. Records every request it receives in
/// arrival order.
class MockTransport : public Transport {
 public:
  explicit MockTransport(MockScript script);

  ChatResponse send(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t request_count() const;
  std::vector<std::string> stage_sequence() const;

 private:
  mutable std::mutex mutex_;
  MockScript script_;
  std::map<std::string, std::size_t> cursors_;
  std::vector<ChatRequest> recorded_;
};

/// Schema-valid, deterministic stand-in for a model. Reads only the prompt
/// text and stage name, so identical requests always get identical replies.
std::string simulate_response(const ChatRequest& request);

}  // namespace reasonsum::provider
