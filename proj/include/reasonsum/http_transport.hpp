#pragma once

#include <chrono>
#include <string>

#include "reasonsum/provider.hpp"

namespace reasonsum::provider {

struct HttpSettings {
  // e.g. https://api.openai.com/v1; requests go to <base_url>/chat/completions.
  std::string base_url = "https://api.openai.com/v1";
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{120};
  // Ask for a JSON object response on structured stages.
  bool json_response_format = true;
  // Name of the effort field; empty disables sending it.
  std::string effort_field = "reasoning_effort";
};

/// Chat-completions over HTTP(S). One attempt per send; failures are
/// classified for the gateway's retry loop (429 rate_limited, 5xx and
/// network errors transient, 401/403 auth).
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(HttpSettings settings);

  ChatResponse send(const ChatRequest& request) override;

  /// Request body for `request`; exposed for tests.
  json request_body(const ChatRequest& request) const;
  /// Parses a chat-completions response body. Throws TransportFailure(malformed).
  static ChatResponse parse_response(const std::string& body);

 private:
  HttpSettings settings_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // path prefix, no trailing slash
};

}  // namespace reasonsum::provider
