#include "reasonsum/http_transport.hpp"

#include <httplib.h>

namespace reasonsum::provider {

HttpTransport::HttpTransport(HttpSettings settings) : settings_(std::move(settings)) {
  const auto scheme_end = settings_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::config_error, "provider base_url must include a scheme: " + settings_.base_url);
  }
  const auto scheme = settings_.base_url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::config_error, "unsupported provider scheme '" + scheme + "'");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    throw Error(ErrorCode::config_error, "this build has no TLS support; use an http:// base_url");
  }
#endif
  const auto path_start = settings_.base_url.find('/', scheme_end + 3);
  origin_ = settings_.base_url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "" : settings_.base_url.substr(path_start);
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  if (settings_.model.empty()) throw Error(ErrorCode::config_error, "provider model is not set");
}

json HttpTransport::request_body(const ChatRequest& request) const {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.text}});
  }
  json body{{"model", request.model.empty() ? settings_.model : request.model},
            {"messages", messages}};
  if (request.reasoning_effort == ReasoningEffort::none) {
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;
  } else {
    // Reasoning endpoints count thinking tokens against max_completion_tokens
    // and reject sampling parameters.
    body["max_completion_tokens"] = request.max_output_tokens;
    if (!settings_.effort_field.empty()) {
      body[settings_.effort_field] = std::string(to_string(request.reasoning_effort));
    }
  }
  if (settings_.json_response_format && request.response_kind == ResponseKind::json_object) {
    body["response_format"] = {{"type", "json_object"}};
  }
  return body;
}

ChatResponse HttpTransport::parse_response(const std::string& body) {
  const auto j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw TransportFailure(TransportFailure::Kind::malformed, "response is not a JSON object");
  }
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty() || !(*choices)[0].is_object()) {
    throw TransportFailure(TransportFailure::Kind::malformed, "response has no choices");
  }
  const auto& choice = (*choices)[0];
  ChatResponse response;
  if (auto message = choice.find("message"); message != choice.end() && message->is_object()) {
    if (auto content = message->find("content"); content != message->end() && content->is_string()) {
      response.text = content->get<std::string>();
    }
  }
  const auto finish = choice.value("finish_reason", json()).is_string()
                          ? choice["finish_reason"].get<std::string>()
                          : std::string("other");
  response.finish_reason = finish == "stop"     ? FinishReason::stop
                           : finish == "length" ? FinishReason::length
                                                : FinishReason::other;
  if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
    response.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
    response.completion_tokens = usage->value("completion_tokens", std::int64_t{0});
    if (auto details = usage->find("completion_tokens_details");
        details != usage->end() && details->is_object()) {
      const auto reasoning = details->value("reasoning_tokens", json());
      if (reasoning.is_number_integer()) response.reasoning_tokens = reasoning.get<std::int64_t>();
    }
  }
  return response;
}

ChatResponse HttpTransport::send(const ChatRequest& request) {
  using Kind = TransportFailure::Kind;
  if (settings_.api_key.empty()) throw TransportFailure(Kind::auth, "REASON_SUM_API_KEY is not set");

  httplib::Client client(origin_);
  client.set_connection_timeout(std::chrono::seconds(30));
  client.set_read_timeout(settings_.timeout);
  client.set_write_timeout(settings_.timeout);
  const httplib::Headers headers{{"Authorization", "Bearer " + settings_.api_key}};
  const auto body = request_body(request).dump(-1, ' ', false, json::error_handler_t::replace);

  auto result = client.Post(path_ + "/chat/completions", headers, body, "application/json");
  if (!result) {
    throw TransportFailure(Kind::transient, "HTTP request failed: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 401 || status == 403) {
    throw TransportFailure(Kind::auth, "endpoint rejected the credentials (HTTP " + std::to_string(status) + ")");
  }
  if (status == 429) throw TransportFailure(Kind::rate_limited, "HTTP 429 from endpoint");
  if (status == 408 || status >= 500) {
    throw TransportFailure(Kind::transient, "HTTP " + std::to_string(status) + " from endpoint");
  }
  if (status < 200 || status >= 300) {
    throw TransportFailure(Kind::fatal, "HTTP " + std::to_string(status) + ": " + result->body.substr(0, 300));
  }
  return parse_response(result->body);
}

}  // namespace reasonsum::provider
