#include "reasonsum/session.hpp"

#include <chrono>

namespace reasonsum {

Session::Session(provider::Gateway& gateway, StageSettings settings)
    : gateway_(gateway), settings_(std::move(settings)) {}

provider::ChatResponse Session::call(const std::string& stage,
                                     const std::vector<ChatMessage>& messages,
                                     provider::ResponseKind kind,
                                     std::optional<double> temperature) {
  auto request = provider::make_request(stage, messages, settings_.effort, kind, settings_.decoding);
  if (temperature) request.temperature = *temperature;
  if (auto it = settings_.stage_models.find(stage); it != settings_.stage_models.end()) {
    request.model = it->second;
  } else if (auto fallback = settings_.stage_models.find(""); fallback != settings_.stage_models.end()) {
    request.model = fallback->second;
  }

  const auto started = std::chrono::steady_clock::now();
  auto response = gateway_.complete(request);
  const auto elapsed = std::chrono::steady_clock::now() - started;

  StageRecord record;
  record.stage_name = stage;
  record.prompt_messages = messages;
  record.raw_response = response.text;
  record.prompt_tokens = response.prompt_tokens;
  record.completion_tokens = response.completion_tokens;
  record.reasoning_tokens = response.reasoning_tokens;
  record.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
  if (response.finish_reason != provider::FinishReason::stop) {
    record.flags.push_back("finish_reason=" + std::string(provider::to_string(response.finish_reason)));
  }
  trace_.stages.push_back(std::move(record));
  return response;
}

std::string Session::text(const std::string& stage, std::vector<ChatMessage> messages,
                          std::optional<double> temperature) {
  return call(stage, messages, provider::ResponseKind::free_text, temperature).text;
}

void Session::flag(std::string flag) {
  if (!trace_.stages.empty()) trace_.stages.back().flags.push_back(std::move(flag));
}

void Session::structured_impl(const std::string& stage, std::vector<ChatMessage> messages,
                              const std::function<Verdict(const json&)>& check) {
  std::vector<std::string> problems;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto response = call(stage, messages, provider::ResponseKind::json_object, std::nullopt);
    auto& record = trace_.stages.back();
    if (attempt > 0) record.flags.emplace_back("reask");

    problems.clear();
    try {
      json payload = provider::extract_json(response.text);
      auto [violations, flags] = check(payload);
      record.parsed_payload = std::move(payload);
      problems = std::move(violations);
      if (problems.empty()) {
        record.flags.insert(record.flags.end(), flags.begin(), flags.end());
        return;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::no_json_found) throw;
      problems.emplace_back("the output contained no JSON object");
    }
    record.flags.push_back("schema_violation");

    std::string reasons;
    for (const auto& p : problems) reasons += (reasons.empty() ? "" : "; ") + p;
    messages.push_back({Role::assistant, response.text});
    messages.push_back(
        {Role::user, std::string(kReaskPrefix) + reasons + ". Return ONLY a corrected JSON object."});
  }
  std::string joined;
  for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
  throw Error(ErrorCode::schema_violation, stage + ": " + joined);
}

}  // namespace reasonsum
