#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reasonsum/core.hpp"
#include "reasonsum/payloads.hpp"
#include "reasonsum/provider.hpp"

namespace reasonsum {

/// Per-run knobs shared by every stage call.
struct StageSettings {
  provider::DecodingSettings decoding;
  ReasoningEffort effort = ReasoningEffort::none;
  // Model override by stage name (e.g. "sc_judge"); "" key is the default.
  std::map<std::string, std::string> stage_models;
};

/// Issues the calls of one pipeline run in order and records them as a
/// trace. Structured stages get one re-ask on a malformed payload, then fail
/// with schema_violation.
class Session {
 public:
  Session(provider::Gateway& gateway, StageSettings settings);

  /// Free-text stage. Returns the raw response text.
  std::string text(const std::string& stage, std::vector<ChatMessage> messages,
                   std::optional<double> temperature = std::nullopt);

  /// JSON stage validated by `check`. The returned record's parsed payload is
  /// the model's object; flags from the check land on that stage's record.
  template <typename T>
  T structured(const std::string& stage, std::vector<ChatMessage> messages,
               const std::function<payloads::Checked<T>(const json&)>& check) {
    std::optional<T> value;
    structured_impl(stage, std::move(messages), [&](const json& payload) {
      auto checked = check(payload);
      if (checked.ok()) value = std::move(checked.value);
      return std::make_pair(std::move(checked.violations), std::move(checked.flags));
    });
    return std::move(*value);
  }

  /// Adds a flag to the most recent stage record.
  void flag(std::string flag);

  const PipelineTrace& trace() const noexcept { return trace_; }
  PipelineTrace take_trace() { return std::move(trace_); }

  static constexpr std::string_view kReaskPrefix = "Your previous output was invalid because ";

 private:
  using Verdict = std::pair<std::vector<std::string>, std::vector<std::string>>;

  provider::ChatResponse call(const std::string& stage, const std::vector<ChatMessage>& messages,
                              provider::ResponseKind kind, std::optional<double> temperature);
  void structured_impl(const std::string& stage, std::vector<ChatMessage> messages,
                       const std::function<Verdict(const json&)>& check);

  provider::Gateway& gateway_;
  StageSettings settings_;
  PipelineTrace trace_;
};

}  // namespace reasonsum
