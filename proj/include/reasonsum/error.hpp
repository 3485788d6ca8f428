#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reasonsum {

/// Failure classes shared by every module. The string form is what lands in
/// manifests (`failed(<code>: ...)`) and CLI diagnostics.
enum class ErrorCode {
  invalid_argument,
  io_error,
  config_error,
  parse_error,
  missing_field,
  // provider
  transport_error,
  rate_limited,
  auth_error,
  budget_exceeded,
  malformed_response,
  no_json_found,
  unscripted_request,
  // prompts and pipelines
  missing_template,
  missing_slot,
  schema_violation,
  empty_summary,
  // metrics and data
  empty_document,
  length_mismatch,
  too_few_points,
  zero_variance,
  unknown_sample,
  insufficient_train_data,
  empty_input,
  empty_run,
  empty_store,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reasonsum
