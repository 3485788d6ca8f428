#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reasonsum/core.hpp"
#include "reasonsum/datasets.hpp"
#include "reasonsum/http_transport.hpp"
#include "reasonsum/judge.hpp"
#include "reasonsum/provider.hpp"

namespace reasonsum::config {

namespace fs = std::filesystem;

struct DatasetEntry {
  datasets::DatasetDescriptor descriptor;
  fs::path path;
  // Source of 2-shot exemplars; required when any strategy uses 2 shots.
  std::optional<fs::path> train_path;
};

struct ProviderConfig {
  // "openai" (chat-completions over HTTP) or "mock".
  std::string kind = "openai";
  provider::HttpSettings http;
  std::string api_key_env = "REASON_SUM_API_KEY";
  std::optional<fs::path> mock_script;
  provider::RetryPolicy retry;
  // Model override by stage name (e.g. "sc_judge", "geval_score").
  std::map<std::string, std::string> stage_models;
};

struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<StrategySpec> strategies;
  ProviderConfig provider;
  provider::DecodingSettings decoding;
  judge::RubricWeights weights;
  // Score every summary with the G-Eval rubric during `score`.
  bool geval = false;
  int qag_min_confidence = 1;
  int concurrency = 1;
  provider::BudgetLimits budget;
  fs::path run_dir = "runs/default";
  std::size_t sample_n = 100;
  std::uint64_t seed = 42;
  std::size_t exemplar_token_cap = 800;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Replaces `${NAME}` in every string of `j`; unset variables expand to "".
json interpolate_env(const json& j, const EnvLookup& env);

/// Parses a config object. Relative paths resolve against `base_dir`.
/// Environment overrides (REASON_SUM_BASE_URL, REASON_SUM_MODEL,
/// REASON_SUM_CONCURRENCY) beat file values; the API key comes from
/// provider.api_key or, when that is empty, the `api_key_env` variable.
/// Throws config_error with the offending field path.
ExperimentConfig parse_config(const json& j, const fs::path& base_dir, const EnvLookup& env = process_env);
ExperimentConfig load_config(const fs::path& path, const EnvLookup& env = process_env);

/// Every violated invariant, each prefixed with its field path.
std::vector<std::string> validate_config(const ExperimentConfig& config);

/// Serializable view of the config for manifests. Never contains the API key.
json snapshot(const ExperimentConfig& config);

/// Snapshot fields that must match for a run directory to be resumed
/// (everything except concurrency and budget).
json identity(const json& snapshot);

/// Stable key of a strategy spec within a run: `<strategy>/<shots>/<effort>`.
std::string spec_key(const StrategySpec& spec);

}  // namespace reasonsum::config
