#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reasonsum/config.hpp"
#include "reasonsum/core.hpp"
#include "reasonsum/metrics.hpp"
#include "reasonsum/provider.hpp"
#include "reasonsum/strategies.hpp"

namespace reasonsum::runner {

namespace fs = std::filesystem;

enum class CellStatus { pending, done, failed };

std::string_view to_string(CellStatus s) noexcept;

/// One (dataset, strategy spec, sample) unit of the grid.
struct Cell {
  std::string cell_id;  // <dataset>/<strategy>/<shots>/<effort>/<sample_id>
  std::string dataset_id;
  std::string sample_id;
  std::size_t strategy_index = 0;
  CellStatus status = CellStatus::pending;
  std::string reason;  // failure reason, empty unless failed
  std::int64_t calls = 0;

  bool operator==(const Cell&) const = default;
};

std::string cell_id(const std::string& dataset_id, const StrategySpec& spec, const std::string& sample_id);

struct RunManifest {
  json config;  // config::snapshot
  std::map<std::string, std::string> template_checksums;
  std::vector<Cell> cells;
  std::int64_t spent_calls = 0;
  std::int64_t spent_tokens = 0;
};

void to_json(json& j, const Cell& c);
void from_json(const json& j, Cell& c);
void to_json(json& j, const RunManifest& m);
void from_json(const json& j, RunManifest& m);

/// Run directory file names.
inline constexpr const char* kManifest = "manifest.json";
inline constexpr const char* kResults = "results.jsonl";
inline constexpr const char* kSamples = "samples.jsonl";
inline constexpr const char* kMetrics = "metrics.jsonl";
inline constexpr const char* kGeval = "geval.jsonl";
inline constexpr const char* kExternal = "external.jsonl";
inline constexpr const char* kReports = "reports";

/// Writes `contents` to `path` through a temporary file, fsync and rename.
void write_atomic(const fs::path& path, std::string_view contents);
/// Appends one line and fsyncs before returning.
void append_line(const fs::path& path, std::string_view line);
/// Complete lines of a JSONL file; a torn trailing line is ignored.
std::vector<json> read_jsonl(const fs::path& path);

RunManifest read_manifest(const fs::path& run_dir);

struct Hooks {
  // Replaces the transport the config describes (tests inject mocks here).
  std::shared_ptr<provider::Transport> transport;
  provider::Sleeper sleeper;
  // Called by the writer after each cell is durably recorded.
  std::function<void(const Cell&)> on_cell_recorded;
};

/// Transport described by the config: MockTransport over the script, or
/// HttpTransport.
std::shared_ptr<provider::Transport> make_transport(const config::ExperimentConfig& config);

struct RunSummary {
  fs::path run_dir;
  std::size_t cells = 0;
  std::size_t done = 0;
  std::size_t failed = 0;
  std::size_t pending = 0;
  // Cells executed by this invocation.
  std::size_t executed = 0;
  std::int64_t spent_calls = 0;
};

/// The evaluation samples of every dataset, in grid order.
std::vector<SampleRecord> sample_datasets(const config::ExperimentConfig& config);

/// The grid, datasets outer, strategies middle, samples inner.
std::vector<Cell> build_grid(const config::ExperimentConfig& config,
                             const std::vector<SampleRecord>& samples);

/// Executes every pending cell at most once with up to `concurrency` cells in
/// flight. Cell failures are recorded and the run continues; an auth error
/// stops scheduling, leaves the cell pending and is rethrown. Throws
/// budget_exceeded when the budget has no headroom before any pending cell.
RunSummary run_experiment(const config::ExperimentConfig& config, const Hooks& hooks = {});

/// Runs the same grid once per level into `<run_dir>/effort_<level>` with
/// every strategy's reasoning effort set to the level.
std::vector<RunSummary> sweep_reasoning_effort(const config::ExperimentConfig& config,
                                               const std::vector<ReasoningEffort>& levels,
                                               const Hooks& hooks = {});

struct ScoreSummary {
  std::size_t scored = 0;
  std::size_t geval_scored = 0;
  std::size_t failed = 0;
};

/// Computes SampleMetrics for every done cell without a metrics row (and
/// G-Eval scores when `judge` is given). Idempotent; never touches results.
ScoreSummary score_run(const fs::path& run_dir, provider::Gateway* judge = nullptr);

struct ImportSummary {
  std::size_t rows = 0;
  std::vector<std::string> warnings;
};

/// Merges a `sample_id,metric,value` CSV (sample_id is the cell id) into
/// external.jsonl. Throws parse_error or unknown_sample naming the row.
ImportSummary import_external_scores(const fs::path& run_dir, const fs::path& csv_path);

/// One row per scored cell with metrics, G-Eval and external scores merged.
struct StoreRow {
  Cell cell;
  StrategySpec spec;
  metrics::SampleMetrics metrics;
};

struct MetricStore {
  std::vector<std::string> dataset_order;
  std::map<std::string, datasets::Group> dataset_groups;
  std::vector<StrategySpec> strategies;
  std::vector<StoreRow> rows;
};

MetricStore load_store(const fs::path& run_dir);

}  // namespace reasonsum::runner
