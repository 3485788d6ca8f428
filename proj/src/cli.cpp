#include "reasonsum/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>

#include "reasonsum/datasets.hpp"
#include "reasonsum/mock_provider.hpp"
#include "reasonsum/report.hpp"
#include "reasonsum/runner.hpp"
#include "reasonsum/strategies.hpp"

namespace reasonsum::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::missing_field:
    case ErrorCode::missing_template:
    case ErrorCode::empty_input:
      return kConfig;
    case ErrorCode::auth_error: return kAuth;
    case ErrorCode::budget_exceeded: return kBudget;
    default: return kFailure;
  }
}

namespace {

struct GridFlags {
  std::string config;
  std::vector<std::string> strategies;
  std::vector<std::string> datasets;
  std::optional<int> shots;
  std::optional<std::string> effort;
  std::optional<int> concurrency;
  std::optional<std::string> mock;
  std::optional<std::string> run_dir;
  bool dry_run = false;
};

const std::vector<std::string> kEffortNames = {"none", "minimal", "low", "medium", "high"};

void add_grid_flags(CLI::App& cmd, GridFlags& f) {
  cmd.add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd.add_option("--strategy", f.strategies, "Strategy to run (repeatable); replaces the config's list")
      ->check(CLI::IsMember({"vanilla", "cot", "e2a", "qag", "cite", "deco", "plan", "ir", "sc"}));
  cmd.add_option("--dataset", f.datasets, "Dataset id to keep (repeatable)");
  cmd.add_option("--shots", f.shots, "Exemplar count for every strategy")->check(CLI::IsMember({0, 2}));
  cmd.add_option("--effort", f.effort, "Reasoning effort for every strategy")->check(CLI::IsMember(kEffortNames));
  cmd.add_option("--concurrency", f.concurrency, "Cells in flight")->check(CLI::PositiveNumber);
  cmd.add_option("--mock", f.mock, "Use the mock provider with this script");
  cmd.add_option("--run-dir", f.run_dir, "Override run_dir");
}

// Flags beat the environment, which load_config already applied over the file.
config::ExperimentConfig resolve(const GridFlags& f, const config::EnvLookup& env) {
  auto c = config::load_config(f.config, env);
  if (!f.datasets.empty()) {
    std::vector<config::DatasetEntry> kept;
    for (const auto& id : f.datasets) {
      auto it = std::find_if(c.datasets.begin(), c.datasets.end(),
                             [&](const config::DatasetEntry& d) { return d.descriptor.dataset_id == id; });
      if (it == c.datasets.end()) throw Error(ErrorCode::config_error, "--dataset: '" + id + "' is not in the config");
      kept.push_back(*it);
    }
    c.datasets = std::move(kept);
  }
  std::optional<ReasoningEffort> effort;
  if (f.effort) effort = parse_effort(*f.effort);
  std::vector<StrategySpec> specs;
  if (!f.strategies.empty()) {
    for (const auto& name : f.strategies) {
      const auto id = parse_strategy(name);
      if (!id) throw Error(ErrorCode::config_error, "--strategy: unknown strategy '" + name + "'");
      // Keep the config's knobs for this strategy when it has them.
      auto it = std::find_if(c.strategies.begin(), c.strategies.end(),
                             [&](const StrategySpec& s) { return s.strategy == *id; });
      StrategySpec spec = it != c.strategies.end() ? *it : StrategySpec{};
      spec.strategy = *id;
      specs.push_back(spec);
    }
  } else {
    specs = c.strategies;
  }
  std::vector<StrategySpec> unique;
  for (auto spec : specs) {
    if (f.shots) spec.shots = *f.shots;
    if (effort) spec.reasoning_effort = *effort;
    if (std::find(unique.begin(), unique.end(), spec) == unique.end()) unique.push_back(spec);
  }
  c.strategies = std::move(unique);
  if (f.concurrency) c.concurrency = *f.concurrency;
  if (f.mock) {
    c.provider.kind = "mock";
    c.provider.mock_script = fs::absolute(*f.mock);
  }
  if (f.run_dir) c.run_dir = *f.run_dir;
  if (auto problems = config::validate_config(c); !problems.empty()) {
    std::string joined;
    for (const auto& p : problems) joined += (joined.empty() ? "" : "; ") + p;
    throw Error(ErrorCode::config_error, joined);
  }
  return c;
}

void require_key(const config::ExperimentConfig& c) {
  if (c.provider.kind == "openai" && c.provider.http.api_key.empty()) {
    throw Error(ErrorCode::auth_error, c.provider.api_key_env + " is not set");
  }
}

std::string call_range(std::pair<int, int> r) {
  return r.first == r.second ? std::to_string(r.first) : std::to_string(r.first) + ".." + std::to_string(r.second);
}

int dry_run(const config::ExperimentConfig& c, std::ostream& out) {
  const auto samples = runner::sample_datasets(c);
  const auto cells = runner::build_grid(c, samples);
  out << "grid: " << c.datasets.size() << " datasets x " << c.strategies.size() << " strategies, " << cells.size()
      << " cells\n";
  std::vector<std::pair<std::int64_t, std::int64_t>> per_spec(c.strategies.size());
  std::vector<std::size_t> counts(c.strategies.size());
  for (const auto& cell : cells) {
    const auto calls = strategies::expected_calls(c.strategies[cell.strategy_index]);
    out << "  " << cell.cell_id << "  calls=" << call_range(calls) << "\n";
    per_spec[cell.strategy_index].first += calls.first;
    per_spec[cell.strategy_index].second += calls.second;
    ++counts[cell.strategy_index];
  }
  out << "estimated calls per strategy:\n";
  std::int64_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < c.strategies.size(); ++i) {
    out << "  " << config::spec_key(c.strategies[i]) << "  cells=" << counts[i] << "  calls="
        << call_range({static_cast<int>(per_spec[i].first), static_cast<int>(per_spec[i].second)}) << "\n";
    lo += per_spec[i].first;
    hi += per_spec[i].second;
  }
  out << "total calls: " << call_range({static_cast<int>(lo), static_cast<int>(hi)}) << "\n";
  return kOk;
}

void print_summary(const runner::RunSummary& s, std::ostream& out) {
  out << "run_dir: " << s.run_dir.string() << "\n"
      << "cells: " << s.cells << " (done " << s.done << ", failed " << s.failed << ", pending " << s.pending
      << "); executed " << s.executed << " now; provider calls to date " << s.spent_calls << "\n";
}

std::vector<fs::path> sweep_dirs(const fs::path& base) {
  std::vector<fs::path> out;
  for (const auto& level : kEffortNames) {
    const auto dir = base / ("effort_" + level);
    if (fs::exists(dir / runner::kManifest)) out.push_back(dir);
  }
  return out;
}

void report_dir(const fs::path& run_dir, std::ostream& out) {
  if (fs::exists(run_dir / runner::kManifest)) {
    for (const auto& p : report::write_reports(run_dir)) out << p.string() << "\n";
    return;
  }
  const auto dirs = sweep_dirs(run_dir);
  if (dirs.empty()) throw Error(ErrorCode::io_error, "no run manifest in " + run_dir.string());
  std::vector<std::pair<ReasoningEffort, runner::MetricStore>> levels;
  for (const auto& dir : dirs) {
    for (const auto& p : report::write_reports(dir)) out << p.string() << "\n";
    const auto level = *parse_effort(dir.filename().string().substr(std::string("effort_").size()));
    levels.emplace_back(level, runner::load_store(dir));
  }
  fs::create_directories(run_dir / runner::kReports);
  const auto path = run_dir / runner::kReports / "effort_sweep.csv";
  runner::write_atomic(path, report::effort_sweep_csv(levels));
  out << path.string() << "\n";
}

int fail(std::ostream& err, const Error& e, int code) {
  err << "error: " << e.what() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const config::EnvLookup& env) {
  CLI::App app{"Reasoning-strategy summarization benchmark harness", "reason-sum"};
  app.require_subcommand(1);

  GridFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run (or resume) the experiment grid");
  add_grid_flags(*run_cmd, run_flags);
  run_cmd->add_flag("--dry-run", run_flags.dry_run, "Print the grid and estimated calls, send nothing");

  GridFlags sweep_flags;
  std::vector<std::string> levels = kEffortNames;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the grid once per reasoning effort level");
  add_grid_flags(*sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--levels", levels, "Effort levels")->delimiter(',')->check(CLI::IsMember(kEffortNames));

  std::string score_dir;
  bool score_geval = false;
  std::optional<std::string> score_config, score_mock;
  auto* score_cmd = app.add_subcommand("score", "Compute metrics for every completed cell");
  score_cmd->add_option("run_dir", score_dir)->required();
  score_cmd->add_flag("--geval", score_geval, "Also score with the G-Eval judge");
  score_cmd->add_option("--config", score_config, "Config that describes the judge provider");
  score_cmd->add_option("--mock", score_mock, "Judge with the mock provider and this script");

  std::string report_run;
  auto* report_cmd = app.add_subcommand("report", "Render report tables for a scored run or sweep");
  report_cmd->add_option("run_dir", report_run)->required();

  std::string import_dir, import_csv;
  auto* import_cmd = app.add_subcommand("import-scores", "Merge a sample_id,metric,value CSV");
  import_cmd->add_option("run_dir", import_dir)->required();
  import_cmd->add_option("csv", import_csv)->required();

  std::string stats_path;
  std::string stats_id = "dataset";
  std::optional<std::string> stats_doc, stats_ref, stats_format;
  auto* stats_cmd = app.add_subcommand("stats", "Reference-summary statistics of a JSONL dataset");
  stats_cmd->add_option("path", stats_path)->required();
  stats_cmd->add_option("--dataset-id", stats_id, "Registry id for field and format defaults");
  stats_cmd->add_option("--document-field", stats_doc);
  stats_cmd->add_option("--reference-field", stats_ref);
  stats_cmd->add_option("--format", stats_format)->check(CLI::IsMember({"SDS", "MDS", "LNS", "TTS"}));

  std::string validate_config_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a config and its datasets");
  validate_cmd->add_option("--config", validate_config_path)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfig;
  }

  try {
    if (*run_cmd) {
      const auto c = resolve(run_flags, env);
      if (run_flags.dry_run) return dry_run(c, out);
      require_key(c);
      print_summary(runner::run_experiment(c), out);
      return kOk;
    }
    if (*sweep_cmd) {
      const auto c = resolve(sweep_flags, env);
      require_key(c);
      std::vector<ReasoningEffort> efforts;
      for (const auto& l : levels) efforts.push_back(*parse_effort(l));
      for (const auto& s : runner::sweep_reasoning_effort(c, efforts)) {
        print_summary(s, out);
        runner::score_run(s.run_dir);
      }
      report_dir(c.run_dir, out);
      return kOk;
    }
    if (*score_cmd) {
      std::unique_ptr<provider::Gateway> judge;
      std::optional<config::ExperimentConfig> c;
      if (score_config) c = config::load_config(*score_config, env);
      if (score_geval || (c && c->geval)) {
        std::shared_ptr<provider::Transport> transport;
        if (score_mock) {
          transport = std::make_shared<provider::MockTransport>(provider::MockScript::load(*score_mock));
        } else if (c) {
          require_key(*c);
          transport = runner::make_transport(*c);
        } else {
          throw Error(ErrorCode::config_error, "--geval needs --config or --mock to reach a judge");
        }
        auto ledger = std::make_shared<provider::BudgetLedger>(c ? c->budget : provider::BudgetLimits{});
        judge = std::make_unique<provider::Gateway>(transport, ledger, c ? c->provider.retry : provider::RetryPolicy{});
      }
      const auto s = runner::score_run(score_dir, judge.get());
      out << "scored " << s.scored << " new";
      if (judge) out << ", G-Eval " << s.geval_scored << " new";
      out << ", " << s.failed << " failed\n";
      return kOk;
    }
    if (*report_cmd) {
      report_dir(report_run, out);
      return kOk;
    }
    if (*import_cmd) {
      try {
        const auto s = runner::import_external_scores(import_dir, import_csv);
        for (const auto& w : s.warnings) err << "warning: " << w << "\n";
        out << "imported " << s.rows << " rows\n";
        return kOk;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::parse_error || e.code() == ErrorCode::unknown_sample) {
          return fail(err, e, kBadImportRow);
        }
        throw;
      }
    }
    if (*stats_cmd) {
      try {
        datasets::DatasetDescriptor d = datasets::find_descriptor(stats_id).value_or(datasets::DatasetDescriptor{});
        d.dataset_id = stats_id;
        if (stats_doc) d.document_field = *stats_doc;
        if (stats_ref) d.reference_field = *stats_ref;
        if (stats_format) d.format = *datasets::parse_format(*stats_format);
        const auto records = datasets::load_jsonl(stats_path, d);
        const auto s = datasets::dataset_statistics(records);
        char line[256];
        std::snprintf(line, sizeof line,
                      "records: %zu\ndoc_tokens: %.2f\nsum_tokens: %.2f\ncompression: %.2f\ncoverage: %.4f\n"
                      "density: %.4f\n",
                      s.count, s.doc_tokens, s.sum_tokens, s.compression, s.coverage, s.density);
        out << line;
        return kOk;
      } catch (const Error& e) {
        return fail(err, e, kConfig);
      }
    }
    if (*validate_cmd) {
      try {
        GridFlags f;
        f.config = validate_config_path;
        const auto c = resolve(f, env);
        const auto samples = runner::sample_datasets(c);
        out << "config ok: " << c.datasets.size() << " datasets, " << c.strategies.size() << " strategies, "
            << runner::build_grid(c, samples).size() << " cells\n";
        return kOk;
      } catch (const Error& e) {
        return fail(err, e, kConfig);
      }
    }
  } catch (const Error& e) {
    return fail(err, e, exit_code_for(e.code()));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace reasonsum::cli
