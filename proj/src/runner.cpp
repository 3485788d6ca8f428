#include "reasonsum/runner.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "reasonsum/datasets.hpp"
#include "reasonsum/http_transport.hpp"
#include "reasonsum/mock_provider.hpp"
#include "reasonsum/prompts.hpp"

namespace reasonsum::runner {

std::string_view to_string(CellStatus s) noexcept {
  switch (s) {
    case CellStatus::pending: return "pending";
    case CellStatus::done: return "done";
    case CellStatus::failed: return "failed";
  }
  return "pending";
}

std::string cell_id(const std::string& dataset_id, const StrategySpec& spec, const std::string& sample_id) {
  return dataset_id + "/" + config::spec_key(spec) + "/" + sample_id;
}

void to_json(json& j, const Cell& c) {
  j = json{{"cell_id", c.cell_id},
           {"dataset_id", c.dataset_id},
           {"sample_id", c.sample_id},
           {"strategy_index", c.strategy_index},
           {"status", to_string(c.status)},
           {"reason", c.reason},
           {"calls", c.calls}};
}

void from_json(const json& j, Cell& c) {
  j.at("cell_id").get_to(c.cell_id);
  j.at("dataset_id").get_to(c.dataset_id);
  j.at("sample_id").get_to(c.sample_id);
  j.at("strategy_index").get_to(c.strategy_index);
  const auto status = j.at("status").get<std::string>();
  if (status == "pending") c.status = CellStatus::pending;
  else if (status == "done") c.status = CellStatus::done;
  else if (status == "failed") c.status = CellStatus::failed;
  else throw Error(ErrorCode::parse_error, "unknown cell status '" + status + "'");
  c.reason = j.value("reason", std::string());
  c.calls = j.value("calls", std::int64_t{0});
}

void to_json(json& j, const RunManifest& m) {
  j = json{{"version", 1},
           {"config", m.config},
           {"template_checksums", m.template_checksums},
           {"ledger", {{"spent_calls", m.spent_calls}, {"spent_tokens", m.spent_tokens}}},
           {"cells", m.cells}};
}

void from_json(const json& j, RunManifest& m) {
  try {
    m.config = j.at("config");
    m.template_checksums = j.value("template_checksums", std::map<std::string, std::string>{});
    m.cells = j.at("cells").get<std::vector<Cell>>();
    const auto& ledger = j.at("ledger");
    m.spent_calls = ledger.value("spent_calls", std::int64_t{0});
    m.spent_tokens = ledger.value("spent_tokens", std::int64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("invalid manifest: ") + e.what());
  }
}

namespace {

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

void fsync_path(const fs::path& path, int flags) {
  const int fd = ::open(path.c_str(), flags);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

void write_all(int fd, std::string_view data, const fs::path& path) {
  while (!data.empty()) {
    const auto n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::io_error, "write failed for " + path.string());
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

void write_atomic(const fs::path& path, std::string_view contents) {
  const auto tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw Error(ErrorCode::io_error, "cannot write " + tmp);
  try {
    write_all(fd, contents, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot rename " + tmp + ": " + ec.message());
  fsync_path(path.parent_path().empty() ? fs::path(".") : path.parent_path(), O_RDONLY | O_DIRECTORY);
}

void append_line(const fs::path& path, std::string_view line) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw Error(ErrorCode::io_error, "cannot append to " + path.string());
  try {
    std::string buffer(line);
    buffer.push_back('\n');
    write_all(fd, buffer, path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::vector<json> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto eol = data.find('\n', pos);
    if (eol == std::string::npos) break;  // torn final write
    const auto line = std::string_view(data).substr(pos, eol - pos);
    pos = eol + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::parse_error, path.string() + ": corrupt line " + std::string(line.substr(0, 60)));
    }
    out.push_back(std::move(j));
  }
  return out;
}

RunManifest read_manifest(const fs::path& run_dir) {
  std::ifstream in(run_dir / kManifest);
  if (!in) throw Error(ErrorCode::io_error, "no run manifest in " + run_dir.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto j = json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::parse_error, "manifest in " + run_dir.string() + " is not valid JSON");
  return j.get<RunManifest>();
}

std::shared_ptr<provider::Transport> make_transport(const config::ExperimentConfig& config) {
  if (config.provider.kind == "mock") {
    if (!config.provider.mock_script) throw Error(ErrorCode::config_error, "mock provider needs a mock_script");
    return std::make_shared<provider::MockTransport>(provider::MockScript::load(*config.provider.mock_script));
  }
  return std::make_shared<provider::HttpTransport>(config.provider.http);
}

std::vector<SampleRecord> sample_datasets(const config::ExperimentConfig& config) {
  std::vector<SampleRecord> out;
  for (const auto& entry : config.datasets) {
    const auto records = datasets::load_jsonl(entry.path, entry.descriptor, Split::test);
    auto sampled = datasets::sample_test_set(records, config.sample_n, config.seed);
    out.insert(out.end(), std::make_move_iterator(sampled.begin()), std::make_move_iterator(sampled.end()));
  }
  return out;
}

std::vector<Cell> build_grid(const config::ExperimentConfig& config, const std::vector<SampleRecord>& samples) {
  std::vector<Cell> cells;
  for (const auto& entry : config.datasets) {
    const auto& id = entry.descriptor.dataset_id;
    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      for (const auto& sample : samples) {
        if (sample.dataset_id != id) continue;
        Cell cell;
        cell.cell_id = cell_id(id, config.strategies[s], sample.sample_id);
        cell.dataset_id = id;
        cell.sample_id = sample.sample_id;
        cell.strategy_index = s;
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

namespace {

std::vector<SampleRecord> read_samples(const fs::path& run_dir) {
  std::vector<SampleRecord> out;
  for (const auto& j : read_jsonl(run_dir / kSamples)) out.push_back(j.get<SampleRecord>());
  return out;
}

std::string samples_text(const std::vector<SampleRecord>& samples) {
  std::string out;
  for (const auto& s : samples) out += dump(json(s)) + "\n";
  return out;
}

using SampleIndex = std::map<std::pair<std::string, std::string>, const SampleRecord*>;

SampleIndex index_samples(const std::vector<SampleRecord>& samples) {
  SampleIndex index;
  for (const auto& s : samples) index[{s.dataset_id, s.sample_id}] = &s;
  return index;
}

std::map<std::string, std::vector<prompts::Exemplar>> load_exemplars(
    const config::ExperimentConfig& config, const std::vector<SampleRecord>& samples) {
  std::map<std::string, std::vector<prompts::Exemplar>> out;
  const bool needed = std::any_of(config.strategies.begin(), config.strategies.end(),
                                  [](const StrategySpec& s) { return s.shots > 0; });
  if (!needed) return out;
  for (const auto& entry : config.datasets) {
    if (!entry.train_path) continue;
    auto train = datasets::load_jsonl(*entry.train_path, entry.descriptor, Split::train);
    // Exemplars must never leak the evaluation set.
    std::set<std::string> eval_docs;
    for (const auto& s : samples) {
      if (s.dataset_id == entry.descriptor.dataset_id) eval_docs.insert(s.document);
    }
    std::erase_if(train, [&](const SampleRecord& r) { return eval_docs.count(r.document) > 0; });
    out[entry.descriptor.dataset_id] =
        datasets::pick_exemplars(train, 2, config.seed, config.exemplar_token_cap);
  }
  return out;
}

class RunStore {
 public:
  RunStore(fs::path dir, RunManifest manifest, std::shared_ptr<provider::BudgetLedger> ledger,
           std::function<void(const Cell&)> hook)
      : dir_(std::move(dir)), manifest_(std::move(manifest)), ledger_(std::move(ledger)), hook_(std::move(hook)) {}

  void record_done(std::size_t index, const SummaryResult& result) {
    std::lock_guard lock(mutex_);
    auto& cell = manifest_.cells[index];
    json line = result;
    line["cell_id"] = cell.cell_id;
    append_line(dir_ / kResults, dump(line));
    cell.status = CellStatus::done;
    cell.calls = static_cast<std::int64_t>(result.trace.total_calls());
    persist(cell);
  }

  void record_failed(std::size_t index, std::string reason) {
    std::lock_guard lock(mutex_);
    auto& cell = manifest_.cells[index];
    cell.status = CellStatus::failed;
    cell.reason = std::move(reason);
    persist(cell);
  }

  const RunManifest& manifest() const { return manifest_; }

 private:
  void persist(const Cell& cell) {
    manifest_.spent_calls = ledger_->spent_calls();
    manifest_.spent_tokens = ledger_->spent_tokens();
    write_atomic(dir_ / kManifest, json(manifest_).dump(1));
    if (hook_) hook_(cell);
  }

  fs::path dir_;
  RunManifest manifest_;
  std::shared_ptr<provider::BudgetLedger> ledger_;
  std::function<void(const Cell&)> hook_;
  std::mutex mutex_;
};

RunSummary summarize(const fs::path& dir, const RunManifest& m, std::size_t executed) {
  RunSummary s;
  s.run_dir = dir;
  s.cells = m.cells.size();
  for (const auto& c : m.cells) {
    if (c.status == CellStatus::done) ++s.done;
    else if (c.status == CellStatus::failed) ++s.failed;
    else ++s.pending;
  }
  s.executed = executed;
  s.spent_calls = m.spent_calls;
  return s;
}

}  // namespace

RunSummary run_experiment(const config::ExperimentConfig& config, const Hooks& hooks) {
  if (auto problems = config::validate_config(config); !problems.empty()) {
    throw Error(ErrorCode::config_error, problems.front());
  }
  const auto& dir = config.run_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create run directory " + dir.string() + ": " + ec.message());

  const auto snapshot = config::snapshot(config);
  RunManifest manifest;
  std::vector<SampleRecord> samples;
  if (fs::exists(dir / kManifest)) {
    manifest = read_manifest(dir);
    if (config::identity(manifest.config) != config::identity(snapshot)) {
      throw Error(ErrorCode::config_error,
                  dir.string() + " holds a different experiment; choose a new run_dir");
    }
    samples = read_samples(dir);
    // Resumes may change concurrency and budget.
    manifest.config = snapshot;
  } else {
    samples = sample_datasets(config);
    manifest.config = snapshot;
    manifest.template_checksums = prompts::template_checksums();
    manifest.cells = build_grid(config, samples);
    write_atomic(dir / kSamples, samples_text(samples));
    write_atomic(dir / kManifest, json(manifest).dump(1));
  }

  // A result that reached results.jsonl before a crash counts as done even if
  // the manifest update was lost.
  {
    std::map<std::string, std::int64_t> recorded;
    for (const auto& line : read_jsonl(dir / kResults)) {
      if (auto it = line.find("cell_id"); it != line.end() && it->is_string()) {
        recorded[it->get<std::string>()] = static_cast<std::int64_t>(line.at("trace").at("stages").size());
      }
    }
    bool changed = false;
    for (auto& cell : manifest.cells) {
      auto it = recorded.find(cell.cell_id);
      if (it != recorded.end() && cell.status != CellStatus::done) {
        cell.status = CellStatus::done;
        cell.reason.clear();
        cell.calls = it->second;
        changed = true;
      }
    }
    if (changed) write_atomic(dir / kManifest, json(manifest).dump(1));
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < manifest.cells.size(); ++i) {
    if (manifest.cells[i].status == CellStatus::pending) pending.push_back(i);
  }
  if (pending.empty()) return summarize(dir, manifest, 0);

  auto ledger = std::make_shared<provider::BudgetLedger>(config.budget, manifest.spent_calls, manifest.spent_tokens);
  if (!ledger->has_headroom()) {
    throw Error(ErrorCode::budget_exceeded, "budget is exhausted before any pending cell could run");
  }
  provider::Gateway gateway(hooks.transport ? hooks.transport : make_transport(config), ledger,
                            config.provider.retry, hooks.sleeper);

  const auto index = index_samples(samples);
  const auto exemplars = load_exemplars(config, samples);
  std::map<std::string, std::string> domains;
  for (const auto& d : config.datasets) domains[d.descriptor.dataset_id] = d.descriptor.domain;

  strategies::PipelineOptions options;
  options.decoding = config.decoding;
  options.stage_models = config.provider.stage_models;
  options.weights = config.weights;
  options.qag_min_confidence = config.qag_min_confidence;

  RunStore store(dir, manifest, ledger, hooks.on_cell_recorded);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> executed{0};
  std::atomic<bool> abort{false};
  std::mutex abort_mutex;
  std::exception_ptr abort_error;

  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const auto k = next.fetch_add(1);
      if (k >= pending.size()) return;
      const auto cell_index = pending[k];
      const auto& cell = manifest.cells[cell_index];
      const auto& spec = config.strategies[cell.strategy_index];
      auto sample = index.find({cell.dataset_id, cell.sample_id});
      if (sample == index.end()) {
        store.record_failed(cell_index, "unknown_sample: sample is missing from samples.jsonl");
        continue;
      }
      strategies::PipelineInput input;
      input.sample = *sample->second;
      input.domain = domains[cell.dataset_id];
      if (auto ex = exemplars.find(cell.dataset_id); ex != exemplars.end()) input.exemplars = ex->second;
      try {
        const auto result = strategies::run_strategy(input, spec, gateway, options);
        ++executed;
        store.record_done(cell_index, result);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::auth_error || e.code() == ErrorCode::io_error) {
          std::lock_guard lock(abort_mutex);
          if (!abort_error) abort_error = std::current_exception();
          abort = true;
          return;
        }
        ++executed;
        store.record_failed(cell_index, e.what());
      } catch (const std::exception& e) {
        ++executed;
        store.record_failed(cell_index, std::string("internal: ") + e.what());
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.concurrency), pending.size());
  std::vector<std::thread> threads;
  for (std::size_t i = 1; i < workers; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (abort_error) std::rethrow_exception(abort_error);
  return summarize(dir, store.manifest(), executed.load());
}

std::vector<RunSummary> sweep_reasoning_effort(const config::ExperimentConfig& config,
                                               const std::vector<ReasoningEffort>& levels, const Hooks& hooks) {
  std::vector<RunSummary> out;
  for (auto level : levels) {
    auto cfg = config;
    cfg.run_dir = config.run_dir / ("effort_" + std::string(to_string(level)));
    for (auto& spec : cfg.strategies) spec.reasoning_effort = level;
    out.push_back(run_experiment(cfg, hooks));
  }
  return out;
}

namespace {

std::map<std::string, json> by_cell(const std::vector<json>& lines) {
  std::map<std::string, json> out;
  for (const auto& j : lines) {
    if (auto it = j.find("cell_id"); it != j.end() && it->is_string()) out[it->get<std::string>()] = j;
  }
  return out;
}

std::vector<StrategySpec> snapshot_strategies(const RunManifest& m) {
  return m.config.at("strategies").get<std::vector<StrategySpec>>();
}

}  // namespace

ScoreSummary score_run(const fs::path& run_dir, provider::Gateway* judge) {
  const auto manifest = read_manifest(run_dir);
  const auto samples = read_samples(run_dir);
  const auto index = index_samples(samples);
  const auto results = by_cell(read_jsonl(run_dir / kResults));
  const auto scored = by_cell(read_jsonl(run_dir / kMetrics));
  const auto judged = by_cell(read_jsonl(run_dir / kGeval));

  ScoreSummary summary;
  std::size_t done = 0;
  for (const auto& cell : manifest.cells) {
    if (cell.status != CellStatus::done) continue;
    ++done;
    auto result = results.find(cell.cell_id);
    auto sample = index.find({cell.dataset_id, cell.sample_id});
    if (result == results.end() || sample == index.end()) continue;
    const auto summary_text = result->second.at("summary").get<std::string>();

    if (!scored.count(cell.cell_id)) {
      try {
        const auto m = metrics::score_summary(summary_text, *sample->second);
        append_line(run_dir / kMetrics, dump({{"cell_id", cell.cell_id}, {"metrics", m}}));
        ++summary.scored;
      } catch (const Error&) {
        ++summary.failed;
      }
    }
    if (judge != nullptr && !judged.count(cell.cell_id)) {
      StageSettings settings;
      if (auto models = manifest.config.at("provider").find("stage_models"); models != manifest.config.at("provider").end()) {
        settings.stage_models = models->get<std::map<std::string, std::string>>();
      }
      Session session(*judge, settings);
      try {
        const auto scores = judge::geval_score(session, sample->second->document, summary_text);
        append_line(run_dir / kGeval, dump({{"cell_id", cell.cell_id}, {"scores", scores}, {"trace", session.trace()}}));
        ++summary.geval_scored;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::budget_exceeded || e.code() == ErrorCode::auth_error) throw;
        ++summary.failed;
      }
    }
  }
  if (done == 0) throw Error(ErrorCode::empty_run, "run has no completed cells to score");
  return summary;
}

namespace {

// One CSV record; supports quoted fields with doubled quotes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  return fields;
}

std::string strip(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

}  // namespace

ImportSummary import_external_scores(const fs::path& run_dir, const fs::path& csv_path) {
  const auto manifest = read_manifest(run_dir);
  std::set<std::string> known;
  for (const auto& c : manifest.cells) known.insert(c.cell_id);

  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + csv_path.string());

  std::map<std::pair<std::string, std::string>, double> merged;
  for (const auto& j : read_jsonl(run_dir / kExternal)) {
    merged[{j.at("cell_id").get<std::string>(), j.at("metric").get<std::string>()}] = j.at("value").get<double>();
  }

  ImportSummary summary;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::string line;
  std::size_t row = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++row;
    if (header && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (strip(line).empty()) continue;
    auto fields = split_csv(line);
    for (auto& f : fields) f = strip(f);
    const auto where = csv_path.string() + " row " + std::to_string(row);
    if (header) {
      if (fields != std::vector<std::string>{"sample_id", "metric", "value"}) {
        throw Error(ErrorCode::parse_error, where + ": header must be sample_id,metric,value");
      }
      header = false;
      continue;
    }
    if (fields.size() != 3) throw Error(ErrorCode::parse_error, where + ": expected 3 fields, got " + std::to_string(fields.size()));
    const auto& id = fields[0];
    const auto& metric = fields[1];
    double value = 0;
    const auto* begin = fields[2].data();
    const auto* end = begin + fields[2].size();
    auto [ptr, err] = std::from_chars(begin, end, value);
    if (err != std::errc() || ptr != end || fields[2].empty() || !std::isfinite(value)) {
      throw Error(ErrorCode::parse_error, where + ": value '" + fields[2] + "' is not a number");
    }
    if (metric.empty()) throw Error(ErrorCode::parse_error, where + ": metric name is empty");
    if (!known.count(id)) throw Error(ErrorCode::unknown_sample, where + ": unknown sample_id '" + id + "'");
    if (auto prev = seen.find({id, metric}); prev != seen.end()) {
      summary.warnings.push_back(where + ": duplicate (" + id + ", " + metric + ") overrides row " +
                                 std::to_string(prev->second));
    }
    seen[{id, metric}] = row;
    if ((metric == "alignscore" || metric == "summac" || metric == "bertscore") && (value < 0.0 || value > 1.0)) {
      summary.warnings.push_back(where + ": " + metric + " value " + fields[2] + " is outside [0, 1]; kept");
    }
    merged[{id, metric}] = value;
    ++summary.rows;
  }
  if (header) throw Error(ErrorCode::parse_error, csv_path.string() + ": file is empty");

  std::string out;
  for (const auto& [key, value] : merged) {
    out += dump({{"cell_id", key.first}, {"metric", key.second}, {"value", value}}) + "\n";
  }
  write_atomic(run_dir / kExternal, out);
  return summary;
}

MetricStore load_store(const fs::path& run_dir) {
  const auto manifest = read_manifest(run_dir);
  MetricStore store;
  store.strategies = snapshot_strategies(manifest);
  for (const auto& d : manifest.config.at("datasets")) {
    const auto desc = d.get<datasets::DatasetDescriptor>();
    store.dataset_order.push_back(desc.dataset_id);
    store.dataset_groups[desc.dataset_id] = desc.group;
  }
  const auto scored = by_cell(read_jsonl(run_dir / kMetrics));
  const auto judged = by_cell(read_jsonl(run_dir / kGeval));
  std::map<std::string, std::map<std::string, double>> external;
  for (const auto& j : read_jsonl(run_dir / kExternal)) {
    external[j.at("cell_id").get<std::string>()][j.at("metric").get<std::string>()] = j.at("value").get<double>();
  }
  for (const auto& cell : manifest.cells) {
    if (cell.status != CellStatus::done) continue;
    auto m = scored.find(cell.cell_id);
    if (m == scored.end()) continue;
    StoreRow row;
    row.cell = cell;
    row.spec = store.strategies.at(cell.strategy_index);
    row.metrics = m->second.at("metrics").get<metrics::SampleMetrics>();
    if (auto g = judged.find(cell.cell_id); g != judged.end()) {
      row.metrics.geval = g->second.at("scores").get<judge::GEvalScores>();
    }
    if (auto e = external.find(cell.cell_id); e != external.end()) {
      for (const auto& [k, v] : e->second) row.metrics.external[k] = v;
    }
    store.rows.push_back(std::move(row));
  }
  return store;
}

}  // namespace reasonsum::runner
