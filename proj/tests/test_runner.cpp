#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <set>

#include "reasonsum/mock_provider.hpp"
#include "reasonsum/strategies.hpp"
#include "run_support.hpp"

using namespace reasonsum;
using namespace reasonsum::runner;
using testing_support::TempDir;
using testing_support::mock_experiment;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

Hooks counting(std::shared_ptr<provider::MockTransport> mock) {
  Hooks h;
  h.transport = std::move(mock);
  return h;
}

std::shared_ptr<provider::MockTransport> simulated() {
  return std::make_shared<provider::MockTransport>(provider::MockScript::simulated());
}

std::size_t count_status(const RunManifest& m, CellStatus s) {
  return static_cast<std::size_t>(
      std::count_if(m.cells.begin(), m.cells.end(), [&](const Cell& c) { return c.status == s; }));
}

}  // namespace

TEST(AtomicFiles, WriteAppendRead) {
  TempDir dir;
  write_atomic(dir / "a.json", "one");
  write_atomic(dir / "a.json", "two");
  EXPECT_EQ(testing_support::read_file(dir / "a.json"), "two");
  EXPECT_FALSE(fs::exists(dir / "a.json.tmp"));

  append_line(dir / "r.jsonl", R"({"n": 1})");
  append_line(dir / "r.jsonl", R"({"n": 2})");
  // A torn write leaves a final line without its newline.
  std::ofstream(dir / "r.jsonl", std::ios::app) << R"({"n": 3, "tr)";
  const auto lines = read_jsonl(dir / "r.jsonl");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1]["n"], 2);
  EXPECT_TRUE(read_jsonl(dir / "missing.jsonl").empty());

  testing_support::write_file(dir / "bad.jsonl", "{\"n\": 1}\nnot json\n");
  EXPECT_EQ(code_of([&] { read_jsonl(dir / "bad.jsonl"); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([&] { write_atomic(dir / "no/such/dir/x", "y"); }), ErrorCode::io_error);
}

TEST(Grid, OrderAndIds) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla, StrategyId::cot}, 3);
  const auto samples = sample_datasets(c);
  ASSERT_EQ(samples.size(), 3u);
  const auto cells = build_grid(c, samples);
  ASSERT_EQ(cells.size(), 6u);
  // Strategies middle, samples inner.
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(cells[i].strategy_index, i / 3);
    EXPECT_EQ(cells[i].sample_id, samples[i % 3].sample_id);
    EXPECT_EQ(cells[i].status, CellStatus::pending);
  }
  EXPECT_EQ(cells[4].cell_id, "cnn_dm/cot/0/none/" + samples[1].sample_id);
}

TEST(Run, FreshRunMatchesCallLaw) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla, StrategyId::e2a}, 3);
  auto mock = simulated();
  const auto s = run_experiment(c, counting(mock));
  EXPECT_EQ(s.cells, 6u);
  EXPECT_EQ(s.done, 6u);
  EXPECT_EQ(s.executed, 6u);
  EXPECT_EQ(s.pending, 0u);
  EXPECT_EQ(mock->request_count(), 3u * 1 + 3u * 2);
  EXPECT_EQ(s.spent_calls, 9);

  const auto m = read_manifest(c.run_dir);
  EXPECT_EQ(m.spent_calls, 9);
  EXPECT_FALSE(m.template_checksums.empty());
  EXPECT_EQ(m.config.dump().find("api_key\":\"sk"), std::string::npos);
  for (const auto& cell : m.cells) {
    EXPECT_EQ(cell.calls, c.strategies[cell.strategy_index].strategy == StrategyId::vanilla ? 1 : 2);
  }
  const auto results = read_jsonl(c.run_dir / kResults);
  ASSERT_EQ(results.size(), 6u);
  // P = 1 keeps grid order.
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(results[i]["cell_id"], m.cells[i].cell_id);
  EXPECT_EQ(read_jsonl(c.run_dir / kSamples).size(), 3u);
}

TEST(Run, RequestOrderFollowsGridAtConcurrencyOne) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::plan, StrategyId::vanilla}, 2);
  auto mock = simulated();
  run_experiment(c, counting(mock));
  EXPECT_EQ(mock->stage_sequence(),
            (std::vector<std::string>{"plan_plan", "plan_write", "plan_plan", "plan_write", "vanilla_summarize",
                                      "vanilla_summarize"}));
}

TEST(Run, CompletedRunIsANoOp) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla, StrategyId::cot}, 3);
  run_experiment(c);
  const auto manifest = testing_support::read_file(c.run_dir / kManifest);
  const auto results = testing_support::read_file(c.run_dir / kResults);
  auto mock = simulated();
  const auto again = run_experiment(c, counting(mock));
  EXPECT_EQ(again.executed, 0u);
  EXPECT_EQ(again.done, 6u);
  EXPECT_EQ(mock->request_count(), 0u);
  EXPECT_EQ(testing_support::read_file(c.run_dir / kManifest), manifest);
  EXPECT_EQ(testing_support::read_file(c.run_dir / kResults), results);
}

TEST(Run, ResumeAfterKillExecutesOnlyTheRest) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla, StrategyId::cot}, 3);
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    Hooks h;
    int recorded = 0;
    h.on_cell_recorded = [&](const Cell&) {
      if (++recorded == 3) _exit(0);
    };
    try {
      run_experiment(c, h);
    } catch (...) {
    }
    _exit(1);  // never reached when the hook fires
  }
  int status = 0;
  waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFEXITED(status));
  ASSERT_EQ(WEXITSTATUS(status), 0);
  EXPECT_EQ(count_status(read_manifest(c.run_dir), CellStatus::done), 3u);

  auto mock = simulated();
  const auto s = run_experiment(c, counting(mock));
  EXPECT_EQ(s.executed, 3u);
  EXPECT_EQ(mock->request_count(), 3u);
  EXPECT_EQ(s.done, 6u);
  EXPECT_EQ(read_jsonl(c.run_dir / kResults).size(), 6u);
}

TEST(Run, ResultsWithoutManifestUpdateAreReconciled) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 4);
  run_experiment(c);
  // Simulate a crash between the results append and the manifest write.
  auto m = read_manifest(c.run_dir);
  m.cells[1].status = CellStatus::pending;
  m.cells[3].status = CellStatus::pending;
  write_atomic(c.run_dir / kManifest, json(m).dump(1));
  auto mock = simulated();
  const auto s = run_experiment(c, counting(mock));
  EXPECT_EQ(s.executed, 0u);
  EXPECT_EQ(mock->request_count(), 0u);
  EXPECT_EQ(count_status(read_manifest(c.run_dir), CellStatus::done), 4u);
  EXPECT_EQ(read_manifest(c.run_dir).cells[1].calls, 1);
}

TEST(Run, ConcurrentRunCompletesEveryCellOnce) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla, StrategyId::qag, StrategyId::sc}, 6, 10);
  c.concurrency = 4;
  auto mock = simulated();
  const auto s = run_experiment(c, counting(mock));
  EXPECT_EQ(s.done, 18u);
  const auto results = read_jsonl(c.run_dir / kResults);
  std::set<std::string> ids;
  std::size_t calls = 0;
  for (const auto& r : results) {
    ids.insert(r["cell_id"].get<std::string>());
    calls += r["trace"]["stages"].size();
  }
  EXPECT_EQ(ids.size(), 18u);
  EXPECT_EQ(calls, mock->request_count());
}

TEST(Run, BudgetExhaustedMidRunFailsRemainingCells) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla}, 5);
  c.budget.max_calls = 4;
  const auto s = run_experiment(c);
  EXPECT_EQ(s.done, 4u);
  EXPECT_EQ(s.failed, 1u);
  const auto m = read_manifest(c.run_dir);
  EXPECT_EQ(m.cells[4].status, CellStatus::failed);
  EXPECT_NE(m.cells[4].reason.find("budget"), std::string::npos);
  EXPECT_EQ(m.spent_calls, 4);
}

TEST(Run, NoHeadroomBeforeAnyCellThrows) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  c.budget.max_calls = 0;
  EXPECT_EQ(code_of([&] { run_experiment(c); }), ErrorCode::budget_exceeded);
  // Spent calls persist, so a resume under the same cap also refuses.
  TempDir other;
  auto d = mock_experiment(other, {StrategyId::vanilla}, 3);
  d.budget.max_calls = 2;
  const auto s = run_experiment(d);
  EXPECT_EQ(s.done, 2u);
  EXPECT_EQ(s.failed, 1u);
}

TEST(Run, AuthErrorLeavesCellPendingAndStops) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 3);
  auto mock = std::make_shared<provider::MockTransport>(
      provider::MockScript::from_json({{"stages", {{"vanilla_summarize", {{"error", "auth"}}}}}}));
  EXPECT_EQ(code_of([&] { run_experiment(c, counting(mock)); }), ErrorCode::auth_error);
  EXPECT_EQ(mock->request_count(), 1u);
  const auto m = read_manifest(c.run_dir);
  EXPECT_EQ(count_status(m, CellStatus::pending), 3u);
  // Fixing the credentials and resuming completes the run.
  EXPECT_EQ(run_experiment(c).done, 3u);
}

TEST(Run, CellFailureIsRecordedAndRunContinues) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::e2a, StrategyId::vanilla}, 2);
  auto mock = std::make_shared<provider::MockTransport>(provider::MockScript::from_json(
      {{"fallback", "simulate"}, {"stages", {{"e2a_extract", "no json here"}}}}));
  const auto s = run_experiment(c, counting(mock));
  EXPECT_EQ(s.failed, 2u);
  EXPECT_EQ(s.done, 2u);
  const auto m = read_manifest(c.run_dir);
  EXPECT_NE(m.cells[0].reason.find("e2a_extract"), std::string::npos);
  // Failed cells are terminal: a resume does not retry them.
  auto again = simulated();
  EXPECT_EQ(run_experiment(c, counting(again)).executed, 0u);
  EXPECT_EQ(again->request_count(), 0u);
}

TEST(Run, DifferentExperimentInRunDirIsRejected) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  run_experiment(c);
  c.seed = 7;
  EXPECT_EQ(code_of([&] { run_experiment(c); }), ErrorCode::config_error);
  // Concurrency and budget may change between invocations.
  c.seed = 42;
  c.concurrency = 3;
  c.budget.max_calls = 100;
  EXPECT_EQ(run_experiment(c).executed, 0u);
}

TEST(Run, InvalidConfigIsConfigError) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  c.concurrency = 0;
  EXPECT_EQ(code_of([&] { run_experiment(c); }), ErrorCode::config_error);
  EXPECT_FALSE(fs::exists(c.run_dir / kManifest));
}

TEST(Run, TwoShotExemplarsComeFromTrainFileOnly) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  c.strategies[0].shots = 2;
  std::string train;
  for (int i = 0; i < 4; ++i) {
    train += json{{"id", "t" + std::to_string(i)},
                  {"document", "Trainmark document " + std::to_string(i) + ". It has two sentences."},
                  {"summary", "Trainmark summary " + std::to_string(i) + "."}}
                 .dump() +
             "\n";
  }
  testing_support::write_file(dir / "train.jsonl", train);
  c.datasets[0].train_path = dir / "train.jsonl";
  auto mock = simulated();
  run_experiment(c, counting(mock));
  ASSERT_EQ(mock->request_count(), 2u);
  for (const auto& req : mock->requests()) {
    std::string prompt;
    for (const auto& m : req.messages) prompt += m.text;
    EXPECT_NE(prompt.find("Trainmark summary"), std::string::npos);
  }
}

TEST(Sweep, OneRunDirectoryPerLevel) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  auto mock = simulated();
  const auto runs = sweep_reasoning_effort(c, {ReasoningEffort::minimal, ReasoningEffort::medium,
                                               ReasoningEffort::high}, counting(mock));
  ASSERT_EQ(runs.size(), 3u);
  std::size_t cells = 0;
  for (const auto& r : runs) cells += r.cells;
  EXPECT_EQ(cells, 6u);
  EXPECT_EQ(runs[1].run_dir, c.run_dir / "effort_medium");
  const auto requests = mock->requests();
  ASSERT_EQ(requests.size(), 6u);
  const ReasoningEffort want[] = {ReasoningEffort::minimal, ReasoningEffort::medium, ReasoningEffort::high};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(requests[i].reasoning_effort, want[i / 2]);
  EXPECT_EQ(read_manifest(runs[2].run_dir).config["strategies"][0]["reasoning_effort"], "high");
}

TEST(Score, OneRowPerDoneCellAndIdempotent) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 3);
  run_experiment(c);
  const auto first = score_run(c.run_dir);
  EXPECT_EQ(first.scored, 3u);
  EXPECT_EQ(first.failed, 0u);
  const auto results = testing_support::read_file(c.run_dir / kResults);
  const auto second = score_run(c.run_dir);
  EXPECT_EQ(second.scored, 0u);
  EXPECT_EQ(read_jsonl(c.run_dir / kMetrics).size(), 3u);
  // Scoring never touches generation records.
  EXPECT_EQ(testing_support::read_file(c.run_dir / kResults), results);
}

TEST(Score, MissingReferenceStillScoresReferenceFreeMetrics) {
  TempDir dir;
  testing_support::write_file(dir / "test.jsonl",
                              R"({"id": "a", "document": "The council met today. It approved a plan.", "summary": ""})"
                              "\n");
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 1);
  run_experiment(c);
  score_run(c.run_dir);
  const auto row = read_jsonl(c.run_dir / kMetrics).at(0)["metrics"].get<metrics::SampleMetrics>();
  EXPECT_FALSE(row.rouge1.has_value());
  EXPECT_GT(row.compression_ratio, 0.0);
  EXPECT_EQ(row.flags, std::vector<std::string>{"missing_reference"});
}

TEST(Score, EmptyRunIsAnError) {
  TempDir dir;
  auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  auto mock = std::make_shared<provider::MockTransport>(
      provider::MockScript::from_json({{"stages", {{"vanilla_summarize", "   "}}}}));
  run_experiment(c, counting(mock));
  EXPECT_EQ(code_of([&] { score_run(c.run_dir); }), ErrorCode::empty_run);
}

TEST(Score, GevalWithJudgeGateway) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  run_experiment(c);
  auto judge_mock = simulated();
  provider::Gateway judge(judge_mock, nullptr);
  const auto s = score_run(c.run_dir, &judge);
  EXPECT_EQ(s.geval_scored, 2u);
  EXPECT_EQ(judge_mock->stage_sequence(), (std::vector<std::string>{"geval_score", "geval_score"}));
  EXPECT_EQ(score_run(c.run_dir, &judge).geval_scored, 0u);
  const auto store = load_store(c.run_dir);
  ASSERT_EQ(store.rows.size(), 2u);
  ASSERT_TRUE(store.rows[0].metrics.geval.has_value());
  EXPECT_EQ(store.rows[0].metrics.geval->faithfulness, 5);
}

TEST(Import, MergesScoresIntoStore) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 2);
  run_experiment(c);
  score_run(c.run_dir);
  const auto m = read_manifest(c.run_dir);
  const auto a = m.cells[0].cell_id, b = m.cells[1].cell_id;
  testing_support::write_file(dir / "ext.csv", "sample_id,metric,value\n" + a + ",alignscore,0.7\n" + b +
                                                   ",alignscore,0.5\n\"" + a + "\",summac,0.25\n");
  const auto s = import_external_scores(c.run_dir, dir / "ext.csv");
  EXPECT_EQ(s.rows, 3u);
  EXPECT_TRUE(s.warnings.empty());
  const auto store = load_store(c.run_dir);
  EXPECT_EQ(store.rows[0].metrics.external.at("alignscore"), 0.7);
  EXPECT_EQ(store.rows[0].metrics.external.at("summac"), 0.25);
  EXPECT_EQ(store.rows[1].metrics.external.at("alignscore"), 0.5);

  // Re-importing a subset keeps earlier values and overrides the given ones.
  testing_support::write_file(dir / "ext2.csv", "sample_id,metric,value\n" + b + ",alignscore,0.9\n");
  import_external_scores(c.run_dir, dir / "ext2.csv");
  const auto again = load_store(c.run_dir);
  EXPECT_EQ(again.rows[0].metrics.external.at("alignscore"), 0.7);
  EXPECT_EQ(again.rows[1].metrics.external.at("alignscore"), 0.9);
}

TEST(Import, WarningsForDuplicatesAndRange) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 1);
  run_experiment(c);
  const auto id = read_manifest(c.run_dir).cells[0].cell_id;
  testing_support::write_file(dir / "ext.csv",
                              "sample_id,metric,value\n" + id + ",summac,0.2\n" + id + ",summac,1.5\n");
  const auto s = import_external_scores(c.run_dir, dir / "ext.csv");
  ASSERT_EQ(s.warnings.size(), 2u);
  EXPECT_NE(s.warnings[0].find("duplicate"), std::string::npos);
  EXPECT_NE(s.warnings[1].find("outside [0, 1]"), std::string::npos);
}

TEST(Import, BadRowsNameTheRow) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::vanilla}, 1);
  run_experiment(c);
  const auto id = read_manifest(c.run_dir).cells[0].cell_id;
  auto import_text = [&](const std::string& text) {
    testing_support::write_file(dir / "x.csv", text);
    return [&] { import_external_scores(c.run_dir, dir / "x.csv"); };
  };
  EXPECT_EQ(code_of(import_text("id,metric,value\n")), ErrorCode::parse_error);
  EXPECT_EQ(code_of(import_text("")), ErrorCode::parse_error);
  const auto bad_value = message_of(import_text("sample_id,metric,value\n" + id + ",summac,0.1\n" + id + ",summac,high\n"));
  EXPECT_NE(bad_value.find("row 3"), std::string::npos);
  EXPECT_EQ(code_of(import_text("sample_id,metric,value\n" + id + ",summac\n")), ErrorCode::parse_error);
  EXPECT_EQ(code_of(import_text("sample_id,metric,value\n" + id + ",summac,nan\n")), ErrorCode::parse_error);
  const auto unknown = message_of(import_text("sample_id,metric,value\nnope,summac,0.1\n"));
  EXPECT_NE(unknown.find("row 2"), std::string::npos);
  EXPECT_EQ(code_of(import_text("sample_id,metric,value\nnope,summac,0.1\n")), ErrorCode::unknown_sample);
  // Nothing was merged by the failed imports.
  EXPECT_FALSE(fs::exists(c.run_dir / kExternal));
}

TEST(Store, RowsCarrySpecsAndGroups) {
  TempDir dir;
  const auto c = mock_experiment(dir, {StrategyId::cot, StrategyId::vanilla}, 2);
  run_experiment(c);
  EXPECT_TRUE(load_store(c.run_dir).rows.empty());
  score_run(c.run_dir);
  const auto store = load_store(c.run_dir);
  EXPECT_EQ(store.dataset_order, std::vector<std::string>{"cnn_dm"});
  EXPECT_EQ(store.dataset_groups.at("cnn_dm"), datasets::Group::short_form);
  ASSERT_EQ(store.rows.size(), 4u);
  EXPECT_EQ(store.rows[0].spec.strategy, StrategyId::cot);
  EXPECT_EQ(store.rows[3].spec.strategy, StrategyId::vanilla);
  EXPECT_EQ(code_of([&] { load_store(dir / "nothing"); }), ErrorCode::io_error);
}
