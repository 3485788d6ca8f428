#include "reasonsum/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "reasonsum/error.hpp"

namespace reasonsum::report {

namespace {

constexpr std::string_view kMissing = "—";

const std::vector<std::string>& base_metrics() {
  static const std::vector<std::string> k = {"rouge",     "cr",     "abstractiveness", "coverage",
                                             "density",   "bertscore", "summac",       "alignscore"};
  return k;
}

double mean(const std::vector<double>& xs) {
  double s = 0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

std::optional<double> mean_opt(const std::vector<std::optional<double>>& xs) {
  std::vector<double> present;
  for (const auto& x : xs) {
    if (x) present.push_back(*x);
  }
  if (present.empty()) return std::nullopt;
  return mean(present);
}

std::vector<RowKey> row_order(const runner::MetricStore& store) {
  std::vector<RowKey> rows;
  for (const auto& spec : store.strategies) {
    RowKey key{method_label(spec), spec.shots};
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }
  return rows;
}

// Per row key and dataset, the mean over samples (absent when no sample has the metric).
std::map<RowKey, std::map<std::string, std::optional<double>>> dataset_means(const runner::MetricStore& store,
                                                                           std::string_view metric) {
  std::map<RowKey, std::map<std::string, std::vector<double>>> values;
  for (const auto& row : store.rows) {
    auto v = metric_value(row.metrics, metric);
    auto& bucket = values[RowKey{method_label(row.spec), row.spec.shots}][row.cell.dataset_id];
    if (v) bucket.push_back(*v);
  }
  std::map<RowKey, std::map<std::string, std::optional<double>>> out;
  for (const auto& [key, per_dataset] : values) {
    for (const auto& [dataset, xs] : per_dataset) {
      out[key][dataset] = xs.empty() ? std::nullopt : std::optional<double>(mean(xs));
    }
  }
  return out;
}

std::optional<double> lookup(const std::map<RowKey, std::map<std::string, std::optional<double>>>& means,
                             const RowKey& key, const std::string& dataset) {
  auto r = means.find(key);
  if (r == means.end()) return std::nullopt;
  auto d = r->second.find(dataset);
  return d == r->second.end() ? std::nullopt : d->second;
}

std::optional<double> row_average(const Table& t, std::size_t row) {
  return t.cells[row].back();
}

std::size_t display_width(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (!s.empty() && s.front() == '-') s.erase(0, 1);
  }
  return s;
}

}  // namespace

MetricDef metric_def(std::string_view name) {
  if (name == "rouge" || name == "cr" || name == "abstractiveness" || name == "bertscore" || name == "summac" ||
      name == "alignscore") {
    return {std::string(name), 100.0, 2};
  }
  if (name == "coverage" || name == "density") return {std::string(name), 1.0, 3};
  return {std::string(name), 1.0, 2};
}

std::optional<double> metric_value(const metrics::SampleMetrics& m, std::string_view name) {
  if (name == "rouge") return m.rouge_avg;
  if (name == "cr") return m.compression_ratio;
  if (name == "abstractiveness") return m.abstractiveness;
  if (name == "coverage") return m.frag_coverage;
  if (name == "density") return m.frag_density;
  if (name == "geval_completeness") return m.geval ? std::optional(m.geval->completeness) : std::nullopt;
  if (name == "geval_conciseness") return m.geval ? std::optional(m.geval->conciseness) : std::nullopt;
  if (name == "geval_faithfulness") return m.geval ? std::optional(m.geval->faithfulness) : std::nullopt;
  if (auto it = m.external.find(std::string(name)); it != m.external.end()) return it->second;
  return std::nullopt;
}

Table main_table(const runner::MetricStore& store, std::string_view metric) {
  if (store.rows.empty()) throw Error(ErrorCode::empty_store, "no scored cells; run `score` first");
  const auto means = dataset_means(store, metric);
  Table t;
  t.metric = metric_def(metric);
  t.columns = store.dataset_order;
  t.columns.emplace_back("Average");
  t.rows = row_order(store);
  for (const auto& key : t.rows) {
    std::vector<std::optional<double>> cells;
    for (const auto& dataset : store.dataset_order) cells.push_back(lookup(means, key, dataset));
    cells.push_back(mean_opt(cells));
    t.cells.push_back(std::move(cells));
  }
  return t;
}

Table grouped_table(const runner::MetricStore& store, std::string_view metric) {
  const auto base = main_table(store, metric);
  Table t;
  t.metric = base.metric;
  t.columns = {"Short", "Long", "Table", "Average"};
  t.rows = base.rows;
  const datasets::Group groups[] = {datasets::Group::short_form, datasets::Group::long_form,
                                    datasets::Group::table};
  for (std::size_t r = 0; r < base.rows.size(); ++r) {
    std::vector<std::optional<double>> cells;
    for (auto g : groups) {
      std::vector<std::optional<double>> members;
      for (std::size_t d = 0; d < store.dataset_order.size(); ++d) {
        auto it = store.dataset_groups.find(store.dataset_order[d]);
        if (it != store.dataset_groups.end() && it->second == g) members.push_back(base.cells[r][d]);
      }
      cells.push_back(mean_opt(members));
    }
    cells.push_back(row_average(base, r));
    t.cells.push_back(std::move(cells));
  }
  return t;
}

std::string format_cell(const MetricDef& metric, std::optional<double> value) {
  if (!value) return std::string(kMissing);
  return fmt(*value * metric.scale, metric.decimals);
}

std::string to_csv(const Table& t) {
  std::string out = "method,shots";
  for (const auto& c : t.columns) out += "," + csv_field(c);
  out += "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += csv_field(t.rows[r].method) + "," + std::to_string(t.rows[r].shots);
    for (const auto& v : t.cells[r]) out += "," + (v ? format_cell(t.metric, v) : std::string());
    out += "\n";
  }
  return out;
}

std::string to_text(const Table& t) {
  // Best per column compares the printed values so ties at the shown
  // precision are all marked.
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"method", "shots"};
  header.insert(header.end(), t.columns.begin(), t.columns.end());
  grid.push_back(header);
  std::vector<std::optional<double>> best(t.columns.size());
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    for (const auto& row : t.cells) {
      if (!row[c]) continue;
      const double shown = std::stod(format_cell(t.metric, row[c]));
      if (!best[c] || shown > *best[c]) best[c] = shown;
    }
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::vector<std::string> line = {t.rows[r].method, std::to_string(t.rows[r].shots)};
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      auto s = format_cell(t.metric, t.cells[r][c]);
      if (t.cells[r][c] && t.rows.size() > 1 && std::stod(s) == *best[c]) s += "*";
      line.push_back(std::move(s));
    }
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : grid) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], display_width(line[c]));
  }
  std::string out;
  for (const auto& line : grid) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      const auto pad = std::string(width[c] - display_width(line[c]), ' ');
      if (c > 0) text += "  ";
      text += c == 0 ? line[c] + pad : pad + line[c];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
  }
  return out;
}

Tradeoff fit_points(std::vector<TradeoffPoint> points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::too_few_points,
                "trade-off fit needs at least 3 methods with both metrics, have " + std::to_string(points.size()));
  }
  std::vector<double> xs, ys;
  for (const auto& p : points) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  Tradeoff t;
  t.fit = metrics::pearson_fit(xs, ys);
  t.points = std::move(points);
  return t;
}

Tradeoff render_tradeoff(const runner::MetricStore& store, std::string_view x_metric, std::string_view y_metric) {
  const auto xt = main_table(store, x_metric);
  const auto yt = main_table(store, y_metric);
  std::vector<TradeoffPoint> points;
  for (std::size_t r = 0; r < xt.rows.size(); ++r) {
    auto x = row_average(xt, r);
    auto y = row_average(yt, r);
    if (x && y) points.push_back({xt.rows[r].method + "/" + std::to_string(xt.rows[r].shots), *x, *y});
  }
  return fit_points(std::move(points));
}

std::string tradeoff_csv(const Tradeoff& t) {
  std::string out = "method,x,y\n";
  for (const auto& p : t.points) out += csv_field(p.method) + "," + fmt(p.x, 6) + "," + fmt(p.y, 6) + "\n";
  return out;
}

std::string tradeoff_fit_csv(const Tradeoff& t) {
  return "r,p_value,n,slope,intercept\n" + fmt(t.fit.r, 6) + "," + fmt(t.fit.p_value, 6) + "," +
         std::to_string(t.fit.n) + "," + fmt(t.fit.slope, 6) + "," + fmt(t.fit.intercept, 6) + "\n";
}

std::string_view to_string(Paradigm p) noexcept {
  switch (p) {
    case Paradigm::vanilla: return "Vanilla";
    case Paradigm::augmentation: return "Augmentation";
    case Paradigm::organization: return "Organization";
    case Paradigm::reflective: return "Reflective";
    case Paradigm::lrm: return "LRM";
  }
  return "Vanilla";
}

Paradigm paradigm_of(const StrategySpec& spec) {
  switch (spec.strategy) {
    case StrategyId::vanilla:
      return spec.reasoning_effort == ReasoningEffort::none ? Paradigm::vanilla : Paradigm::lrm;
    case StrategyId::cot:
    case StrategyId::cite:
    case StrategyId::e2a:
    case StrategyId::qag: return Paradigm::augmentation;
    case StrategyId::deco:
    case StrategyId::plan: return Paradigm::organization;
    case StrategyId::ir:
    case StrategyId::sc: return Paradigm::reflective;
  }
  return Paradigm::vanilla;
}

std::vector<ParadigmRow> render_paradigm_abstractiveness(const runner::MetricStore& store) {
  const auto abs = main_table(store, "abstractiveness");
  const auto rouge = main_table(store, "rouge");
  const auto summac = main_table(store, "summac");
  std::map<RowKey, Paradigm> of;
  for (const auto& spec : store.strategies) of.emplace(RowKey{method_label(spec), spec.shots}, paradigm_of(spec));

  std::vector<ParadigmRow> out;
  for (auto p : {Paradigm::vanilla, Paradigm::augmentation, Paradigm::organization, Paradigm::reflective,
                 Paradigm::lrm}) {
    std::vector<std::optional<double>> a, r, s;
    bool any = false;
    for (std::size_t i = 0; i < abs.rows.size(); ++i) {
      if (of.at(abs.rows[i]) != p) continue;
      any = true;
      a.push_back(row_average(abs, i));
      r.push_back(row_average(rouge, i));
      s.push_back(row_average(summac, i));
    }
    if (any) out.push_back({p, mean_opt(a), mean_opt(r), mean_opt(s)});
  }
  return out;
}

std::string paradigm_csv(const std::vector<ParadigmRow>& rows) {
  const auto pct = metric_def("abstractiveness");
  std::string out = "paradigm,abstractiveness,rouge,summac\n";
  for (const auto& row : rows) {
    auto cell = [&](std::optional<double> v) { return v ? format_cell(pct, v) : std::string(); };
    out += std::string(to_string(row.paradigm)) + "," + cell(row.abstractiveness) + "," + cell(row.rouge) + "," +
           cell(row.summac) + "\n";
  }
  return out;
}

std::string effort_sweep_csv(const std::vector<std::pair<ReasoningEffort, runner::MetricStore>>& levels) {
  std::string out = "level,dataset,metric,value\n";
  for (const auto& [level, store] : levels) {
    if (store.rows.empty()) continue;
    for (const char* metric : {"alignscore", "summac", "rouge", "bertscore"}) {
      const auto t = main_table(store, metric);
      std::vector<std::optional<double>> per_dataset;
      for (std::size_t d = 0; d < store.dataset_order.size(); ++d) {
        std::vector<std::optional<double>> column;
        for (const auto& row : t.cells) column.push_back(row[d]);
        per_dataset.push_back(mean_opt(column));
        if (per_dataset.back()) {
          out += std::string(to_string(level)) + "," + csv_field(store.dataset_order[d]) + "," + metric + "," +
                 fmt(*per_dataset.back(), 6) + "\n";
        }
      }
      if (auto avg = mean_opt(per_dataset)) {
        out += std::string(to_string(level)) + ",average," + metric + "," + fmt(*avg, 6) + "\n";
      }
    }
  }
  return out;
}

std::vector<std::string> metrics_present(const runner::MetricStore& store) {
  std::vector<std::string> out = base_metrics();
  bool geval = false;
  std::set<std::string> extra;
  for (const auto& row : store.rows) {
    geval = geval || row.metrics.geval.has_value();
    for (const auto& [name, _] : row.metrics.external) {
      if (std::find(out.begin(), out.end(), name) == out.end()) extra.insert(name);
    }
  }
  if (geval) {
    for (const char* g : {"geval_completeness", "geval_conciseness", "geval_faithfulness"}) out.emplace_back(g);
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::vector<std::filesystem::path> write_reports(const std::filesystem::path& run_dir) {
  const auto store = runner::load_store(run_dir);
  if (store.rows.empty()) throw Error(ErrorCode::empty_store, "no scored cells in " + run_dir.string());
  const auto dir = run_dir / runner::kReports;
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    runner::write_atomic(dir / name, body);
    written.push_back(dir / name);
  };
  for (const auto& metric : metrics_present(store)) {
    const auto main = main_table(store, metric);
    emit("main_" + metric + ".csv", to_csv(main));
    emit("main_" + metric + ".txt", to_text(main));
    const auto grouped = grouped_table(store, metric);
    emit("grouped_" + metric + ".csv", to_csv(grouped));
    emit("grouped_" + metric + ".txt", to_text(grouped));
  }
  emit("paradigm.csv", paradigm_csv(render_paradigm_abstractiveness(store)));
  try {
    const auto t = render_tradeoff(store, "bertscore", "alignscore");
    emit("tradeoff.csv", tradeoff_csv(t));
    emit("tradeoff_fit.csv", tradeoff_fit_csv(t));
  } catch (const Error& e) {
    // Fewer than 3 methods with both scores, or constant scores.
    if (e.code() != ErrorCode::too_few_points && e.code() != ErrorCode::zero_variance) throw;
  }
  return written;
}

}  // namespace reasonsum::report
