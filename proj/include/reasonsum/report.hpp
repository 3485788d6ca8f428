#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "reasonsum/metrics.hpp"
#include "reasonsum/runner.hpp"

namespace reasonsum::report {

/// How a metric is pulled out of SampleMetrics and printed.
struct MetricDef {
  std::string name;
  double scale = 1.0;
  int decimals = 2;
};

/// Known metrics: rouge, cr, abstractiveness, coverage, density, bertscore,
/// summac, alignscore, geval_completeness, geval_conciseness,
/// geval_faithfulness. Any other name is looked up in the external scores.
MetricDef metric_def(std::string_view name);
std::optional<double> metric_value(const metrics::SampleMetrics& m, std::string_view name);

struct RowKey {
  std::string method;  // method_label of the StrategySpec
  int shots = 0;

  auto operator<=>(const RowKey&) const = default;
};

/// A rectangular grid with explicit gaps. Values are unscaled.
struct Table {
  MetricDef metric;
  std::vector<std::string> columns;
  std::vector<RowKey> rows;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][column]
};

/// Rows in first-appearance order of the config's strategies, columns the
/// datasets in config order plus "Average". A dataset cell is the mean over
/// that dataset's samples; Average is the mean of the present dataset cells.
/// Throws empty_store.
Table main_table(const runner::MetricStore& store, std::string_view metric);

/// Columns Short, Long, Table, Average; each group cell is the mean of that
/// group's dataset cells.
Table grouped_table(const runner::MetricStore& store, std::string_view metric);

/// The value exactly as printed (missing → "—" in text, "" in CSV).
std::string format_cell(const MetricDef& metric, std::optional<double> value);

std::string to_csv(const Table& table);
/// Aligned columns; the per-column maximum is marked with '*'.
std::string to_text(const Table& table);

struct TradeoffPoint {
  std::string method;  // "<method_label>/<shots>"
  double x = 0;
  double y = 0;
};

struct Tradeoff {
  std::vector<TradeoffPoint> points;
  metrics::CorrelationFit fit;
};

/// One point per row key with both Average values present, then pearson_fit.
/// Throws too_few_points below 3 points.
Tradeoff render_tradeoff(const runner::MetricStore& store, std::string_view x_metric,
                         std::string_view y_metric);
Tradeoff fit_points(std::vector<TradeoffPoint> points);

std::string tradeoff_csv(const Tradeoff& t);      // method,x,y
std::string tradeoff_fit_csv(const Tradeoff& t);  // r,p_value,n,slope,intercept

enum class Paradigm { vanilla, augmentation, organization, reflective, lrm };

std::string_view to_string(Paradigm p) noexcept;
Paradigm paradigm_of(const StrategySpec& spec);

struct ParadigmRow {
  Paradigm paradigm;
  std::optional<double> abstractiveness;
  std::optional<double> rouge;
  std::optional<double> summac;
};

/// One row per paradigm present, in the enum's order. Each value is the mean
/// of the member rows' Average, pooled over shots. Throws empty_store.
std::vector<ParadigmRow> render_paradigm_abstractiveness(const runner::MetricStore& store);
std::string paradigm_csv(const std::vector<ParadigmRow>& rows);

/// One `level,dataset,metric,value` line per level, dataset (plus "average")
/// and metric present; values unscaled.
std::string effort_sweep_csv(const std::vector<std::pair<ReasoningEffort, runner::MetricStore>>& levels);

/// Every metric with at least one value in the store, in rendering order.
std::vector<std::string> metrics_present(const runner::MetricStore& store);

/// Writes all reports for a scored run into `<run_dir>/reports` and returns
/// the written paths.
std::vector<std::filesystem::path> write_reports(const std::filesystem::path& run_dir);

}  // namespace reasonsum::report
