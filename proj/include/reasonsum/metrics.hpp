#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reasonsum/core.hpp"
#include "reasonsum/judge.hpp"

namespace reasonsum::metrics {

struct RougeScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

/// Multiset n-gram overlap over the project tokenizer. When both sides have
/// no n-grams all three values are 1; when only one side is empty they are 0.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, std::size_t n);
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n);

/// Token-level longest common subsequence.
RougeScore rouge_l(std::string_view candidate, std::string_view reference);
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Mean of the ROUGE-1, ROUGE-2 and ROUGE-L F1 values, as a fraction in [0, 1]
/// (reports scale it by 100).
double rouge_avg(std::string_view candidate, std::string_view reference);

/// |summary tokens| / |document tokens|. Throws empty_document.
double compression_ratio(std::string_view summary, std::string_view document);

/// Mean novel n-gram ratio for n = 1..3: the share of the summary's n-grams
/// (with multiplicity) that never occur in the document. Orders for which the
/// summary has no n-gram are left out of the mean. Throws empty_summary.
double abstractiveness(std::string_view summary, std::string_view document);
double novel_ngram_ratio(std::span<const std::string> summary, std::span<const std::string> document,
                         std::size_t n);

struct Fragments {
  double coverage = 0;
  double density = 0;
  // Lengths of the extractive fragments in summary order.
  std::vector<std::size_t> lengths;
};

/// Greedy longest-match decomposition of the summary into fragments shared
/// with the document: at each summary position take the longest run that
/// occurs anywhere in the document, or skip one token when none does.
/// Throws empty_summary.
Fragments extractive_fragments(std::string_view document, std::string_view summary);
Fragments extractive_fragments(std::span<const std::string> document,
                               std::span<const std::string> summary);

struct CorrelationFit {
  double r = 0;
  double p_value = 1;
  std::size_t n = 0;
  double slope = 0;
  double intercept = 0;
};

/// Pearson r with a two-tailed Student t test on n - 2 degrees of freedom and
/// the least-squares line y = slope·x + intercept. Throws length_mismatch,
/// too_few_points (n < 3) or zero_variance.
CorrelationFit pearson_fit(std::span<const double> xs, std::span<const double> ys);

/// Regularized incomplete beta I_x(a, b), Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

/// P(|T| ≥ |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

/// Every metric of one generated summary. Reference-based fields are absent
/// when the sample has no reference.
struct SampleMetrics {
  std::optional<RougeScore> rouge1;
  std::optional<RougeScore> rouge2;
  std::optional<RougeScore> rougeL;
  std::optional<double> rouge_avg;
  double compression_ratio = 0;
  double abstractiveness = 0;
  double frag_coverage = 0;
  double frag_density = 0;
  std::map<std::string, double> external;
  std::optional<judge::GEvalScores> geval;
  std::vector<std::string> flags;
};

SampleMetrics score_summary(std::string_view summary, const SampleRecord& sample);

void to_json(json& j, const RougeScore& s);
void from_json(const json& j, RougeScore& s);
void to_json(json& j, const SampleMetrics& m);
void from_json(const json& j, SampleMetrics& m);

}  // namespace reasonsum::metrics
