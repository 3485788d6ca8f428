#include "reasonsum/metrics.hpp"

#include <algorithm>
#include <set>

#include "reasonsum/textproc.hpp"

namespace reasonsum::metrics {

namespace {

RougeScore from_counts(std::size_t matches, std::size_t candidate_total, std::size_t reference_total) {
  if (candidate_total == 0 && reference_total == 0) return {1.0, 1.0, 1.0};
  if (candidate_total == 0 || reference_total == 0) return {};
  RougeScore s;
  s.precision = static_cast<double>(matches) / static_cast<double>(candidate_total);
  s.recall = static_cast<double>(matches) / static_cast<double>(reference_total);
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n) {
  const auto cand = text::ngrams(candidate, n);
  const auto ref = text::ngrams(reference, n);
  std::size_t matches = 0;
  for (const auto& [gram, count] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) matches += std::min(count, it->second);
  }
  return from_counts(matches, text::total_count(cand), text::total_count(ref));
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, std::size_t n) {
  return rouge_n(text::tokenize(candidate), text::tokenize(reference), n);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      row[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], row[j - 1]);
    }
    std::swap(prev, row);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return from_counts(lcs_length(candidate, reference), candidate.size(), reference.size());
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l(text::tokenize(candidate), text::tokenize(reference));
}

double rouge_avg(std::string_view candidate, std::string_view reference) {
  const auto c = text::tokenize(candidate);
  const auto r = text::tokenize(reference);
  return (rouge_n(c, r, 1).f1 + rouge_n(c, r, 2).f1 + rouge_l(c, r).f1) / 3.0;
}

double compression_ratio(std::string_view summary, std::string_view document) {
  const auto doc_tokens = text::tokenize(document).size();
  if (doc_tokens == 0) throw Error(ErrorCode::empty_document, "document has no tokens");
  return static_cast<double>(text::tokenize(summary).size()) / static_cast<double>(doc_tokens);
}

double novel_ngram_ratio(std::span<const std::string> summary, std::span<const std::string> document,
                         std::size_t n) {
  const auto grams = text::ngrams(summary, n);
  const auto total = text::total_count(grams);
  if (total == 0) return 0.0;
  const auto doc = text::ngrams(document, n);
  std::size_t novel = 0;
  for (const auto& [gram, count] : grams) {
    if (!doc.count(gram)) novel += count;
  }
  return static_cast<double>(novel) / static_cast<double>(total);
}

double abstractiveness(std::string_view summary, std::string_view document) {
  const auto s = text::tokenize(summary);
  if (s.empty()) throw Error(ErrorCode::empty_summary, "summary has no tokens");
  const auto d = text::tokenize(document);
  double sum = 0;
  int orders = 0;
  for (std::size_t n = 1; n <= 3 && n <= s.size(); ++n) {
    sum += novel_ngram_ratio(s, d, n);
    ++orders;
  }
  return sum / orders;
}

Fragments extractive_fragments(std::span<const std::string> document,
                               std::span<const std::string> summary) {
  if (summary.empty()) throw Error(ErrorCode::empty_summary, "summary has no tokens");
  Fragments out;
  std::size_t i = 0;
  while (i < summary.size()) {
    std::size_t best = 0;
    for (std::size_t j = 0; j < document.size(); ++j) {
      std::size_t k = 0;
      while (i + k < summary.size() && j + k < document.size() && summary[i + k] == document[j + k]) ++k;
      best = std::max(best, k);
    }
    if (best > 0) {
      out.lengths.push_back(best);
      i += best;
    } else {
      ++i;
    }
  }
  double covered = 0, squared = 0;
  for (auto len : out.lengths) {
    covered += static_cast<double>(len);
    squared += static_cast<double>(len) * static_cast<double>(len);
  }
  out.coverage = covered / static_cast<double>(summary.size());
  out.density = squared / static_cast<double>(summary.size());
  return out;
}

Fragments extractive_fragments(std::string_view document, std::string_view summary) {
  return extractive_fragments(text::tokenize(document), text::tokenize(summary));
}

SampleMetrics score_summary(std::string_view summary, const SampleRecord& sample) {
  SampleMetrics m;
  const auto s = text::tokenize(summary);
  const auto d = text::tokenize(sample.document);
  if (d.empty()) throw Error(ErrorCode::empty_document, "sample '" + sample.sample_id + "' has no tokens");
  if (s.empty()) throw Error(ErrorCode::empty_summary, "summary for '" + sample.sample_id + "' has no tokens");

  const auto r = text::tokenize(sample.reference);
  if (r.empty()) {
    m.flags.emplace_back("missing_reference");
  } else {
    m.rouge1 = rouge_n(s, r, 1);
    m.rouge2 = rouge_n(s, r, 2);
    m.rougeL = rouge_l(s, r);
    m.rouge_avg = (m.rouge1->f1 + m.rouge2->f1 + m.rougeL->f1) / 3.0;
  }
  m.compression_ratio = static_cast<double>(s.size()) / static_cast<double>(d.size());
  m.abstractiveness = abstractiveness(summary, sample.document);
  const auto fragments = extractive_fragments(d, s);
  m.frag_coverage = fragments.coverage;
  m.frag_density = fragments.density;
  return m;
}

void to_json(json& j, const RougeScore& s) {
  j = json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

void from_json(const json& j, RougeScore& s) {
  s.precision = j.at("precision").get<double>();
  s.recall = j.at("recall").get<double>();
  s.f1 = j.at("f1").get<double>();
}

void to_json(json& j, const SampleMetrics& m) {
  j = json::object();
  auto put = [&](const char* key, const auto& v) {
    if (v) j[key] = *v;
    else j[key] = nullptr;
  };
  put("rouge1", m.rouge1);
  put("rouge2", m.rouge2);
  put("rougeL", m.rougeL);
  put("rouge_avg", m.rouge_avg);
  j["compression_ratio"] = m.compression_ratio;
  j["abstractiveness"] = m.abstractiveness;
  j["frag_coverage"] = m.frag_coverage;
  j["frag_density"] = m.frag_density;
  j["external"] = m.external;
  put("geval", m.geval);
  j["flags"] = m.flags;
}

void from_json(const json& j, SampleMetrics& m) {
  try {
    auto get = [&](const char* key, auto& out) {
      if (auto it = j.find(key); it != j.end() && !it->is_null()) {
        out = it->get<typename std::decay_t<decltype(out)>::value_type>();
      } else {
        out.reset();
      }
    };
    get("rouge1", m.rouge1);
    get("rouge2", m.rouge2);
    get("rougeL", m.rougeL);
    get("rouge_avg", m.rouge_avg);
    m.compression_ratio = j.at("compression_ratio").get<double>();
    m.abstractiveness = j.at("abstractiveness").get<double>();
    m.frag_coverage = j.at("frag_coverage").get<double>();
    m.frag_density = j.at("frag_density").get<double>();
    m.external = j.value("external", std::map<std::string, double>{});
    get("geval", m.geval);
    m.flags = j.value("flags", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("invalid metrics record: ") + e.what());
  }
}

}  // namespace reasonsum::metrics
