#include "reasonsum/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "reasonsum/metrics.hpp"
#include "reasonsum/textproc.hpp"

namespace reasonsum::datasets {

std::string_view to_string(Format f) noexcept {
  switch (f) {
    case Format::sds: return "SDS";
    case Format::mds: return "MDS";
    case Format::lns: return "LNS";
    case Format::tts: return "TTS";
  }
  return "SDS";
}

std::string_view to_string(Group g) noexcept {
  switch (g) {
    case Group::short_form: return "short";
    case Group::long_form: return "long";
    case Group::table: return "table";
  }
  return "short";
}

std::optional<Format> parse_format(std::string_view s) {
  for (auto f : {Format::sds, Format::mds, Format::lns, Format::tts}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::optional<Group> parse_group(std::string_view s) {
  for (auto g : {Group::short_form, Group::long_form, Group::table}) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

std::vector<std::string> validate_descriptor(const DatasetDescriptor& d) {
  std::vector<std::string> out;
  if (d.dataset_id.empty()) out.emplace_back("dataset_id must not be empty");
  if (std::find(kDomains.begin(), kDomains.end(), d.domain) == kDomains.end()) {
    out.push_back("domain '" + d.domain + "' is not a known domain");
  }
  if (d.document_field.empty()) out.emplace_back("document_field must not be empty");
  if (d.reference_field.empty()) out.emplace_back("reference_field must not be empty");
  const bool long_format = d.format == Format::mds || d.format == Format::lns;
  if (long_format && d.group != Group::long_form) out.emplace_back("MDS and LNS datasets belong to the long group");
  if (d.format == Format::tts && d.group != Group::table) out.emplace_back("TTS datasets belong to the table group");
  if (d.format == Format::sds && d.group == Group::table) out.emplace_back("SDS datasets cannot be in the table group");
  return out;
}

const std::vector<DatasetDescriptor>& registry() {
  static const std::vector<DatasetDescriptor> kRegistry = [] {
    auto make = [](std::string id, std::string domain, Format format, Group group) {
      DatasetDescriptor d;
      d.dataset_id = std::move(id);
      d.domain = std::move(domain);
      d.format = format;
      d.group = group;
      return d;
    };
    return std::vector<DatasetDescriptor>{
        make("cnn_dm", "news", Format::sds, Group::short_form),
        make("samsum", "dialogue", Format::sds, Group::short_form),
        make("reddit", "social_media", Format::sds, Group::short_form),
        make("wikihow", "knowledge_base", Format::sds, Group::short_form),
        make("arxiv", "scientific", Format::sds, Group::long_form),
        make("multi_news", "news", Format::mds, Group::long_form),
        make("booksum", "narrative", Format::lns, Group::long_form),
        make("scigen", "table", Format::tts, Group::table),
    };
  }();
  return kRegistry;
}

std::optional<DatasetDescriptor> find_descriptor(std::string_view dataset_id) {
  for (const auto& d : registry()) {
    if (d.dataset_id == dataset_id) return d;
  }
  return std::nullopt;
}

void to_json(json& j, const DatasetDescriptor& d) {
  j = json{{"dataset_id", d.dataset_id},
           {"domain", d.domain},
           {"format", to_string(d.format)},
           {"group", to_string(d.group)},
           {"document_field", d.document_field},
           {"reference_field", d.reference_field},
           {"id_field", d.id_field},
           {"mds_delimiter", d.mds_delimiter}};
}

void from_json(const json& j, DatasetDescriptor& d) {
  if (!j.is_object()) throw Error(ErrorCode::config_error, "dataset descriptor must be an object");
  auto str = [&](const char* key, std::string& out) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_string()) throw Error(ErrorCode::config_error, std::string(key) + " must be a string");
      out = it->get<std::string>();
    }
  };
  // Registry entries supply defaults for any field left out.
  if (auto id = j.find("dataset_id"); id != j.end() && id->is_string()) {
    if (auto known = find_descriptor(id->get<std::string>())) d = *known;
  }
  str("dataset_id", d.dataset_id);
  str("domain", d.domain);
  str("document_field", d.document_field);
  str("reference_field", d.reference_field);
  str("id_field", d.id_field);
  str("mds_delimiter", d.mds_delimiter);
  if (auto it = j.find("format"); it != j.end()) {
    auto f = it->is_string() ? parse_format(it->get<std::string>()) : std::nullopt;
    if (!f) throw Error(ErrorCode::config_error, "format must be one of SDS, MDS, LNS, TTS");
    d.format = *f;
  }
  if (auto it = j.find("group"); it != j.end()) {
    auto g = it->is_string() ? parse_group(it->get<std::string>()) : std::nullopt;
    if (!g) throw Error(ErrorCode::config_error, "group must be one of short, long, table");
    d.group = *g;
  }
}

namespace {

std::string field_text(const json& value, const DatasetDescriptor& d, const std::string& where,
                       const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (d.format == Format::mds && value.is_array()) {
    std::string joined;
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (!value[i].is_string()) {
        throw Error(ErrorCode::parse_error, where + ": " + field + "[" + std::to_string(i) + "] must be a string");
      }
      if (i) joined += d.mds_delimiter;
      joined += value[i].get<std::string>();
    }
    return joined;
  }
  throw Error(ErrorCode::parse_error, where + ": field '" + field + "' must be a string" +
                                          (d.format == Format::mds ? " or an array of strings" : ""));
}

}  // namespace

std::vector<SampleRecord> parse_jsonl(std::istream& in, const DatasetDescriptor& descriptor, Split split,
                                      std::string_view source) {
  std::vector<SampleRecord> records;
  std::set<std::string> ids;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(number);
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::parse_error, where + ": line is not a JSON object");
    }
    SampleRecord record;
    record.dataset_id = descriptor.dataset_id;
    record.split = split;
    auto doc = j.find(descriptor.document_field);
    if (doc == j.end()) {
      throw Error(ErrorCode::missing_field, where + ": missing field '" + descriptor.document_field + "'");
    }
    record.document = field_text(*doc, descriptor, where, descriptor.document_field);
    if (text::normalize_whitespace(record.document).empty()) {
      throw Error(ErrorCode::parse_error, where + ": document is empty");
    }
    auto ref = j.find(descriptor.reference_field);
    if (ref == j.end()) {
      throw Error(ErrorCode::missing_field, where + ": missing field '" + descriptor.reference_field + "'");
    }
    if (!ref->is_null()) record.reference = field_text(*ref, descriptor, where, descriptor.reference_field);

    if (auto id = j.find(descriptor.id_field); id != j.end() && !id->is_null()) {
      record.sample_id = id->is_string() ? id->get<std::string>() : id->dump();
    } else {
      record.sample_id = std::to_string(number);
    }
    if (!ids.insert(record.sample_id).second) {
      throw Error(ErrorCode::parse_error, where + ": duplicate sample id '" + record.sample_id + "'");
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<SampleRecord> load_jsonl(const std::filesystem::path& path, const DatasetDescriptor& descriptor,
                                     Split split) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return parse_jsonl(in, descriptor, split, path.string());
}

std::uint64_t SplitMix64::next() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  // Reject the low residue class so every value in [0, bound) is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::size_t> sample_indices(std::size_t size, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (n >= size) return order;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(size - i));
    std::swap(order[i], order[j]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<SampleRecord> sample_test_set(std::span<const SampleRecord> records, std::size_t n,
                                          std::uint64_t seed) {
  std::vector<SampleRecord> out;
  for (auto i : sample_indices(records.size(), n, seed)) out.push_back(records[i]);
  return out;
}

std::string truncate_words(std::string_view text, std::size_t cap) {
  std::size_t words = 0;
  std::size_t last_word_end = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (auto ws = text::whitespace_length(text, pos); ws > 0) {
      pos += ws;
      continue;
    }
    if (words == cap) return std::string(text.substr(0, last_word_end)) + " [truncated]";
    ++words;
    while (pos < text.size() && text::whitespace_length(text, pos) == 0) ++pos;
    last_word_end = pos;
  }
  return std::string(text);
}

std::vector<prompts::Exemplar> pick_exemplars(std::span<const SampleRecord> train, std::size_t k,
                                              std::uint64_t seed, std::size_t token_cap) {
  if (train.size() < k) {
    throw Error(ErrorCode::insufficient_train_data, "need " + std::to_string(k) + " training records, have " +
                                                        std::to_string(train.size()));
  }
  std::vector<prompts::Exemplar> out;
  for (auto i : sample_indices(train.size(), k, seed)) {
    out.push_back({truncate_words(train[i].document, token_cap), train[i].reference});
  }
  return out;
}

DatasetStatistics dataset_statistics(std::span<const SampleRecord> records) {
  DatasetStatistics stats;
  for (const auto& r : records) {
    const auto doc = text::tokenize(r.document);
    const auto sum = text::tokenize(r.reference);
    if (doc.empty() || sum.empty()) continue;
    const auto fragments = metrics::extractive_fragments(doc, sum);
    ++stats.count;
    stats.doc_tokens += static_cast<double>(doc.size());
    stats.sum_tokens += static_cast<double>(sum.size());
    stats.density += fragments.density;
    stats.coverage += fragments.coverage;
    stats.compression += static_cast<double>(doc.size()) / static_cast<double>(sum.size());
  }
  if (stats.count == 0) throw Error(ErrorCode::empty_input, "no records with both a document and a reference");
  const auto n = static_cast<double>(stats.count);
  stats.doc_tokens /= n;
  stats.sum_tokens /= n;
  stats.density /= n;
  stats.coverage /= n;
  stats.compression /= n;
  return stats;
}

}  // namespace reasonsum::datasets
