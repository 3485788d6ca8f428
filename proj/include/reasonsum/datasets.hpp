#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reasonsum/core.hpp"
#include "reasonsum/prompts.hpp"

namespace reasonsum::datasets {

enum class Format { sds, mds, lns, tts };
enum class Group { short_form, long_form, table };

std::string_view to_string(Format f) noexcept;   // "SDS", "MDS", ...
std::string_view to_string(Group g) noexcept;    // "short", "long", "table"
std::optional<Format> parse_format(std::string_view s);
std::optional<Group> parse_group(std::string_view s);

inline constexpr std::array<std::string_view, 7> kDomains = {
    "news", "dialogue", "social_media", "knowledge_base", "scientific", "narrative", "table"};

struct DatasetDescriptor {
  std::string dataset_id;
  std::string domain = "news";
  Format format = Format::sds;
  Group group = Group::short_form;
  std::string document_field = "document";
  std::string reference_field = "summary";
  // Records without this field get their 1-based line number as id.
  std::string id_field = "id";
  // Placed between source documents of a multi-document record.
  std::string mds_delimiter = "\n\n-----\n\n";

  bool operator==(const DatasetDescriptor&) const = default;
};

/// Field-level problems; empty when valid. MDS and LNS sets belong to the
/// long group, TTS to the table group.
std::vector<std::string> validate_descriptor(const DatasetDescriptor& d);

/// The eight benchmark datasets with their domain, format and group.
const std::vector<DatasetDescriptor>& registry();
std::optional<DatasetDescriptor> find_descriptor(std::string_view dataset_id);

void to_json(json& j, const DatasetDescriptor& d);
void from_json(const json& j, DatasetDescriptor& d);

/// One JSON object per line, in file order. Blank lines are skipped. Throws
/// parse_error or missing_field naming the 1-based line; duplicate ids are a
/// parse_error.
std::vector<SampleRecord> load_jsonl(const std::filesystem::path& path,
                                     const DatasetDescriptor& descriptor, Split split = Split::test);
std::vector<SampleRecord> parse_jsonl(std::istream& in, const DatasetDescriptor& descriptor,
                                      Split split = Split::test, std::string_view source = "<input>");

/// SplitMix64: 64-bit state, Steele/Lea/Flood constants. Portable by
/// construction, so a seed reproduces in any language.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  std::uint64_t next() noexcept;
  /// Uniform in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// Indices of a uniform n-subset of [0, size), ascending. Partial
/// Fisher–Yates over the identity permutation driven by SplitMix64(seed).
std::vector<std::size_t> sample_indices(std::size_t size, std::size_t n, std::uint64_t seed);

/// Uniform sample without replacement, returned in original order. Returns
/// every record when n ≥ records.size().
std::vector<SampleRecord> sample_test_set(std::span<const SampleRecord> records, std::size_t n = 100,
                                          std::uint64_t seed = 42);

/// First `cap` whitespace-separated words of `text`, with " [truncated]"
/// appended when anything was cut.
std::string truncate_words(std::string_view text, std::size_t cap);

/// Seeded choice of k training exemplars, documents truncated to
/// `token_cap` words. Throws insufficient_train_data.
std::vector<prompts::Exemplar> pick_exemplars(std::span<const SampleRecord> train, std::size_t k = 2,
                                              std::uint64_t seed = 42, std::size_t token_cap = 800);

struct DatasetStatistics {
  std::size_t count = 0;
  double doc_tokens = 0;
  double sum_tokens = 0;
  double density = 0;
  // Document tokens over summary tokens (the reciprocal of CR).
  double compression = 0;
  // Fraction in [0, 1].
  double coverage = 0;
};

/// Per-record means over records that have a reference. Throws empty_input.
DatasetStatistics dataset_statistics(std::span<const SampleRecord> records);

}  // namespace reasonsum::datasets
