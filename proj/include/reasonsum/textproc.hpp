#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reasonsum::text {

using TokenSeq = std::vector<std::string>;
using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

/// Lowercases (ASCII), splits on Unicode whitespace and strips leading and
/// trailing punctuation from each token. Tokens that end up empty are dropped.
TokenSeq tokenize(std::string_view text);

/// Multiset of contiguous n-grams. Throws invalid_argument when n == 0.
NgramCounts ngrams(std::span<const std::string> tokens, std::size_t n);

/// Total number of n-grams in a multiset (sum of counts).
std::size_t total_count(const NgramCounts& counts) noexcept;

/// Collapses every run of Unicode whitespace to one ASCII space and trims.
std::string normalize_whitespace(std::string_view text);

/// Byte length of the whitespace code point starting at `pos`, or 0.
std::size_t whitespace_length(std::string_view text, std::size_t pos) noexcept;

/// Rule-based splitter: a sentence ends at `.`, `!` or `?` (plus any closing
/// quotes or brackets) when followed by a space and a capital letter, or by
/// the end of the text. A period closing a guarded abbreviation or an initial
/// never ends a sentence. Output sentences are verbatim substrings of the
/// whitespace-normalized input and re-join with single spaces to it.
class SentenceSplitter {
 public:
  explicit SentenceSplitter(std::set<std::string, std::less<>> abbreviations);

  /// Splitter configured with the shipped `abbreviations.txt` guard list.
  static const SentenceSplitter& standard();

  std::vector<std::string> split(std::string_view text) const;

  const std::set<std::string, std::less<>>& abbreviations() const noexcept {
    return abbreviations_;
  }

 private:
  bool is_guarded(std::string_view word) const;

  std::set<std::string, std::less<>> abbreviations_;
};

/// One abbreviation per line; blank lines and `#` comments are ignored.
std::set<std::string, std::less<>> parse_abbreviation_list(std::string_view contents);

inline std::vector<std::string> split_sentences(std::string_view text) {
  return SentenceSplitter::standard().split(text);
}

/// Joins with a single space between elements.
std::string join(std::span<const std::string> parts, std::string_view sep = " ");

}  // namespace reasonsum::text
