#include "reasonsum/textproc.hpp"

#include <array>

#include "reasonsum/error.hpp"
#include "reasonsum/resources.hpp"

namespace reasonsum::text {

namespace {

// Multi-byte punctuation that is stripped from token edges: curly quotes,
// dashes, ellipsis, guillemets and inverted marks.
constexpr std::array<std::string_view, 11> kUnicodePunct = {
    "\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x93", "\xE2\x80\x94",
    "\xE2\x80\xA6", "\xC2\xAB",     "\xC2\xBB",     "\xC2\xBF",     "\xC2\xA1"};

constexpr std::array<std::string_view, 3> kUnicodeClosers = {"\xE2\x80\x99", "\xE2\x80\x9D",
                                                             "\xC2\xBB"};
constexpr std::array<std::string_view, 3> kUnicodeOpeners = {"\xE2\x80\x98", "\xE2\x80\x9C",
                                                             "\xC2\xAB"};

bool is_ascii_punct(unsigned char c) noexcept {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

bool starts_with(std::string_view s, std::string_view prefix) noexcept {
  return s.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view s, std::string_view suffix) noexcept {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::size_t leading_punct(std::string_view s) noexcept {
  if (s.empty()) return 0;
  if (is_ascii_punct(static_cast<unsigned char>(s.front()))) return 1;
  for (auto p : kUnicodePunct) {
    if (starts_with(s, p)) return p.size();
  }
  return 0;
}

std::size_t trailing_punct(std::string_view s) noexcept {
  if (s.empty()) return 0;
  if (is_ascii_punct(static_cast<unsigned char>(s.back()))) return 1;
  for (auto p : kUnicodePunct) {
    if (ends_with(s, p)) return p.size();
  }
  return 0;
}

bool is_terminal(char c) noexcept { return c == '.' || c == '!' || c == '?'; }

std::size_t closer_length(std::string_view s, std::size_t pos) noexcept {
  const char c = s[pos];
  if (is_terminal(c) || c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return 1;
  for (auto q : kUnicodeClosers) {
    if (starts_with(s.substr(pos), q)) return q.size();
  }
  return 0;
}

bool is_capital_at(std::string_view s, std::size_t pos) noexcept {
  if (pos >= s.size()) return false;
  const auto c = static_cast<unsigned char>(s[pos]);
  if (c >= 'A' && c <= 'Z') return true;
  // Latin-1 supplement capitals U+00C0..U+00DE, excluding the multiplication sign.
  if (c == 0xC3 && pos + 1 < s.size()) {
    const auto next = static_cast<unsigned char>(s[pos + 1]);
    return next >= 0x80 && next <= 0x9E && next != 0x97;
  }
  return false;
}

bool starts_sentence(std::string_view s, std::size_t pos) noexcept {
  if (pos >= s.size()) return false;
  if (is_capital_at(s, pos)) return true;
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[') return is_capital_at(s, pos + 1);
  for (auto q : kUnicodeOpeners) {
    if (starts_with(s.substr(pos), q)) return is_capital_at(s, pos + q.size());
  }
  return false;
}

bool is_letter(char c) noexcept { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }

// "J." or dotted single-letter groups such as "U.S.A." and "e.g.".
bool is_initialism(std::string_view word) noexcept {
  if (word.size() < 2 || word.back() != '.') return false;
  for (std::size_t i = 0; i < word.size(); i += 2) {
    if (!is_letter(word[i]) || i + 1 >= word.size() || word[i + 1] != '.') return false;
  }
  return true;
}

}  // namespace

std::size_t whitespace_length(std::string_view s, std::size_t pos) noexcept {
  if (pos >= s.size()) return 0;
  const auto c = static_cast<unsigned char>(s[pos]);
  if (c == ' ' || (c >= 0x09 && c <= 0x0D)) return 1;
  auto byte = [&](std::size_t k) -> unsigned {
    return pos + k < s.size() ? static_cast<unsigned char>(s[pos + k]) : 0u;
  };
  if (c == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;
  if (c == 0xE2 && byte(1) == 0x80) {
    const unsigned b = byte(2);
    if ((b >= 0x80 && b <= 0x8A) || b == 0xA8 || b == 0xA9 || b == 0xAF) return 3;
  }
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;
  return 0;
}

TokenSeq tokenize(std::string_view text) {
  TokenSeq tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (auto ws = whitespace_length(text, i); ws > 0) {
      i += ws;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && whitespace_length(text, i) == 0) ++i;
    std::string_view word = text.substr(begin, i - begin);
    while (auto n = leading_punct(word)) word.remove_prefix(n);
    while (auto n = trailing_punct(word)) word.remove_suffix(n);
    if (word.empty()) continue;
    std::string token(word);
    for (auto& ch : token) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

NgramCounts ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "n-gram order must be at least 1");
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::size_t total_count(const NgramCounts& counts) noexcept {
  std::size_t total = 0;
  for (const auto& [gram, count] : counts) total += count;
  return total;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    if (auto ws = whitespace_length(text, i); ws > 0) {
      pending_space = !out.empty();
      i += ws;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(text[i++]);
  }
  return out;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::set<std::string, std::less<>> parse_abbreviation_list(std::string_view contents) {
  std::set<std::string, std::less<>> result;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    auto eol = contents.find('\n', pos);
    if (eol == std::string_view::npos) eol = contents.size();
    std::string line = normalize_whitespace(contents.substr(pos, eol - pos));
    if (!line.empty() && line.front() != '#') result.insert(std::move(line));
    pos = eol + 1;
  }
  return result;
}

SentenceSplitter::SentenceSplitter(std::set<std::string, std::less<>> abbreviations)
    : abbreviations_(std::move(abbreviations)) {}

const SentenceSplitter& SentenceSplitter::standard() {
  static const SentenceSplitter splitter(parse_abbreviation_list(resources::get("abbreviations.txt")));
  return splitter;
}

bool SentenceSplitter::is_guarded(std::string_view word) const {
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'' ||
                           word.front() == '[')) {
    word.remove_prefix(1);
  }
  if (abbreviations_.find(word) != abbreviations_.end()) return true;
  return is_initialism(word);
}

std::vector<std::string> SentenceSplitter::split(std::string_view raw) const {
  const std::string s = normalize_whitespace(raw);
  std::vector<std::string> sentences;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_terminal(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size()) {
      const auto n = closer_length(s, j);
      if (n == 0) break;
      j += n;
    }
    if (j < s.size() && s[j] == ' ' && starts_sentence(s, j + 1)) {
      bool guarded = false;
      if (s[i] == '.' && (j == i + 1 || !is_terminal(s[i + 1]))) {
        const auto space = s.rfind(' ', i);
        const std::size_t word_start = space == std::string::npos ? 0 : space + 1;
        guarded = is_guarded(std::string_view(s).substr(word_start, i + 1 - word_start));
      }
      if (!guarded) {
        sentences.emplace_back(s.substr(start, j - start));
        start = j + 1;
      }
    }
    i = j;
  }
  if (start < s.size()) sentences.emplace_back(s.substr(start));
  return sentences;
}

}  // namespace reasonsum::text
