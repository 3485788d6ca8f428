#pragma once

// Slow, obviously-correct reference implementations used to cross-check the
// library's metrics. They share nothing with the production code except the
// token vectors they are handed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Tokens = std::vector<std::string>;

struct PRF {
  double p = 0, r = 0, f = 0;
};

inline PRF prf(double matches, double cand, double ref) {
  if (cand == 0 && ref == 0) return {1, 1, 1};
  if (cand == 0 || ref == 0) return {0, 0, 0};
  PRF out{matches / cand, matches / ref, 0};
  out.f = out.p + out.r == 0 ? 0 : 2 * out.p * out.r / (out.p + out.r);
  return out;
}

inline std::vector<Tokens> grams(const Tokens& t, std::size_t n) {
  std::vector<Tokens> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) out.emplace_back(t.begin() + i, t.begin() + i + n);
  return out;
}

/// Multiset clipping by pairing each candidate n-gram with an unused equal
/// reference n-gram.
inline PRF rouge_n(const Tokens& cand, const Tokens& ref, std::size_t n) {
  const auto c = grams(cand, n);
  const auto r = grams(ref, n);
  std::vector<bool> used(r.size(), false);
  double matches = 0;
  for (const auto& g : c) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!used[k] && r[k] == g) {
        used[k] = true;
        ++matches;
        break;
      }
    }
  }
  return prf(matches, static_cast<double>(c.size()), static_cast<double>(r.size()));
}

/// Top-down memoized LCS.
inline std::size_t lcs(const Tokens& a, const Tokens& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t v = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    memo[key] = v;
    return v;
  };
  return go(0, 0);
}

/// LCS by enumerating every subsequence of `a` (only for |a| <= 16).
inline std::size_t lcs_exhaustive(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::uint32_t limit = 1u << a.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    std::size_t j = 0, len = 0;
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      else {
        ++j;
        ++len;
      }
    }
    if (ok) best = std::max(best, len);
  }
  return best;
}

inline PRF rouge_l(const Tokens& cand, const Tokens& ref) {
  return prf(static_cast<double>(lcs(cand, ref)), static_cast<double>(cand.size()),
             static_cast<double>(ref.size()));
}

inline bool occurs(const Tokens& haystack, Tokens::const_iterator first, Tokens::const_iterator last) {
  return std::search(haystack.begin(), haystack.end(), first, last) != haystack.end();
}

/// Mean over n = 1..min(3, |s|) of the share of summary n-gram positions
/// whose n-gram never occurs contiguously in the document.
inline double abstractiveness(const Tokens& s, const Tokens& d) {
  double sum = 0;
  int orders = 0;
  for (std::size_t n = 1; n <= 3 && n <= s.size(); ++n) {
    double novel = 0, total = 0;
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      ++total;
      if (!occurs(d, s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i + n))) ++novel;
    }
    sum += novel / total;
    ++orders;
  }
  return sum / orders;
}

struct Frag {
  double coverage = 0, density = 0;
  std::vector<std::size_t> lengths;
};

/// At each summary position, try every length from longest to shortest and
/// keep the first that occurs in the document.
inline Frag fragments(const Tokens& d, const Tokens& s) {
  Frag out;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t found = 0;
    for (std::size_t len = s.size() - i; len >= 1; --len) {
      if (occurs(d, s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(i + len))) {
        found = len;
        break;
      }
    }
    if (found) {
      out.lengths.push_back(found);
      i += found;
    } else {
      ++i;
    }
  }
  double cov = 0, den = 0;
  for (auto l : out.lengths) {
    cov += static_cast<double>(l);
    den += static_cast<double>(l * l);
  }
  out.coverage = cov / static_cast<double>(s.size());
  out.density = den / static_cast<double>(s.size());
  return out;
}

struct Fit {
  double r = 0, slope = 0, intercept = 0;
};

/// Two-pass covariance formula.
inline Fit pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  Fit f;
  f.r = sxy / std::sqrt(sxx * syy);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

/// Small deterministic generator for randomized instances.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return state_;
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  double uniform() { return static_cast<double>(next() >> 11) / 9007199254740992.0; }

  /// Tokens drawn from a vocabulary of `vocab` words.
  Tokens tokens(std::size_t max_len, std::size_t vocab, std::size_t min_len = 0) {
    const std::size_t len = min_len + below(max_len - min_len + 1);
    Tokens t;
    for (std::size_t i = 0; i < len; ++i) t.push_back("w" + std::to_string(below(vocab)));
    return t;
  }

 private:
  std::uint64_t state_;
};

}  // namespace oracle
