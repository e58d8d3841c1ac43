#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "iia/stopwords.hpp"

namespace iia {

namespace detail {

inline bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_alpha(char c) { return is_upper(c) || is_lower(c); }
inline char to_lower(char c) { return is_upper(c) ? char(c - 'A' + 'a') : c; }

inline const std::unordered_set<std::string_view>& stop_set() {
  static const std::unordered_set<std::string_view> set = [] {
    std::unordered_set<std::string_view> s;
    for (auto w : kJavaStopWords) s.insert(w);
    for (auto w : kEnglishStopWords) s.insert(w);
    return s;
  }();
  return set;
}

// Splits one alphabetic run at camel-case boundaries: fooBar -> foo|Bar,
// XMLHttp -> XML|Http.
inline void split_camel(std::string_view run, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i < run.size(); ++i) {
    bool boundary =
        (is_lower(run[i - 1]) && is_upper(run[i])) ||
        (is_upper(run[i - 1]) && is_upper(run[i]) && i + 1 < run.size() &&
         is_lower(run[i + 1]));
    if (boundary) {
      out.emplace_back(run.substr(start, i - start));
      start = i;
    }
  }
  out.emplace_back(run.substr(start));
}

}  // namespace detail

/// Splits identifiers and prose into lowercase index terms. Digits,
/// underscores and all other non-letters are separators; camel-case humps
/// become separate terms; one-letter terms and stop-listed terms are dropped.
/// Deterministic and idempotent on its own space-joined output.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!detail::is_alpha(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && detail::is_alpha(text[j])) ++j;
    detail::split_camel(text.substr(i, j - i), pieces);
    i = j;
  }
  std::vector<std::string> terms;
  terms.reserve(pieces.size());
  for (std::string& p : pieces) {
    if (p.size() < 2) continue;
    for (char& c : p) c = detail::to_lower(c);
    if (detail::stop_set().count(p)) continue;
    terms.push_back(std::move(p));
  }
  return terms;
}

}  // namespace iia
