#pragma once

/// Shared vocabulary: symbols, words, errors, fresh-name allocation.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace idxgram {

using Symbol = std::string;
using Word = std::vector<Symbol>;

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an exploration frontier grows past its hard cap.
class BudgetOverflow : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// Splits the textual form of a word into symbols.
///
/// `_` and the empty string denote the empty word. Text containing whitespace
/// is split on whitespace, so multi-character symbols are written `foo bar`.
/// Otherwise every character is one symbol (`abc` is a, b, c).
inline Word parse_word(std::string_view text) {
  Word out;
  std::string s(text);
  auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return out;
  auto last = s.find_last_not_of(" \t");
  s = s.substr(first, last - first + 1);
  if (s == "_") return out;
  if (s.find_first_of(" \t") != std::string::npos) {
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
      if (tok != "_") out.push_back(tok);
    }
    return out;
  }
  for (char c : s) out.emplace_back(1, c);
  return out;
}

/// Inverse of parse_word for display: single-character symbols are
/// concatenated, anything longer is space separated; ε prints as `_`.
inline std::string format_word(const Word& w) {
  if (w.empty()) return "_";
  bool single = std::all_of(w.begin(), w.end(), [](const Symbol& s) { return s.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i > 0) out += ' ';
    out += w[i];
  }
  return out;
}

/// Length-lexicographic order on words.
struct ShortLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

using WordSet = std::set<Word, ShortLex>;

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

/// Hands out names that are guaranteed not to clash with anything reserved so far.
class NameAllocator {
public:
  NameAllocator() = default;
  template <class Range>
  explicit NameAllocator(const Range& taken) {
    for (const auto& s : taken) used_.insert(s);
  }

  template <class Range>
  void reserve_all(const Range& names) {
    for (const auto& s : names) used_.insert(s);
  }
  void reserve(const std::string& name) { used_.insert(name); }
  bool taken(const std::string& name) const { return used_.count(name) != 0; }

  /// Returns `base` if free, otherwise `base#1`, `base#2`, ...
  std::string fresh(const std::string& base) {
    if (used_.insert(base).second) return base;
    for (std::size_t n = 1;; ++n) {
      std::string cand = base + "#" + std::to_string(n);
      if (used_.insert(cand).second) return cand;
    }
  }

private:
  std::unordered_set<std::string> used_;
};

/// FNV-1a 64-bit, used for stable input digests in reports.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

/// Symbol names may not be empty and may not contain whitespace, commas or brackets.
inline bool valid_symbol_name(std::string_view s) {
  if (s.empty()) return false;
  if (s == "_" || s == "->") return false;
  if (s.front() == '#') return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '[' || c == ']' ||
           c == '(' || c == ')';
  });
}

namespace detail {

/// Removes a `#` comment: `#` starts a comment only at the beginning of a
/// line or after whitespace, so generated names such as `Z#1` survive.
inline std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

}  // namespace detail
}  // namespace idxgram
