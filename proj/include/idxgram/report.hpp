#pragma once

// Line-oriented command reports: `key: value` lines, blocks separated by `---`.
// Multi-line values are written as repeated keys, one line each, so a block
// is just an ordered list of (key, value) pairs and parses back unchanged.

#include <chrono>
#include <sstream>

#include "idxgram/common.hpp"

namespace idxgram {

struct CommandReport {
  std::vector<std::pair<std::string, std::string>> fields;

  CommandReport& add(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of(":\n") != std::string::npos || key != detail::trim(key))
      throw Error("bad report key '" + key + "'");
    std::istringstream in(value);
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
      fields.emplace_back(key, line);
      any = true;
    }
    if (!any) fields.emplace_back(key, "");
    return *this;
  }
  CommandReport& add(const std::string& key, std::size_t value) { return add(key, std::to_string(value)); }
  CommandReport& add(const std::string& key, bool value) { return add(key, std::string(value ? "yes" : "no")); }
  CommandReport& add(const std::string& key, const char* value) { return add(key, std::string(value)); }

  /// First value stored under key.
  std::optional<std::string> get(const std::string& key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return v;
    return std::nullopt;
  }
  std::vector<std::string> all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : fields)
      if (k == key) out.push_back(v);
    return out;
  }

  bool operator==(const CommandReport&) const = default;
};

inline std::string input_digest(const std::vector<std::string>& contents) {
  std::string all;
  for (const auto& c : contents) {
    all += c;
    all += '\0';
  }
  return hex64(fnv1a(all));
}

inline std::string format_report(const CommandReport& r) {
  std::string out;
  for (const auto& [k, v] : r.fields) {
    out += k;
    out += ":";
    if (!v.empty()) out += " " + v;
    out += "\n";
  }
  return out;
}

inline std::string format_reports(const std::vector<CommandReport>& rs) {
  std::string out;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (i) out += "---\n";
    out += format_report(rs[i]);
  }
  return out;
}

inline std::vector<CommandReport> parse_reports(const std::string& text) {
  std::vector<CommandReport> out(1);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line == "---") {
      out.emplace_back();
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) throw Error("report line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string value = line.substr(colon + 1);
    if (!value.empty()) {
      if (value[0] != ' ') throw Error("report line " + std::to_string(lineno) + ": expected a space after ':'");
      value.erase(0, 1);
    }
    out.back().fields.emplace_back(line.substr(0, colon), value);
  }
  if (out.size() == 1 && out[0].fields.empty()) out.clear();
  return out;
}

class Stopwatch {
public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace idxgram
