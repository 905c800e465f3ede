#pragma once

/// Text format for indexed grammars.
///
///   grammar sec5
///   variables: S, Y, X1
///   terminals: a, b
///   indices: e, f
///   start: S
///   prod: S -> Y [+e]        # push
///   prod: Y -> X1 X1         # plain
///   prod: X1 [f] -> a X1     # consume
///   prod: X1 [e] -> _        # empty body

#include <fstream>
#include <sstream>
#include <string>

#include "idxgram/grammar.hpp"

namespace idxgram {

class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}
  std::size_t line;
  std::size_t column;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t column;  // 1-based
};

/// Whitespace tokenizer that also splits `[..]` groups and `->` off neighbouring text.
inline std::vector<Token> tokenize_production(const std::string& s, std::size_t offset) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (s[i] == '[') {
      auto close = s.find(']', i);
      if (close == std::string::npos) throw ParseError(0, offset + i + 1, "unterminated '['");
      out.push_back({s.substr(i, close - i + 1), offset + start + 1});
      i = close + 1;
      continue;
    }
    if (s.compare(i, 2, "->") == 0) {
      out.push_back({"->", offset + start + 1});
      i += 2;
      continue;
    }
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '[' &&
           s.compare(i, 2, "->") != 0) {
      ++i;
    }
    out.push_back({s.substr(start, i - start), offset + start + 1});
  }
  return out;
}

inline Production parse_production(const std::string& body, std::size_t line, std::size_t offset) {
  std::vector<Token> toks;
  try {
    toks = tokenize_production(body, offset);
  } catch (const ParseError& e) {
    throw ParseError(line, e.column, "unterminated '['");
  }
  auto arrow = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.text == "->"; });
  if (arrow == toks.end()) throw ParseError(line, offset + 1, "expected '->'");
  std::vector<Token> lhs(toks.begin(), arrow);
  std::vector<Token> rhs(arrow + 1, toks.end());
  if (lhs.empty()) throw ParseError(line, arrow->column, "missing left-hand side");
  if (lhs.size() > 2) throw ParseError(line, lhs[2].column, "left-hand side is a variable with an optional [index]");

  Production p;
  p.lhs = lhs[0].text;
  if (lhs[0].text.front() == '[') throw ParseError(line, lhs[0].column, "expected a variable name");
  if (lhs.size() == 2) {
    const auto& t = lhs[1].text;
    if (t.front() != '[' || t.size() < 3 || t[1] == '+')
      throw ParseError(line, lhs[1].column, "expected a consumed index '[f]'");
    p.kind = ProductionKind::Consume;
    p.lhs_index = trim(t.substr(1, t.size() - 2));
  }

  if (rhs.empty()) throw ParseError(line, arrow->column + 2, "missing right-hand side (use '_' for ε)");
  if (rhs.back().text.front() == '[') {
    const auto& t = rhs.back().text;
    if (t.size() < 4 || t[1] != '+') throw ParseError(line, rhs.back().column, "expected a pushed index '[+f]'");
    if (p.kind == ProductionKind::Consume)
      throw ParseError(line, rhs.back().column, "a production cannot both consume and push");
    if (rhs.size() != 2) throw ParseError(line, rhs.back().column, "push body must be exactly one variable");
    p.kind = ProductionKind::Push;
    p.push_index = trim(t.substr(2, t.size() - 3));
    p.rhs = {rhs[0].text};
    return p;
  }
  if (rhs.size() == 1 && rhs[0].text == "_") return p;
  for (const auto& t : rhs) {
    if (t.text.front() == '[') throw ParseError(line, t.column, "index brackets only allowed at the end of a push");
    if (t.text == "_") throw ParseError(line, t.column, "'_' must stand alone");
    p.rhs.push_back(t.text);
  }
  return p;
}

inline void parse_symbol_list(const std::string& rest, std::size_t line, std::size_t col,
                              std::vector<Symbol>& out) {
  for (auto& s : split_list(rest)) {
    if (s.empty()) throw ParseError(line, col, "empty symbol name in list");
    out.push_back(s);
  }
}

}  // namespace detail

/// Parses the grammar text format. Throws ParseError on syntax errors; the
/// result is not validated (see load_grammar).
inline IndexedGrammar parse_grammar(const std::string& text) {
  IndexedGrammar g;
  bool have_header = false, have_start = false, have_vars = false, have_terms = false, have_idx = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::strip_comment(raw);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    std::size_t col = line.find_first_not_of(" \t") + 1;
    if (detail::starts_with(t, "grammar")) {
      if (have_header) throw ParseError(lineno, col, "duplicate 'grammar' line");
      auto parts = detail::split_ws(t);
      if (parts.size() != 2 || parts[0] != "grammar") throw ParseError(lineno, col, "expected 'grammar <name>'");
      g.name = parts[1];
      have_header = true;
      continue;
    }
    auto colon = t.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, col, "expected 'key: value'");
    std::string key = detail::trim(t.substr(0, colon));
    std::string rest = t.substr(colon + 1);
    std::size_t rest_col = col + colon + 1;
    auto once = [&](bool& flag) {
      if (flag) throw ParseError(lineno, col, "duplicate '" + key + ":' line");
      flag = true;
    };
    if (key == "variables") {
      once(have_vars);
      detail::parse_symbol_list(rest, lineno, rest_col, g.variables);
    } else if (key == "terminals") {
      once(have_terms);
      detail::parse_symbol_list(rest, lineno, rest_col, g.terminals);
    } else if (key == "indices") {
      once(have_idx);
      detail::parse_symbol_list(rest, lineno, rest_col, g.indices);
    } else if (key == "start") {
      once(have_start);
      g.start = detail::trim(rest);
      if (g.start.empty() || g.start.find_first_of(" \t,") != std::string::npos)
        throw ParseError(lineno, rest_col, "expected a single start variable");
    } else if (key == "prod") {
      g.productions.push_back(detail::parse_production(rest, lineno, rest_col - 1));
    } else {
      throw ParseError(lineno, col, "unknown key '" + key + "'");
    }
  }
  if (!have_start) throw ParseError(lineno + 1, 1, "missing 'start:' line");
  return g;
}

inline std::string serialize_grammar(const IndexedGrammar& g) {
  std::ostringstream out;
  out << "grammar " << g.name << "\n";
  out << "variables: " << join(g.variables, ", ") << "\n";
  out << "terminals: " << join(g.terminals, ", ") << "\n";
  out << "indices: " << join(g.indices, ", ") << "\n";
  out << "start: " << g.start << "\n";
  for (const auto& p : g.productions) {
    out << "prod: " << p.lhs;
    if (p.kind == ProductionKind::Consume) out << " [" << p.lhs_index << "]";
    out << " ->";
    if (p.kind == ProductionKind::Push) {
      out << " " << p.rhs.at(0) << " [+" << p.push_index << "]";
    } else if (p.rhs.empty()) {
      out << " _";
    } else {
      for (const auto& s : p.rhs) out << " " << s;
    }
    out << "\n";
  }
  return out.str();
}

/// Parses and validates; throws InvalidGrammar if the grammar has violations.
inline IndexedGrammar load_grammar(const std::string& text) {
  IndexedGrammar g = parse_grammar(text);
  auto v = validate(g);
  if (!v.empty()) throw InvalidGrammar(std::move(v));
  return g;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace idxgram
