#pragma once

/// ET0L systems: tables of context-free rules applied to every symbol of the
/// word at once, plus the conversion to indexed grammars.
///
/// File format
///   axiom: S
///   terminals: a, b
///   table up:
///     rule: S -> a S b
///   table stop:
///     rule: S -> _
///   strict:            # optional; otherwise missing rules default to B -> B

#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "idxgram/engine.hpp"
#include "idxgram/grammar.hpp"

namespace idxgram {

class NotInANF : public Error {
public:
  explicit NotInANF(std::vector<std::string> v) : Error("system is not in active normal form: " + join(v, "; ")), violations(std::move(v)) {}
  std::vector<std::string> violations;
};

struct EtolTable {
  std::string name;
  std::map<Symbol, std::vector<Word>> rules;
};

struct EtolSystem {
  std::vector<Symbol> alphabet;  // V, terminals included
  std::vector<Symbol> terminals;
  std::vector<EtolTable> tables;
  Symbol axiom;

  bool is_terminal(const Symbol& s) const {
    return std::find(terminals.begin(), terminals.end(), s) != terminals.end();
  }
  /// True if some table rewrites `b` to something other than itself.
  bool is_active(const Symbol& b) const {
    for (const auto& t : tables) {
      auto it = t.rules.find(b);
      if (it == t.rules.end()) continue;
      for (const auto& nu : it->second)
        if (nu != Word{b}) return true;
    }
    return false;
  }
};

/// Parallel step: occurrence i of `w` is replaced by the choice[i]-th rule of
/// its symbol in `table`.
inline Word etol_step(const EtolSystem& sys, const Word& w, std::size_t table, const std::vector<std::size_t>& choice) {
  if (table >= sys.tables.size()) throw Error("no table number " + std::to_string(table));
  if (choice.size() != w.size()) throw Error("need one rule choice per occurrence");
  Word out;
  const auto& t = sys.tables[table];
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto it = t.rules.find(w[i]);
    if (it == t.rules.end() || it->second.empty())
      throw Error("table '" + t.name + "' has no rule for '" + w[i] + "'");
    if (choice[i] >= it->second.size()) throw Error("rule choice out of range for '" + w[i] + "'");
    const Word& nu = it->second[choice[i]];
    out.insert(out.end(), nu.begin(), nu.end());
  }
  return out;
}

inline std::vector<std::string> check_anf(const EtolSystem& sys) {
  std::vector<std::string> out;
  for (const auto& b : sys.alphabet) {
    bool active = sys.is_active(b);
    if (sys.is_terminal(b) && active) out.push_back("terminal " + b + " is active");
    if (!sys.is_terminal(b) && !active) out.push_back("inactive non-terminal " + b);
  }
  return out;
}

inline std::size_t etol_width(const EtolSystem& sys, const Word& w) {
  return static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [&](const Symbol& s) { return !sys.is_terminal(s); }));
}

struct EtolBudget {
  std::size_t max_steps = 64;
  std::optional<std::size_t> max_width;  // non-terminal occurrences per word
  std::size_t frontier_cap = 1'000'000;
};

namespace detail {

/// Least fixpoint of the shortest terminal word each symbol can reach, with
/// the table synchronisation relaxed. Sound lower bound.
inline std::unordered_map<Symbol, std::size_t> etol_lower_bounds(const EtolSystem& sys) {
  std::unordered_map<Symbol, std::size_t> lb;
  for (const auto& s : sys.alphabet) lb[s] = sys.is_terminal(s) ? 1 : kInf;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : sys.tables)
      for (const auto& [b, bodies] : t.rules)
        for (const auto& nu : bodies) {
          std::size_t sum = 0;
          for (const auto& s : nu) sum = std::min<std::size_t>(kInf, sum + lb[s]);
          if (sum < lb[b]) {
            lb[b] = sum;
            changed = true;
          }
        }
  }
  return lb;
}

struct EtolSearch {
  std::map<Word, std::size_t> depth;  // word -> first BFS depth
  WordSet terminal_words;
  bool step_cap_hit = false;
  bool width_cap_hit = false;
};

/// All successors of `w` under table `t` with every combination of rule choices.
inline std::vector<Word> etol_successors(const EtolTable& t, const Word& w) {
  std::vector<Word> acc{{}};
  for (const auto& s : w) {
    auto it = t.rules.find(s);
    if (it == t.rules.end() || it->second.empty()) return {};
    std::vector<Word> next;
    for (const auto& prefix : acc)
      for (const auto& nu : it->second) {
        Word x = prefix;
        x.insert(x.end(), nu.begin(), nu.end());
        next.push_back(std::move(x));
      }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    acc = std::move(next);
  }
  return acc;
}

inline EtolSearch etol_bfs(const EtolSystem& sys, std::size_t max_len, const EtolBudget& b,
                           const std::optional<Word>& target = std::nullopt) {
  auto lb = etol_lower_bounds(sys);
  auto bound = [&](const Word& w) {
    std::size_t sum = 0;
    for (const auto& s : w) sum = std::min<std::size_t>(kInf, sum + lb[s]);
    return sum;
  };
  EtolSearch r;
  Word start{sys.axiom};
  std::vector<Word> layer;
  auto admit = [&](const Word& w, std::size_t d) {
    if (bound(w) > max_len) return;
    if (b.max_width && etol_width(sys, w) > *b.max_width) {
      r.width_cap_hit = true;
      return;
    }
    if (!r.depth.emplace(w, d).second) return;
    if (r.depth.size() > b.frontier_cap) throw BudgetOverflow("ET0L search exceeded " + std::to_string(b.frontier_cap) + " words");
    if (etol_width(sys, w) == 0 && w.size() <= max_len) r.terminal_words.insert(w);
    layer.push_back(w);
  };
  admit(start, 0);
  for (std::size_t d = 0; !layer.empty(); ++d) {
    if (target && r.terminal_words.count(*target)) break;
    std::vector<Word> current;
    current.swap(layer);
    if (d == b.max_steps) {
      // a word at the step limit with a new successor means the search was cut short
      for (const auto& w : current)
        for (const auto& t : sys.tables)
          for (const auto& x : etol_successors(t, w))
            if (bound(x) <= max_len && !r.depth.count(x) &&
                !(b.max_width && etol_width(sys, x) > *b.max_width)) {
              r.step_cap_hit = true;
              return r;
            }
      break;
    }
    for (const auto& w : current)
      for (const auto& t : sys.tables)
        for (auto& x : etol_successors(t, w)) admit(x, d + 1);
  }
  return r;
}

}  // namespace detail

/// Terminal words of length ≤ max_len, explored breadth-first.
inline Enumeration etol_enumerate(const EtolSystem& sys, std::size_t max_len, const EtolBudget& b = {}) {
  auto r = detail::etol_bfs(sys, max_len, b);
  Enumeration e;
  e.words.assign(r.terminal_words.begin(), r.terminal_words.end());
  e.flags.step_cap_hit = r.step_cap_hit;
  e.flags.width_cap_hit = r.width_cap_hit;
  e.flags.forms = r.depth.size();
  return e;
}

/// Fewest table applications deriving w, if found within the budget.
inline std::optional<std::size_t> etol_derivation_length(const EtolSystem& sys, const Word& w, const EtolBudget& b = {}) {
  auto r = detail::etol_bfs(sys, w.size(), b, w);
  auto it = r.depth.find(w);
  if (it == r.depth.end()) return std::nullopt;
  return it->second;
}

/// Smallest k such that some derivation of w keeps at most k non-terminal
/// occurrences in every word, trying k = 1..k_max. Refuted when a search
/// finishes without hitting any cap, i.e. w is not in the language.
inline MeasureResult etol_index(const EtolSystem& sys, const Word& w, const EtolBudget& b = {}, std::size_t k_max = 16) {
  MeasureResult m;
  for (std::size_t k = 1; k <= k_max; ++k) {
    EtolBudget capped = b;
    capped.max_width = k;
    auto r = detail::etol_bfs(sys, w.size(), capped, w);
    if (r.terminal_words.count(w)) {
      m.status = Status::Proven;
      m.value = k;
      return m;
    }
    if (!r.width_cap_hit && !r.step_cap_hit) {
      m.status = Status::Refuted;  // not in the language at all
      return m;
    }
    m.flags.step_cap_hit = m.flags.step_cap_hit || r.step_cap_hit;
  }
  m.status = Status::Unknown;
  return m;
}

/// Indexed grammar with indices = table names:
///   S' -> S' [+f]   for every table f
///   S' -> axiom
///   B [f] -> ν      for every rule B -> ν of table f, B a non-terminal
inline IndexedGrammar etol_to_indexed(const EtolSystem& sys) {
  auto v = check_anf(sys);
  if (!v.empty()) throw NotInANF(std::move(v));
  NameAllocator names(sys.alphabet);
  IndexedGrammar g;
  g.name = "etol";
  g.terminals = sys.terminals;
  g.start = names.fresh("S'");
  g.variables.push_back(g.start);
  for (const auto& s : sys.alphabet)
    if (!sys.is_terminal(s)) g.variables.push_back(s);
  std::vector<Symbol> index;
  for (const auto& t : sys.tables) {
    index.push_back(names.fresh(t.name));
    g.indices.push_back(index.back());
  }
  for (const auto& f : index) g.productions.push_back(Production::push(g.start, g.start, f));
  g.productions.push_back(Production::plain(g.start, {sys.axiom}));
  for (std::size_t i = 0; i < sys.tables.size(); ++i)
    for (const auto& [b, bodies] : sys.tables[i].rules) {
      if (sys.is_terminal(b)) continue;
      for (const auto& nu : bodies) g.productions.push_back(Production::consume(b, index[i], nu));
    }
  return g;
}

inline EtolSystem parse_etol(const std::string& text) {
  EtolSystem sys;
  bool strict = false;
  std::vector<Symbol> declared;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> void { throw Error("line " + std::to_string(lineno) + ": " + msg); };
  auto note = [&](const Symbol& s) {
    if (!valid_symbol_name(s)) fail("bad symbol name '" + s + "'");
    if (std::find(sys.alphabet.begin(), sys.alphabet.end(), s) == sys.alphabet.end()) sys.alphabet.push_back(s);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string t = detail::trim(detail::strip_comment(raw));
    if (t.empty()) continue;
    if (detail::starts_with(t, "table ")) {
      if (t.back() != ':') fail("expected 'table <name>:'");
      std::string name = detail::trim(t.substr(6, t.size() - 7));
      if (!valid_symbol_name(name)) fail("bad table name '" + name + "'");
      for (const auto& x : sys.tables)
        if (x.name == name) fail("duplicate table '" + name + "'");
      sys.tables.push_back({name, {}});
      continue;
    }
    auto colon = t.find(':');
    if (colon == std::string::npos) fail("expected 'key: value'");
    std::string key = detail::trim(t.substr(0, colon));
    std::string rest = detail::trim(t.substr(colon + 1));
    if (key == "axiom") {
      if (!sys.axiom.empty()) fail("duplicate 'axiom:'");
      sys.axiom = rest;
      note(rest);
    } else if (key == "terminals") {
      for (auto& s : detail::split_list(rest))
        if (!s.empty()) {
          note(s);
          sys.terminals.push_back(s);
        }
    } else if (key == "nonterminals") {
      for (auto& s : detail::split_list(rest))
        if (!s.empty()) note(s);
    } else if (key == "strict") {
      strict = true;
    } else if (key == "rule") {
      if (sys.tables.empty()) fail("'rule:' outside a table");
      auto arrow = rest.find("->");
      if (arrow == std::string::npos) fail("expected 'rule: B -> ν'");
      std::string b = detail::trim(rest.substr(0, arrow));
      note(b);
      Word nu;
      auto body = detail::trim(rest.substr(arrow + 2));
      if (body.empty()) fail("missing rule body (use '_' for ε)");
      if (body != "_")
        for (auto& s : detail::split_ws(body)) {
          note(s);
          nu.push_back(s);
        }
      sys.tables.back().rules[b].push_back(std::move(nu));
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (sys.axiom.empty()) throw Error("missing 'axiom:' line");
  if (sys.tables.empty()) throw Error("system has no tables");
  for (auto& t : sys.tables)
    for (const auto& s : sys.alphabet)
      if (!t.rules.count(s)) {
        if (strict) throw Error("table '" + t.name + "' has no rule for '" + s + "' (strict mode)");
        t.rules[s].push_back({s});
      }
  return sys;
}

}  // namespace idxgram
