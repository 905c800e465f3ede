#pragma once

/// Finite automata over named letters: total DFAs, NFAs with ε-moves, the
/// subset construction and products.
///
/// Text format
///   states: p, q
///   alphabet: a, b
///   initial: p
///   accepting: q
///   trans: p a -> q        (an NFA may list several targets: -> q, r ; `_` is ε)

#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "idxgram/common.hpp"

namespace idxgram {

class AutomatonError : public Error {
public:
  using Error::Error;
};

struct Nfa {
  struct Edge {
    int from;
    int letter;  // -1 for ε
    int to;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  std::vector<std::string> states;
  std::vector<Symbol> alphabet;
  std::vector<Edge> edges;
  int initial = 0;
  std::vector<bool> accepting;

  int add_state(std::string name, bool accept = false) {
    states.push_back(std::move(name));
    accepting.push_back(accept);
    return static_cast<int>(states.size()) - 1;
  }
  int letter(const Symbol& a) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == a) return static_cast<int>(i);
    return -1;
  }
  int add_letter(const Symbol& a) {
    int l = letter(a);
    if (l >= 0) return l;
    alphabet.push_back(a);
    return static_cast<int>(alphabet.size()) - 1;
  }

  std::set<int> epsilon_closure(std::set<int> s) const {
    std::vector<int> work(s.begin(), s.end());
    while (!work.empty()) {
      int q = work.back();
      work.pop_back();
      for (const auto& e : edges)
        if (e.from == q && e.letter < 0 && s.insert(e.to).second) work.push_back(e.to);
    }
    return s;
  }

  bool accepts(const Word& w) const {
    std::set<int> cur = epsilon_closure({initial});
    for (const auto& a : w) {
      int l = letter(a);
      if (l < 0) return false;
      std::set<int> next;
      for (const auto& e : edges)
        if (e.letter == l && cur.count(e.from)) next.insert(e.to);
      cur = epsilon_closure(std::move(next));
    }
    return std::any_of(cur.begin(), cur.end(), [&](int q) { return accepting[static_cast<std::size_t>(q)]; });
  }
};

/// Total deterministic automaton.
struct Dfa {
  std::vector<std::string> states;
  std::vector<Symbol> alphabet;
  std::vector<std::vector<int>> delta;  // [state][letter]
  int initial = 0;
  std::vector<bool> accepting;

  int letter(const Symbol& a) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == a) return static_cast<int>(i);
    return -1;
  }
  int size() const { return static_cast<int>(states.size()); }

  /// Extended transition function; nullopt if a letter is outside the alphabet.
  std::optional<int> run(int q, const Word& w) const {
    for (const auto& a : w) {
      int l = letter(a);
      if (l < 0) return std::nullopt;
      q = delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(l)];
    }
    return q;
  }
  bool accepts(const Word& w) const {
    auto q = run(initial, w);
    return q && accepting[static_cast<std::size_t>(*q)];
  }

  bool is_total() const {
    for (const auto& row : delta) {
      if (row.size() != alphabet.size()) return false;
      for (int t : row)
        if (t < 0 || t >= size()) return false;
    }
    return static_cast<int>(delta.size()) == size() && initial >= 0 && initial < size();
  }
};

/// Subset construction over `alphabet` (defaults to the NFA's). Letters the
/// NFA does not know lead to the empty subset, which is the sink state.
inline Dfa determinize(const Nfa& n, std::optional<std::vector<Symbol>> alphabet = std::nullopt) {
  Dfa d;
  d.alphabet = alphabet ? *alphabet : n.alphabet;
  std::vector<int> map_letter;
  for (const auto& a : d.alphabet) map_letter.push_back(n.letter(a));

  std::map<std::set<int>, int> ids;
  std::vector<std::set<int>> subsets;
  auto intern = [&](std::set<int> s) {
    auto [it, fresh] = ids.emplace(s, static_cast<int>(subsets.size()));
    if (fresh) {
      std::string name = "{";
      bool first = true;
      for (int q : s) {
        if (!first) name += "+";
        name += n.states[static_cast<std::size_t>(q)];
        first = false;
      }
      name += "}";
      d.states.push_back(name);
      d.accepting.push_back(std::any_of(s.begin(), s.end(), [&](int q) { return n.accepting[static_cast<std::size_t>(q)]; }));
      d.delta.emplace_back();
      subsets.push_back(std::move(s));
    }
    return it->second;
  };
  d.initial = intern(n.epsilon_closure({n.initial}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    std::vector<int> row;
    for (std::size_t l = 0; l < d.alphabet.size(); ++l) {
      std::set<int> next;
      if (map_letter[l] >= 0) {
        for (const auto& e : n.edges)
          if (e.letter == map_letter[l] && subsets[i].count(e.from)) next.insert(e.to);
      }
      row.push_back(intern(n.epsilon_closure(std::move(next))));
    }
    d.delta[i] = std::move(row);
  }
  return d;
}

/// Intersection of two DFAs over the union of their alphabets; letters unknown
/// to one side send that side to a rejecting sink.
inline Dfa product(const Dfa& a, const Dfa& b) {
  Dfa d;
  d.alphabet = a.alphabet;
  for (const auto& x : b.alphabet)
    if (a.letter(x) < 0) d.alphabet.push_back(x);
  const int sa = a.size(), sb = b.size();
  auto id = [&](int p, int q) { return p * (sb + 1) + q; };
  std::unordered_map<int, int> ids;
  std::vector<std::pair<int, int>> pairs;
  auto intern = [&](int p, int q) {
    auto [it, fresh] = ids.emplace(id(p, q), static_cast<int>(pairs.size()));
    if (fresh) {
      pairs.emplace_back(p, q);
      std::string pn = p < sa ? a.states[static_cast<std::size_t>(p)] : "sink";
      std::string qn = q < sb ? b.states[static_cast<std::size_t>(q)] : "sink";
      d.states.push_back("(" + pn + "," + qn + ")");
      d.accepting.push_back(p < sa && q < sb && a.accepting[static_cast<std::size_t>(p)] &&
                            b.accepting[static_cast<std::size_t>(q)]);
      d.delta.emplace_back();
    }
    return it->second;
  };
  d.initial = intern(a.initial, b.initial);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<int> row;
    for (const auto& x : d.alphabet) {
      auto [p, q] = pairs[i];
      int la = a.letter(x), lb = b.letter(x);
      int np = (p < sa && la >= 0) ? a.delta[static_cast<std::size_t>(p)][static_cast<std::size_t>(la)] : sa;
      int nq = (q < sb && lb >= 0) ? b.delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(lb)] : sb;
      row.push_back(intern(np, nq));
    }
    d.delta[i] = std::move(row);
  }
  return d;
}

inline Nfa to_nfa(const Dfa& d) {
  Nfa n;
  n.states = d.states;
  n.alphabet = d.alphabet;
  n.initial = d.initial;
  n.accepting = d.accepting;
  for (int q = 0; q < d.size(); ++q)
    for (std::size_t l = 0; l < d.alphabet.size(); ++l)
      n.edges.push_back({q, static_cast<int>(l), d.delta[static_cast<std::size_t>(q)][l]});
  return n;
}

/// Universal / empty automata over an alphabet.
inline Dfa universal_dfa(std::vector<Symbol> alphabet, bool accept_all = true) {
  Dfa d;
  d.alphabet = std::move(alphabet);
  d.states = {"q0"};
  d.delta = {std::vector<int>(d.alphabet.size(), 0)};
  d.accepting = {accept_all};
  return d;
}

// ---------------------------------------------------------------------------
// Text format

inline Nfa parse_nfa(const std::string& text) {
  Nfa n;
  std::unordered_map<std::string, int> sid;
  auto state = [&](const std::string& s) {
    auto it = sid.find(s);
    if (it != sid.end()) return it->second;
    int id = n.add_state(s);
    sid.emplace(s, id);
    return id;
  };
  bool have_initial = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  std::vector<std::string> accepting;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string t = detail::trim(detail::strip_comment(raw));
    if (t.empty()) continue;
    auto colon = t.find(':');
    if (colon == std::string::npos)
      throw AutomatonError("line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = detail::trim(t.substr(0, colon));
    std::string rest = t.substr(colon + 1);
    if (key == "states") {
      for (auto& s : detail::split_list(rest)) if (!s.empty()) state(s);
    } else if (key == "alphabet") {
      for (auto& s : detail::split_list(rest)) if (!s.empty()) n.add_letter(s);
    } else if (key == "initial") {
      if (have_initial) throw AutomatonError("line " + std::to_string(lineno) + ": duplicate 'initial:'");
      n.initial = state(detail::trim(rest));
      have_initial = true;
    } else if (key == "accepting") {
      for (auto& s : detail::split_list(rest)) if (!s.empty()) accepting.push_back(s);
    } else if (key == "trans") {
      auto arrow = rest.find("->");
      if (arrow == std::string::npos) throw AutomatonError("line " + std::to_string(lineno) + ": expected '->'");
      auto lhs = detail::split_ws(rest.substr(0, arrow));
      if (lhs.size() != 2) throw AutomatonError("line " + std::to_string(lineno) + ": expected 'trans: p a -> q'");
      int from = state(lhs[0]);
      int letter = lhs[1] == "_" ? -1 : n.add_letter(lhs[1]);
      for (auto& target : detail::split_list(rest.substr(arrow + 2))) {
        if (target.empty()) throw AutomatonError("line " + std::to_string(lineno) + ": empty target");
        n.edges.push_back({from, letter, state(target)});
      }
    } else {
      throw AutomatonError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_initial) throw AutomatonError("missing 'initial:' line");
  for (const auto& a : accepting) n.accepting[static_cast<std::size_t>(state(a))] = true;
  return n;
}

/// Parses a deterministic automaton. Missing transitions go to an added
/// rejecting sink so the result is total; a nondeterministic file is an error.
inline Dfa parse_dfa(const std::string& text) {
  Nfa n = parse_nfa(text);
  Dfa d;
  d.states = n.states;
  d.alphabet = n.alphabet;
  d.initial = n.initial;
  d.accepting = n.accepting;
  d.delta.assign(n.states.size(), std::vector<int>(n.alphabet.size(), -1));
  for (const auto& e : n.edges) {
    if (e.letter < 0) throw AutomatonError("DFA may not have ε-transitions");
    int& slot = d.delta[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.letter)];
    if (slot >= 0 && slot != e.to) throw AutomatonError("DFA has two transitions from '" + n.states[static_cast<std::size_t>(e.from)] + "' on '" + n.alphabet[static_cast<std::size_t>(e.letter)] + "'");
    slot = e.to;
  }
  int sink = -1;
  for (auto& row : d.delta)
    for (int& t : row)
      if (t < 0) {
        if (sink < 0) {
          NameAllocator names(d.states);
          d.states.push_back(names.fresh("sink"));
          d.accepting.push_back(false);
          sink = static_cast<int>(d.states.size()) - 1;
        }
        t = sink;
      }
  if (sink >= 0) d.delta.emplace_back(d.alphabet.size(), sink);
  return d;
}

inline std::string serialize_nfa(const Nfa& n) {
  std::ostringstream out;
  out << "states: " << join(n.states, ", ") << "\n";
  out << "alphabet: " << join(n.alphabet, ", ") << "\n";
  out << "initial: " << n.states[static_cast<std::size_t>(n.initial)] << "\n";
  std::vector<std::string> acc;
  for (std::size_t i = 0; i < n.states.size(); ++i)
    if (n.accepting[i]) acc.push_back(n.states[i]);
  out << "accepting: " << join(acc, ", ") << "\n";
  for (const auto& e : n.edges) {
    out << "trans: " << n.states[static_cast<std::size_t>(e.from)] << " "
        << (e.letter < 0 ? std::string("_") : n.alphabet[static_cast<std::size_t>(e.letter)]) << " -> "
        << n.states[static_cast<std::size_t>(e.to)] << "\n";
  }
  return out.str();
}

inline std::string serialize_dfa(const Dfa& d) { return serialize_nfa(to_nfa(d)); }

}  // namespace idxgram
