#pragma once

/// Closure constructions: union, morphic image, right-hand-side normal form,
/// intersection with a regular set, inverse projection, rational transduction
/// and inverse morphism.

#include <map>
#include <sstream>
#include <unordered_map>

#include "idxgram/automata.hpp"
#include "idxgram/grammar.hpp"
#include "idxgram/grammar_io.hpp"

namespace idxgram {

class NotNormalized : public Error {
public:
  using Error::Error;
};

/// A letter-to-word map, total on `source`.
struct Morphism {
  std::vector<Symbol> source;
  std::vector<Symbol> target;
  std::map<Symbol, Word> images;

  const Word& operator()(const Symbol& a) const {
    auto it = images.find(a);
    if (it == images.end()) throw Error("morphism undefined on '" + a + "'");
    return it->second;
  }
  Word apply(const Word& w) const {
    Word out;
    for (const auto& a : w) {
      const Word& img = (*this)(a);
      out.insert(out.end(), img.begin(), img.end());
    }
    return out;
  }

  static Morphism identity(const std::vector<Symbol>& alphabet) {
    Morphism h;
    h.source = alphabet;
    h.target = alphabet;
    for (const auto& a : alphabet) h.images[a] = {a};
    return h;
  }
};

/// Lines `map: a -> xy` (`_` is ε); optional `target: x, y` fixes the target
/// alphabet, which otherwise is the set of letters occurring in images.
inline Morphism parse_morphism(const std::string& text) {
  Morphism h;
  bool explicit_target = false;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string t = detail::trim(detail::strip_comment(raw));
    if (t.empty()) continue;
    auto colon = t.find(':');
    std::string key = colon == std::string::npos ? "" : detail::trim(t.substr(0, colon));
    std::string rest = colon == std::string::npos ? "" : t.substr(colon + 1);
    if (key == "target") {
      explicit_target = true;
      for (auto& s : detail::split_list(rest)) if (!s.empty()) h.target.push_back(s);
    } else if (key == "map") {
      auto arrow = rest.find("->");
      if (arrow == std::string::npos) throw Error("line " + std::to_string(lineno) + ": expected 'map: a -> w'");
      std::string a = detail::trim(rest.substr(0, arrow));
      if (!valid_symbol_name(a)) throw Error("line " + std::to_string(lineno) + ": bad source letter '" + a + "'");
      if (h.images.count(a)) throw Error("line " + std::to_string(lineno) + ": '" + a + "' mapped twice");
      h.source.push_back(a);
      h.images[a] = parse_word(rest.substr(arrow + 2));
    } else {
      throw Error("line " + std::to_string(lineno) + ": expected 'map:' or 'target:'");
    }
  }
  if (!explicit_target) {
    for (const auto& a : h.source)
      for (const auto& x : h.images[a])
        if (std::find(h.target.begin(), h.target.end(), x) == h.target.end()) h.target.push_back(x);
  } else {
    for (const auto& a : h.source)
      for (const auto& x : h.images[a])
        if (std::find(h.target.begin(), h.target.end(), x) == h.target.end())
          throw Error("image of '" + a + "' uses '" + x + "' outside the target alphabet");
  }
  return h;
}

inline std::string serialize_morphism(const Morphism& h) {
  std::ostringstream out;
  out << "target: " << join(h.target, ", ") << "\n";
  for (const auto& a : h.source) {
    const Word& w = h.images.at(a);
    out << "map: " << a << " -> " << (w.empty() ? std::string("_") : join(w, " ")) << "\n";
  }
  return out.str();
}

/// τ = {(π_source(u), π_target(u)) : u ∈ L(relation)}. Each letter of the
/// relation NFA is tagged with the side it belongs to, so source and target
/// may share names.
struct NivatTransducer {
  std::vector<Symbol> source;
  std::vector<Symbol> target;
  Nfa relation;
  std::vector<bool> is_target;  // parallel to relation.alphabet

  int letter(const Symbol& a, bool target_side) {
    for (std::size_t i = 0; i < relation.alphabet.size(); ++i)
      if (relation.alphabet[i] == a && is_target[i] == target_side) return static_cast<int>(i);
    relation.alphabet.push_back(a);
    is_target.push_back(target_side);
    return static_cast<int>(relation.alphabet.size()) - 1;
  }
};

/// NFA text format plus `source:` and `target:` lines. A transition letter
/// belongs to whichever alphabet contains it; a letter in both must be written
/// `in:x` or `out:x`.
inline NivatTransducer parse_transducer(const std::string& text) {
  NivatTransducer t;
  std::string automaton;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    std::string s = detail::trim(detail::strip_comment(raw));
    if (detail::starts_with(s, "source:")) {
      for (auto& x : detail::split_list(s.substr(7))) if (!x.empty()) t.source.push_back(x);
    } else if (detail::starts_with(s, "target:")) {
      for (auto& x : detail::split_list(s.substr(7))) if (!x.empty()) t.target.push_back(x);
    } else if (detail::starts_with(s, "alphabet:")) {
      // derived from source/target
    } else {
      automaton += s + "\n";
    }
  }
  Nfa plain = parse_nfa(automaton);
  t.relation.states = plain.states;
  t.relation.accepting = plain.accepting;
  t.relation.initial = plain.initial;
  auto in_list = [](const std::vector<Symbol>& v, const Symbol& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  for (const auto& x : t.source) t.letter(x, false);
  for (const auto& x : t.target) t.letter(x, true);
  for (const auto& e : plain.edges) {
    if (e.letter < 0) {
      t.relation.edges.push_back({e.from, -1, e.to});
      continue;
    }
    std::string name = plain.alphabet[static_cast<std::size_t>(e.letter)];
    bool side;
    if (detail::starts_with(name, "in:")) {
      name = name.substr(3);
      side = false;
      if (!in_list(t.source, name)) throw Error("'" + name + "' is not a source letter");
    } else if (detail::starts_with(name, "out:")) {
      name = name.substr(4);
      side = true;
      if (!in_list(t.target, name)) throw Error("'" + name + "' is not a target letter");
    } else {
      bool s = in_list(t.source, name), o = in_list(t.target, name);
      if (s && o) throw Error("letter '" + name + "' is in both alphabets; write in:" + name + " or out:" + name);
      if (!s && !o) throw Error("letter '" + name + "' is in neither alphabet");
      side = o;
    }
    t.relation.edges.push_back({e.from, t.letter(name, side), e.to});
  }
  return t;
}

namespace detail {

inline IndexedGrammar rename_grammar(const IndexedGrammar& g, const std::map<Symbol, Symbol>& vars,
                                     const std::map<Symbol, Symbol>& idx,
                                     const std::map<Symbol, Symbol>& terms = {}) {
  auto r = [](const std::map<Symbol, Symbol>& m, const Symbol& s) {
    auto it = m.find(s);
    return it == m.end() ? s : it->second;
  };
  IndexedGrammar out;
  out.name = g.name;
  for (const auto& v : g.variables) out.variables.push_back(r(vars, v));
  for (const auto& t : g.terminals) out.terminals.push_back(r(terms, t));
  for (const auto& f : g.indices) out.indices.push_back(r(idx, f));
  out.start = r(vars, g.start);
  SymbolTable tab(g);
  for (const auto& p : g.productions) {
    Production q = p;
    q.lhs = r(vars, p.lhs);
    if (!q.lhs_index.empty()) q.lhs_index = r(idx, p.lhs_index);
    if (!q.push_index.empty()) q.push_index = r(idx, p.push_index);
    for (auto& s : q.rhs) s = tab.variable(s) ? r(vars, s) : r(terms, s);
    out.productions.push_back(std::move(q));
  }
  return out;
}

/// Renames variables and indices that clash with `reserved` (typically a new
/// terminal alphabet).
inline IndexedGrammar rename_apart(const IndexedGrammar& g, const std::vector<Symbol>& reserved) {
  std::set<Symbol> res(reserved.begin(), reserved.end());
  NameAllocator names(g.variables);
  names.reserve_all(g.indices);
  names.reserve_all(g.terminals);
  names.reserve_all(reserved);
  std::map<Symbol, Symbol> vars, idx;
  for (const auto& v : g.variables)
    if (res.count(v)) vars[v] = names.fresh(v + "'");
  for (const auto& f : g.indices)
    if (res.count(f)) idx[f] = names.fresh(f + "'");
  if (vars.empty() && idx.empty()) return g;
  return rename_grammar(g, vars, idx);
}

/// Splits a Plain/Consume body into terminal segments and variables:
/// u1 X1 u2 ... Xk u_{k+1}.
struct BodyShape {
  std::vector<Word> segments;  // k+1 entries
  std::vector<Symbol> vars;    // k entries
};

inline BodyShape body_shape(const SymbolTable& t, const std::vector<Symbol>& rhs) {
  BodyShape s;
  s.segments.emplace_back();
  for (const auto& x : rhs) {
    if (t.variable(x)) {
      s.vars.push_back(x);
      s.segments.emplace_back();
    } else {
      s.segments.back().push_back(x);
    }
  }
  return s;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline Production with_body(const Production& p, std::vector<Symbol> body) {
  Production q = p;
  q.rhs = std::move(body);
  return q;
}

}  // namespace detail

/// L = L(g1) ∪ L(g2). Both inputs are renamed apart and joined by a fresh
/// start S with S -> S1 and S -> S2.
inline IndexedGrammar union_grammars(const IndexedGrammar& g1, const IndexedGrammar& g2) {
  NameAllocator names(g1.terminals);
  names.reserve_all(g2.terminals);
  auto tag = [&](const IndexedGrammar& g, const std::string& suffix) {
    std::map<Symbol, Symbol> vars, idx;
    for (const auto& v : g.variables) vars[v] = names.fresh(v + suffix);
    for (const auto& f : g.indices) idx[f] = names.fresh(f + suffix);
    return detail::rename_grammar(g, vars, idx);
  };
  IndexedGrammar a = tag(g1, "#1"), b = tag(g2, "#2");
  IndexedGrammar out;
  out.name = g1.name + "+" + g2.name;
  out.start = names.fresh("S");
  out.variables.push_back(out.start);
  out.variables.insert(out.variables.end(), a.variables.begin(), a.variables.end());
  out.variables.insert(out.variables.end(), b.variables.begin(), b.variables.end());
  out.terminals = g1.terminals;
  for (const auto& t : g2.terminals)
    if (!g1.is_terminal(t)) out.terminals.push_back(t);
  out.indices = a.indices;
  out.indices.insert(out.indices.end(), b.indices.begin(), b.indices.end());
  out.productions.push_back(Production::plain(out.start, {a.start}));
  out.productions.push_back(Production::plain(out.start, {b.start}));
  out.productions.insert(out.productions.end(), a.productions.begin(), a.productions.end());
  out.productions.insert(out.productions.end(), b.productions.begin(), b.productions.end());
  return out;
}

/// Replaces every terminal a in a right-hand side by h(a).
inline IndexedGrammar morphism_image(const IndexedGrammar& g, const Morphism& h) {
  for (const auto& t : g.terminals)
    if (!h.images.count(t)) throw Error("morphism undefined on terminal '" + t + "'");
  IndexedGrammar out = detail::rename_apart(g, h.target);
  SymbolTable tab(out);
  out.terminals = h.target;
  for (auto& p : out.productions) {
    if (p.kind == ProductionKind::Push) continue;
    std::vector<Symbol> body;
    for (const auto& s : p.rhs) {
      if (tab.variable(s)) {
        body.push_back(s);
      } else {
        const Word& img = h(s);
        body.insert(body.end(), img.begin(), img.end());
      }
    }
    p.rhs = std::move(body);
  }
  return out;
}

/// True iff every Plain/Consume body is u, u X Z or u X v (u, v terminal
/// words, X, Z variables).
inline bool is_rhs_normal(const IndexedGrammar& g) {
  SymbolTable tab(g);
  for (const auto& p : g.productions) {
    if (p.kind == ProductionKind::Push) continue;
    auto s = detail::body_shape(tab, p.rhs);
    if (s.vars.size() > 2) return false;
    if (s.vars.size() == 2 && !(s.segments[1].empty() && s.segments[2].empty())) return false;
  }
  return true;
}

/// Rewrites each non-normal body u1 X1 ... uk Xk u_{k+1} into the chain
///   A -> u1 X1 Z1,  Zj -> u_{j+1} X_{j+1} Z_{j+1},  Z_{k-1} -> uk Xk u_{k+1}
/// with fresh variables Z. Bodies already of the form u, uXZ, uXv are kept.
inline IndexedGrammar normalize_rhs(const IndexedGrammar& g) {
  SymbolTable tab(g);
  NameAllocator names(g.variables);
  names.reserve_all(g.terminals);
  names.reserve_all(g.indices);
  IndexedGrammar out = g;
  out.productions.clear();
  std::size_t counter = 0;
  for (const auto& p : g.productions) {
    if (p.kind == ProductionKind::Push) {
      out.productions.push_back(p);
      continue;
    }
    auto s = detail::body_shape(tab, p.rhs);
    const std::size_t k = s.vars.size();
    bool normal = k <= 1 || (k == 2 && s.segments[1].empty() && s.segments[2].empty());
    if (normal) {
      out.productions.push_back(p);
      continue;
    }
    std::vector<Symbol> z;
    for (std::size_t j = 1; j < k; ++j) {
      z.push_back(names.fresh("Z#" + std::to_string(++counter)));
      out.variables.push_back(z.back());
    }
    auto seg = [&](std::size_t i) { return s.segments[i]; };
    std::vector<Symbol> body = seg(0);
    body.push_back(s.vars[0]);
    body.push_back(z[0]);
    out.productions.push_back(detail::with_body(p, body));
    for (std::size_t j = 1; j + 1 < k; ++j) {
      std::vector<Symbol> b = seg(j);
      b.push_back(s.vars[j]);
      b.push_back(z[j]);
      out.productions.push_back(Production::plain(z[j - 1], b));
    }
    std::vector<Symbol> last = seg(k - 1);
    last.push_back(s.vars[k - 1]);
    last.insert(last.end(), s.segments[k].begin(), s.segments[k].end());
    out.productions.push_back(Production::plain(z[k - 2], last));
  }
  return out;
}

/// Drops variables that derive no terminal word even ignoring stacks, and
/// variables unreachable from the start, together with their productions.
/// Unused indices are dropped as well. The language is unchanged.
inline IndexedGrammar prune_grammar(const IndexedGrammar& g) {
  SymbolTable tab(g);
  std::unordered_set<Symbol> productive;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& p : g.productions) {
      if (productive.count(p.lhs)) continue;
      bool ok = std::all_of(p.rhs.begin(), p.rhs.end(),
                            [&](const Symbol& s) { return !tab.variable(s) || productive.count(s); });
      if (ok) changed = productive.insert(p.lhs).second || changed;
    }
  }
  auto usable = [&](const Production& p) {
    return productive.count(p.lhs) &&
           std::all_of(p.rhs.begin(), p.rhs.end(),
                       [&](const Symbol& s) { return !tab.variable(s) || productive.count(s); });
  };
  std::unordered_set<Symbol> reach{g.start};
  std::vector<Symbol> work{g.start};
  while (!work.empty()) {
    Symbol a = work.back();
    work.pop_back();
    for (const auto& p : g.productions)
      if (p.lhs == a && usable(p))
        for (const auto& s : p.rhs)
          if (tab.variable(s) && reach.insert(s).second) work.push_back(s);
  }
  IndexedGrammar out;
  out.name = g.name;
  out.start = g.start;
  out.terminals = g.terminals;
  for (const auto& v : g.variables)
    if (v == g.start || (reach.count(v) && productive.count(v))) out.variables.push_back(v);
  std::unordered_set<Symbol> used_idx;
  for (const auto& p : g.productions) {
    if (!usable(p) || !reach.count(p.lhs)) continue;
    out.productions.push_back(p);
    if (!p.lhs_index.empty()) used_idx.insert(p.lhs_index);
    if (!p.push_index.empty()) used_idx.insert(p.push_index);
  }
  for (const auto& f : g.indices)
    if (used_idx.count(f)) out.indices.push_back(f);
  return out;
}

/// L = L(g) ∩ L(d). Variables are triples <p|A|q> ("A derives a word leading
/// from p to q"), indices are primed copies, and a fresh start chooses an
/// accepting end state. Requires g in right-hand-side normal form.
inline IndexedGrammar intersect_dfa(const IndexedGrammar& g, const Dfa& d) {
  if (!is_rhs_normal(g)) throw NotNormalized("grammar is not in right-hand-side normal form; apply normalize_rhs first");
  if (!d.is_total()) throw AutomatonError("automaton is not total");
  for (const auto& t : g.terminals)
    if (d.letter(t) < 0) throw AutomatonError("terminal '" + t + "' is not in the automaton alphabet");

  SymbolTable tab(g);
  const int n = d.size();
  NameAllocator names(g.terminals);
  std::map<Symbol, Symbol> prime;
  for (const auto& f : g.indices) prime[f] = names.fresh(f + "'");
  // triple names never clash with terminals since '<' names are reserved
  std::vector<std::vector<std::vector<Symbol>>> triple(g.variables.size());
  std::unordered_map<Symbol, std::size_t> vid;
  for (std::size_t i = 0; i < g.variables.size(); ++i) vid[g.variables[i]] = i;

  IndexedGrammar out;
  out.name = g.name + "&dfa";
  out.terminals = g.terminals;
  for (const auto& f : g.indices) out.indices.push_back(prime[f]);
  for (std::size_t i = 0; i < g.variables.size(); ++i) {
    triple[i].assign(static_cast<std::size_t>(n), std::vector<Symbol>(static_cast<std::size_t>(n)));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        auto& name = triple[i][static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
        name = names.fresh("<" + d.states[static_cast<std::size_t>(p)] + "|" + g.variables[i] + "|" +
                           d.states[static_cast<std::size_t>(q)] + ">");
        out.variables.push_back(name);
      }
  }
  out.start = names.fresh("S'");
  out.variables.insert(out.variables.begin(), out.start);

  auto T = [&](int p, const Symbol& a, int q) -> const Symbol& {
    return triple[vid.at(a)][static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
  };
  auto step = [&](int p, const Word& w) { return *d.run(p, w); };
  auto make = [&](const Production& p, Symbol lhs, std::vector<Symbol> body) {
    Production q;
    q.lhs = std::move(lhs);
    q.kind = p.kind;
    if (p.kind == ProductionKind::Consume) q.lhs_index = prime[p.lhs_index];
    q.rhs = std::move(body);
    return q;
  };

  for (const auto& p : g.productions) {
    if (p.kind == ProductionKind::Push) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          out.productions.push_back(Production::push(T(a, p.lhs, b), T(a, p.rhs[0], b), prime[p.push_index]));
      continue;
    }
    auto s = detail::body_shape(tab, p.rhs);
    if (s.vars.empty()) {
      for (int a = 0; a < n; ++a) out.productions.push_back(make(p, T(a, p.lhs, step(a, s.segments[0])), s.segments[0]));
    } else if (s.vars.size() == 1) {
      const Word& v = s.segments[0];
      const Word& w = s.segments[1];
      for (int a = 0; a < n; ++a) {
        int r = step(a, v);
        for (int sx = 0; sx < n; ++sx) {
          std::vector<Symbol> body = v;
          body.push_back(T(r, s.vars[0], sx));
          body.insert(body.end(), w.begin(), w.end());
          out.productions.push_back(make(p, T(a, p.lhs, step(sx, w)), std::move(body)));
        }
      }
    } else {
      const Word& u = s.segments[0];
      for (int a = 0; a < n; ++a) {
        int r1 = step(a, u);
        for (int q = 0; q < n; ++q)
          for (int r2 = 0; r2 < n; ++r2) {
            std::vector<Symbol> body = u;
            body.push_back(T(r1, s.vars[0], r2));
            body.push_back(T(r2, s.vars[1], q));
            out.productions.push_back(make(p, T(a, p.lhs, q), std::move(body)));
          }
      }
    }
  }
  for (int f = 0; f < n; ++f)
    if (d.accepting[static_cast<std::size_t>(f)])
      out.productions.push_back(Production::plain(out.start, {T(d.initial, g.start, f)}));
  return out;
}

/// L = π_T⁻¹(L(g)) for an alphabet T' ⊇ T: the letters of T'∖T may be
/// interleaved anywhere. Each Plain/Consume production
/// X f -> u1 X1 ... uk Xk u_{k+1} becomes X f -> Y_{1,0} ... Y_{k+1,0}, where
/// Y_{i,j} emits the j-th letter of u_i with padding letters around it.
inline IndexedGrammar inverse_projection(const IndexedGrammar& g, const std::vector<Symbol>& extended) {
  for (const auto& t : g.terminals)
    if (std::find(extended.begin(), extended.end(), t) == extended.end())
      throw Error("extended alphabet is missing terminal '" + t + "'");
  IndexedGrammar base = detail::rename_apart(g, extended);
  SymbolTable tab(base);
  std::vector<Symbol> pad;
  for (const auto& c : extended)
    if (!base.is_terminal(c)) pad.push_back(c);

  NameAllocator names(base.variables);
  names.reserve_all(base.indices);
  names.reserve_all(extended);
  IndexedGrammar out;
  out.name = g.name + "/proj";
  out.variables = base.variables;
  out.terminals = extended;
  out.indices = base.indices;
  out.start = base.start;

  for (std::size_t pi = 0; pi < base.productions.size(); ++pi) {
    const auto& p = base.productions[pi];
    if (p.kind == ProductionKind::Push) {
      out.productions.push_back(p);
      continue;
    }
    auto s = detail::body_shape(tab, p.rhs);
    const std::size_t k = s.vars.size();
    std::vector<std::vector<Symbol>> y(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
      for (std::size_t j = 0; j <= s.segments[i].size(); ++j) {
        y[i].push_back(names.fresh("Y#" + std::to_string(pi + 1) + "#" + std::to_string(i + 1) + "#" + std::to_string(j)));
        out.variables.push_back(y[i].back());
      }
    std::vector<Symbol> head;
    for (std::size_t i = 0; i <= k; ++i) head.push_back(y[i][0]);
    out.productions.push_back(detail::with_body(p, head));
    for (std::size_t i = 0; i <= k; ++i) {
      const Word& u = s.segments[i];
      for (std::size_t j = 0; j < u.size(); ++j) {
        for (const auto& c : pad) out.productions.push_back(Production::plain(y[i][j], {c, y[i][j]}));
        out.productions.push_back(Production::plain(y[i][j], {u[j], y[i][j + 1]}));
      }
      const Symbol& last = y[i].back();
      if (i < k) {
        out.productions.push_back(Production::plain(last, {s.vars[i]}));
      } else {
        for (const auto& c : pad) {
          out.productions.push_back(Production::plain(last, {last, c}));
          out.productions.push_back(Production::plain(last, {c}));
        }
        out.productions.push_back(Production::plain(last, {}));
      }
    }
  }
  return out;
}

/// L = τ(L(g)) = π_target(π_source⁻¹(L(g)) ∩ R). When the alphabets overlap,
/// the grammar's source letters are first renamed to a disjoint copy.
inline IndexedGrammar nivat_transduce(const IndexedGrammar& g, const NivatTransducer& tau) {
  IndexedGrammar src = g;
  NivatTransducer t = tau;
  std::set<Symbol> target(t.target.begin(), t.target.end());
  bool overlap = std::any_of(g.terminals.begin(), g.terminals.end(), [&](const Symbol& a) { return target.count(a); }) ||
                 std::any_of(t.source.begin(), t.source.end(), [&](const Symbol& a) { return target.count(a); });
  if (overlap) {
    NameAllocator names(g.variables);
    names.reserve_all(g.indices);
    names.reserve_all(g.terminals);
    names.reserve_all(t.source);
    names.reserve_all(t.target);
    std::map<Symbol, Symbol> copy;
    auto copy_of = [&](const Symbol& a) -> const Symbol& {
      auto it = copy.find(a);
      if (it == copy.end()) it = copy.emplace(a, names.fresh(a + "''")).first;
      return it->second;
    };
    for (const auto& a : t.source) copy_of(a);
    for (const auto& a : g.terminals) copy_of(a);
    src = detail::rename_grammar(g, {}, {}, copy);
    for (auto& a : t.source) a = copy.at(a);
    for (std::size_t i = 0; i < t.relation.alphabet.size(); ++i)
      if (!t.is_target[i]) t.relation.alphabet[i] = copy.at(t.relation.alphabet[i]);
  }

  // source letters the grammar never uses still count as source letters: a
  // relation word holding one must not survive the inverse projection
  for (const auto& a : t.source)
    if (!src.is_terminal(a)) src.terminals.push_back(a);
  std::vector<Symbol> extended = src.terminals;
  for (const auto& a : t.target)
    if (std::find(extended.begin(), extended.end(), a) == extended.end()) extended.push_back(a);

  IndexedGrammar lifted = inverse_projection(src, extended);
  Dfa r = determinize(t.relation, extended);
  IndexedGrammar meet = prune_grammar(intersect_dfa(normalize_rhs(lifted), r));
  Morphism proj;
  proj.source = meet.terminals;
  proj.target = t.target;
  for (const auto& a : meet.terminals) proj.images[a] = target.count(a) ? Word{a} : Word{};
  IndexedGrammar out = morphism_image(meet, proj);
  out.name = g.name + "/tau";
  return out;
}

/// L = h⁻¹(L(g)) for h : Σ -> T*, as the transduction with
/// R = (∪_x x·h(x))*.
inline IndexedGrammar inverse_morphism(const IndexedGrammar& g, const Morphism& h) {
  NivatTransducer t;
  t.source = g.terminals;
  for (const auto& x : h.source)
    for (const auto& a : h(x))
      if (!g.is_terminal(a) && std::find(t.source.begin(), t.source.end(), a) == t.source.end())
        t.source.push_back(a);
  t.target = h.source;
  int home = t.relation.add_state("q0", true);
  t.relation.initial = home;
  for (const auto& a : t.source) t.letter(a, false);
  for (const auto& x : t.target) t.letter(x, true);
  for (const auto& x : h.source) {
    const Word& img = h(x);
    int cur = home;
    std::vector<std::pair<int, bool>> path{{t.letter(x, true), true}};
    for (const auto& a : img) path.push_back({t.letter(a, false), false});
    for (std::size_t i = 0; i < path.size(); ++i) {
      int next = i + 1 == path.size() ? home : t.relation.add_state(x + "." + std::to_string(i + 1));
      t.relation.edges.push_back({cur, path[i].first, next});
      cur = next;
    }
  }
  IndexedGrammar out = nivat_transduce(g, t);
  out.name = g.name + "/inv";
  return out;
}

}  // namespace idxgram
