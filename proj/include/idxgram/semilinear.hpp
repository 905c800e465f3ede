#pragma once

/// Linear and semilinear sets, the Parikh and Ginsburg maps, exact decisions
/// through tuple automata, and synthesis of indexed grammars for bounded
/// languages φ(B).
///
/// File format
///   dim: 3
///   linear: base = (0,0,1); periods = (1,1,0), (0,0,2)
///   shape: a, b, c          # optional; one word per coordinate

#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "idxgram/grammar.hpp"
#include "idxgram/tuple_automaton.hpp"

namespace idxgram {

inline std::string format_vector(const Vector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + ")";
}

/// b0 + {b1..bl}^⊕. Zero periods are dropped on construction.
struct LinearSet {
  std::size_t dim = 0;
  Vector base;
  std::vector<Vector> periods;

  LinearSet() = default;
  LinearSet(Vector b, std::vector<Vector> ps) : dim(b.size()), base(std::move(b)) {
    for (auto& p : ps) {
      if (p.size() != dim) throw DimensionMismatch("period " + format_vector(p) + " has dimension " + std::to_string(p.size()) + ", expected " + std::to_string(dim));
      if (std::any_of(p.begin(), p.end(), [](std::int64_t x) { return x < 0; }) ||
          std::any_of(base.begin(), base.end(), [](std::int64_t x) { return x < 0; }))
        throw Error("linear set entries must be natural numbers");
      if (std::any_of(p.begin(), p.end(), [](std::int64_t x) { return x != 0; })) periods.push_back(std::move(p));
    }
    for (auto x : base)
      if (x < 0) throw Error("linear set entries must be natural numbers");
  }
  friend bool operator==(const LinearSet&, const LinearSet&) = default;
};

struct SemilinearSet {
  std::size_t dim = 0;
  std::vector<LinearSet> components;

  SemilinearSet() = default;
  SemilinearSet(std::size_t d, std::vector<LinearSet> cs) : dim(d), components(std::move(cs)) {
    for (const auto& c : components)
      if (c.dim != dim) throw DimensionMismatch("component of dimension " + std::to_string(c.dim) + " in a set of dimension " + std::to_string(dim));
  }
  explicit SemilinearSet(LinearSet l) : dim(l.dim), components{std::move(l)} {}
};

/// Nonempty words u1..uk for φ(l1..lk) = u1^l1 ... uk^lk.
struct GinsburgShape {
  std::vector<Word> words;

  GinsburgShape() = default;
  explicit GinsburgShape(std::vector<Word> ws) : words(std::move(ws)) {
    if (words.empty()) throw Error("shape needs at least one word");
    for (const auto& w : words)
      if (w.empty()) throw Error("shape words must be nonempty");
  }
  std::size_t dim() const { return words.size(); }
  friend bool operator==(const GinsburgShape&, const GinsburgShape&) = default;
};

inline Vector parikh(const Word& w, const std::vector<Symbol>& alphabet) {
  Vector v(alphabet.size(), 0);
  for (const auto& a : w) {
    auto it = std::find(alphabet.begin(), alphabet.end(), a);
    if (it == alphabet.end()) throw Error("letter '" + a + "' outside the alphabet");
    ++v[static_cast<std::size_t>(it - alphabet.begin())];
  }
  return v;
}

inline Word ginsburg_apply(const GinsburgShape& shape, const Vector& v) {
  if (v.size() != shape.dim()) throw DimensionMismatch("vector of dimension " + std::to_string(v.size()) + " for a shape of dimension " + std::to_string(shape.dim()));
  Word out;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::int64_t r = 0; r < v[i]; ++r) out.insert(out.end(), shape.words[i].begin(), shape.words[i].end());
  return out;
}

inline std::size_t ginsburg_length(const GinsburgShape& shape, const Vector& v) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < v.size(); ++i) n += static_cast<std::size_t>(v[i]) * shape.words[i].size();
  return n;
}

/// Direct search for x ≥ 0 with v = b0 + Σ x_i b_i. Each x_i is bounded by the
/// remaining residual since periods are nonzero.
inline bool diophantine_member(const Vector& v, const LinearSet& l) {
  if (v.size() != l.dim) throw DimensionMismatch("vector of dimension " + std::to_string(v.size()) + " against a set of dimension " + std::to_string(l.dim));
  Vector r(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    r[j] = v[j] - l.base[j];
    if (r[j] < 0) return false;
  }
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == l.periods.size()) return std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x == 0; });
    const Vector& p = l.periods[i];
    std::int64_t cap = -1;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p[j] > 0) cap = cap < 0 ? r[j] / p[j] : std::min(cap, r[j] / p[j]);
    for (std::int64_t x = 0; x <= cap; ++x) {
      if (go(i + 1)) return true;
      for (std::size_t j = 0; j < p.size(); ++j) r[j] -= p[j];
    }
    for (std::size_t j = 0; j < p.size(); ++j) r[j] += (cap + 1) * p[j];
    return false;
  };
  return go(0);
}

inline bool diophantine_member(const Vector& v, const SemilinearSet& s) {
  return std::any_of(s.components.begin(), s.components.end(), [&](const LinearSet& l) { return diophantine_member(v, l); });
}

/// Tracks 0..k-1 hold v, tracks k..k+l-1 the coefficients x. Each coordinate
/// j contributes the equation v_j - Σ x_i b_ij = b0_j; the x tracks are then
/// projected away.
inline TupleAutomaton linearset_automaton(const LinearSet& l) {
  const std::size_t k = l.dim, m = k + l.periods.size();
  if (m > 20) throw Error("linear set too large for the tuple automaton (" + std::to_string(m) + " tracks)");
  TupleAutomaton a;
  if (k == 0) {
    a.tracks = 0;
    a.add_state(true);
    a.add_edge(0, 0, 0);
    return a;
  }
  for (std::size_t j = 0; j < k; ++j) {
    Vector coeff(m, 0);
    coeff[j] = 1;
    for (std::size_t i = 0; i < l.periods.size(); ++i) coeff[k + i] = -l.periods[i][j];
    auto e = equation_automaton(coeff, l.base[j]);
    a = j == 0 ? e : product(a, e);
  }
  std::vector<int> keep;
  for (std::size_t j = 0; j < k; ++j) keep.push_back(static_cast<int>(j));
  return minimize(project_tracks(a, keep));
}

/// Complete minimal DFA for the set. The empty set gives a single rejecting state.
inline TupleAutomaton semilinear_automaton(const SemilinearSet& s) {
  if (s.components.empty()) {
    TupleAutomaton a;
    a.tracks = static_cast<int>(s.dim);
    a.add_state(false);
    for (std::uint32_t sym = 0; sym < a.symbols(); ++sym) a.add_edge(0, sym, 0);
    return a;
  }
  TupleAutomaton a = linearset_automaton(s.components[0]);
  for (std::size_t i = 1; i < s.components.size(); ++i) a = minimize(union_of(a, linearset_automaton(s.components[i])));
  return a;
}

inline void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch("dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
}

inline bool slset_member(const Vector& v, const SemilinearSet& s) {
  require_same_dim(v.size(), s.dim);
  return accepts_tuple(semilinear_automaton(s), v);
}

enum class Decision { Proven, Refuted, VerifiedUpTo };

inline std::string to_string(Decision d) {
  switch (d) {
    case Decision::Proven: return "Proven";
    case Decision::Refuted: return "Refuted";
    case Decision::VerifiedUpTo: return "VerifiedUpTo";
  }
  return "?";
}

struct SetVerdict {
  Decision decision = Decision::Proven;
  std::optional<Vector> witness;  // in the left set, not in the right one
};

inline SetVerdict slset_subset(const SemilinearSet& a, const SemilinearSet& b) {
  require_same_dim(a.dim, b.dim);
  auto diff = product(semilinear_automaton(a), complement(semilinear_automaton(b)));
  auto w = shortest_member(diff);
  if (!w) return {Decision::Proven, std::nullopt};
  return {Decision::Refuted, w};
}

inline SetVerdict slset_equal(const SemilinearSet& a, const SemilinearSet& b) {
  auto ab = slset_subset(a, b);
  if (ab.decision == Decision::Refuted) return ab;
  return slset_subset(b, a);
}

/// Proven when empty; otherwise Refuted with a member as witness.
inline SetVerdict slset_empty(const SemilinearSet& s) {
  auto w = shortest_member(semilinear_automaton(s));
  if (!w) return {Decision::Proven, std::nullopt};
  return {Decision::Refuted, w};
}

/// Calls f on every v ∈ ℕ^k with Σ v_i·weight_i ≤ limit, ordered by total
/// sum, then lexicographically. Stops early when f returns false.
inline void for_each_vector(std::size_t k, const std::vector<std::size_t>& weight, std::size_t limit,
                            const std::function<bool(const Vector&)>& f) {
  std::size_t wmin = weight.empty() ? 1 : *std::min_element(weight.begin(), weight.end());
  std::size_t max_sum = wmin == 0 ? limit : limit / wmin;
  Vector v(k, 0);
  bool stop = false;
  std::function<void(std::size_t, std::int64_t, std::size_t)> rec = [&](std::size_t i, std::int64_t left, std::size_t cost) {
    if (stop) return;
    if (i + 1 == k) {
      v[i] = left;
      if (cost + static_cast<std::size_t>(left) * weight[i] <= limit && !f(v)) stop = true;
      return;
    }
    for (std::int64_t x = 0; x <= left && !stop; ++x) {
      std::size_t c = cost + static_cast<std::size_t>(x) * weight[i];
      if (c > limit) break;
      v[i] = x;
      rec(i + 1, left - x, c);
    }
    v[i] = 0;
  };
  for (std::size_t s = 0; s <= max_sum && !stop; ++s) {
    if (k == 0) {
      if (s == 0) f(v);
      break;
    }
    rec(0, static_cast<std::int64_t>(s), 0);
  }
}

/// Whether some exponent tuple ℓ with φ(ℓ) = w lies in S.
inline bool bounded_word_member(const Word& w, const GinsburgShape& shape, const SemilinearSet& s) {
  require_same_dim(shape.dim(), s.dim);
  const std::size_t k = shape.dim(), n = w.size();
  auto matches = [&](std::size_t i, std::size_t pos) {
    const Word& u = shape.words[i];
    return pos + u.size() <= n && std::equal(u.begin(), u.end(), w.begin() + static_cast<std::ptrdiff_t>(pos));
  };
  // completable[i][pos]: the suffix from pos factors as u_i^* ... u_k^*
  std::vector<std::vector<char>> completable(k + 1, std::vector<char>(n + 1, 0));
  completable[k][n] = 1;
  for (std::size_t i = k; i-- > 0;)
    for (std::size_t pos = n + 1; pos-- > 0;) {
      bool ok = completable[i + 1][pos];
      if (!ok && matches(i, pos)) ok = completable[i][pos + shape.words[i].size()];
      completable[i][pos] = ok;
    }
  if (!completable[0][0]) return false;
  auto automaton = semilinear_automaton(s);
  Vector ell(k, 0);
  std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t pos) -> bool {
    if (i == k) return pos == n && accepts_tuple(automaton, ell);
    std::size_t p = pos;
    for (std::int64_t e = 0;; ++e) {
      if (!completable[i][p]) break;
      ell[i] = e;
      if (completable[i + 1][p] && go(i + 1, p)) return true;
      if (!matches(i, p)) break;
      p += shape.words[i].size();
    }
    ell[i] = 0;
    return false;
  };
  return go(0, 0);
}

struct BoundedVerdict {
  Decision decision = Decision::Proven;
  std::optional<Word> witness;
  std::size_t checked_up_to = 0;
};

/// φ1(S1) ⊆ φ2(S2)? Proven by set inclusion when the shapes coincide;
/// otherwise every φ1(v), v ∈ S1, of length ≤ n is tested against (φ2, S2).
inline BoundedVerdict bounded_lang_subset(const GinsburgShape& shape1, const SemilinearSet& s1,
                                          const GinsburgShape& shape2, const SemilinearSet& s2, std::size_t n) {
  require_same_dim(shape1.dim(), s1.dim);
  require_same_dim(shape2.dim(), s2.dim);
  if (shape1 == shape2 && slset_subset(s1, s2).decision == Decision::Proven) return {Decision::Proven, std::nullopt, 0};
  auto a1 = semilinear_automaton(s1);
  std::vector<std::size_t> weight;
  for (const auto& u : shape1.words) weight.push_back(u.size());
  BoundedVerdict verdict{Decision::VerifiedUpTo, std::nullopt, n};
  for_each_vector(shape1.dim(), weight, n, [&](const Vector& v) {
    if (!accepts_tuple(a1, v)) return true;
    Word w = ginsburg_apply(shape1, v);
    if (bounded_word_member(w, shape2, s2)) return true;
    verdict = {Decision::Refuted, w, n};
    return false;
  });
  return verdict;
}

// ---------------------------------------------------------------------------
// Synthesis

/// Grammar for φ(L):
///   S -> Y e          Y -> Y fj         Y -> X1 ... Xk
///   Xi e -> ui^b0i    Xi fj -> ui^bji Xi
/// Every derivation applies Y -> X1..Xk exactly once.
inline IndexedGrammar linear_to_grammar(const GinsburgShape& shape, const LinearSet& l) {
  require_same_dim(shape.dim(), l.dim);
  std::vector<Symbol> terminals;
  for (const auto& u : shape.words)
    for (const auto& a : u)
      if (std::find(terminals.begin(), terminals.end(), a) == terminals.end()) terminals.push_back(a);
  NameAllocator names(terminals);
  IndexedGrammar g;
  g.name = "linear";
  g.terminals = terminals;
  g.start = names.fresh("S");
  Symbol y = names.fresh("Y");
  std::vector<Symbol> x;
  for (std::size_t i = 0; i < shape.dim(); ++i) x.push_back(names.fresh("X" + std::to_string(i + 1)));
  Symbol e = names.fresh("e");
  std::vector<Symbol> f;
  for (std::size_t j = 0; j < l.periods.size(); ++j) f.push_back(names.fresh("f" + std::to_string(j + 1)));
  g.variables = {g.start, y};
  g.variables.insert(g.variables.end(), x.begin(), x.end());
  g.indices = {e};
  g.indices.insert(g.indices.end(), f.begin(), f.end());

  auto power = [&](std::size_t i, std::int64_t r) {
    Word w;
    for (std::int64_t t = 0; t < r; ++t) w.insert(w.end(), shape.words[i].begin(), shape.words[i].end());
    return w;
  };
  g.productions.push_back(Production::push(g.start, y, e));
  for (const auto& fj : f) g.productions.push_back(Production::push(y, y, fj));
  g.productions.push_back(Production::plain(y, x));
  for (std::size_t i = 0; i < x.size(); ++i) {
    g.productions.push_back(Production::consume(x[i], e, power(i, l.base[i])));
    for (std::size_t j = 0; j < f.size(); ++j) {
      Word body = power(i, l.periods[j][i]);
      body.push_back(x[i]);
      g.productions.push_back(Production::consume(x[i], f[j], body));
    }
  }
  return g;
}

/// Union of the component grammars under a fresh start; the empty set gives a
/// grammar whose start has no productions.
inline IndexedGrammar semilinear_to_grammar(const GinsburgShape& shape, const SemilinearSet& s) {
  require_same_dim(shape.dim(), s.dim);
  if (s.components.empty()) {
    IndexedGrammar g;
    g.name = "empty";
    for (const auto& u : shape.words)
      for (const auto& a : u)
        if (!g.is_terminal(a)) g.terminals.push_back(a);
    NameAllocator names(g.terminals);
    g.start = names.fresh("S");
    g.variables = {g.start};
    return g;
  }
  if (s.components.size() == 1) return linear_to_grammar(shape, s.components[0]);
  NameAllocator names;
  for (const auto& u : shape.words) names.reserve_all(u);
  IndexedGrammar out;
  out.name = "semilinear";
  out.start = names.fresh("S");
  out.variables = {out.start};
  for (std::size_t c = 0; c < s.components.size(); ++c) {
    IndexedGrammar g = linear_to_grammar(shape, s.components[c]);
    std::string suffix = "#" + std::to_string(c + 1);
    std::map<Symbol, Symbol> vars, idx;
    for (const auto& v : g.variables) vars[v] = names.fresh(v + suffix);
    for (const auto& f : g.indices) idx[f] = names.fresh(f + suffix);
    auto r = [](const std::map<Symbol, Symbol>& m, const Symbol& x) {
      auto it = m.find(x);
      return it == m.end() ? x : it->second;
    };
    for (const auto& v : g.variables) out.variables.push_back(vars[v]);
    for (const auto& f : g.indices) out.indices.push_back(idx[f]);
    for (const auto& t : g.terminals)
      if (!out.is_terminal(t)) out.terminals.push_back(t);
    out.productions.push_back(Production::plain(out.start, {vars[g.start]}));
    for (auto p : g.productions) {
      p.lhs = r(vars, p.lhs);
      if (!p.lhs_index.empty()) p.lhs_index = r(idx, p.lhs_index);
      if (!p.push_index.empty()) p.push_index = r(idx, p.push_index);
      for (auto& x : p.rhs) x = r(vars, x);
      out.productions.push_back(std::move(p));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

struct SemilinearFile {
  SemilinearSet set;
  std::optional<GinsburgShape> shape;
};

namespace detail {

inline Vector parse_vector(const std::string& text) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')') throw Error("expected a vector '(x,y,...)', got '" + t + "'");
  Vector v;
  std::string inner = t.substr(1, t.size() - 2);
  if (trim(inner).empty()) return v;
  for (auto& part : split_list(inner)) {
    if (part.empty()) throw Error("empty vector entry in '" + t + "'");
    std::size_t used = 0;
    long long x = 0;
    try {
      x = std::stoll(part, &used);
    } catch (const std::exception&) {
      throw Error("bad vector entry '" + part + "'");
    }
    if (used != part.size()) throw Error("bad vector entry '" + part + "'");
    v.push_back(x);
  }
  return v;
}

/// Splits "(1,2),(3,4)" into vectors.
inline std::vector<Vector> parse_vector_list(const std::string& text) {
  std::vector<Vector> out;
  std::size_t i = 0;
  while (i < text.size()) {
    auto open = text.find('(', i);
    if (open == std::string::npos) {
      if (!trim(text.substr(i)).empty() && trim(text.substr(i)) != ",") throw Error("unexpected '" + trim(text.substr(i)) + "'");
      break;
    }
    std::string gap = trim(text.substr(i, open - i));
    if (!gap.empty() && gap != ",") throw Error("unexpected '" + gap + "' between vectors");
    auto close = text.find(')', open);
    if (close == std::string::npos) throw Error("unterminated vector");
    out.push_back(parse_vector(text.substr(open, close - open + 1)));
    i = close + 1;
  }
  return out;
}

}  // namespace detail

inline GinsburgShape parse_shape(const std::string& list) {
  std::vector<Word> words;
  for (auto& part : detail::split_list(list)) words.push_back(parse_word(part));
  return GinsburgShape(std::move(words));
}

inline SemilinearFile parse_semilinear(const std::string& text) {
  SemilinearFile f;
  std::optional<std::size_t> dim;
  std::vector<LinearSet> comps;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) { throw Error("line " + std::to_string(lineno) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string t = detail::trim(detail::strip_comment(raw));
    if (t.empty()) continue;
    auto colon = t.find(':');
    if (colon == std::string::npos) fail("expected 'key: value'");
    std::string key = detail::trim(t.substr(0, colon));
    std::string rest = t.substr(colon + 1);
    try {
      if (key == "dim") {
        if (dim) fail("duplicate 'dim:'");
        dim = static_cast<std::size_t>(std::stoul(detail::trim(rest)));
      } else if (key == "linear") {
        Vector base;
        std::vector<Vector> periods;
        bool have_base = false;
        for (auto& part : detail::split_list(rest, ';')) {
          if (part.empty()) continue;
          auto eq = part.find('=');
          if (eq == std::string::npos) fail("expected 'base = (...)' or 'periods = (...)'");
          std::string k = detail::trim(part.substr(0, eq));
          std::string v = part.substr(eq + 1);
          if (k == "base") {
            base = detail::parse_vector(v);
            have_base = true;
          } else if (k == "periods") {
            periods = detail::parse_vector_list(v);
          } else {
            fail("unknown field '" + k + "'");
          }
        }
        if (!have_base) fail("linear set without base");
        if (dim && base.size() != *dim) throw DimensionMismatch("line " + std::to_string(lineno) + ": base has dimension " + std::to_string(base.size()) + ", expected " + std::to_string(*dim));
        comps.emplace_back(std::move(base), std::move(periods));
      } else if (key == "shape") {
        if (f.shape) fail("duplicate 'shape:'");
        f.shape = parse_shape(rest);
      } else {
        fail("unknown key '" + key + "'");
      }
    } catch (const DimensionMismatch&) {
      throw;
    } catch (const std::invalid_argument&) {
      fail("expected a number");
    }
  }
  if (!dim) {
    if (comps.empty()) throw Error("missing 'dim:' line");
    dim = comps.front().dim;
  }
  f.set = SemilinearSet(*dim, std::move(comps));
  if (f.shape && f.shape->dim() != *dim) throw DimensionMismatch("shape has " + std::to_string(f.shape->dim()) + " words, set has dimension " + std::to_string(*dim));
  return f;
}

inline std::string serialize_semilinear(const SemilinearSet& s, const std::optional<GinsburgShape>& shape = std::nullopt) {
  std::ostringstream out;
  out << "dim: " << s.dim << "\n";
  for (const auto& l : s.components) {
    out << "linear: base = " << format_vector(l.base);
    if (!l.periods.empty()) {
      out << "; periods = ";
      for (std::size_t i = 0; i < l.periods.size(); ++i) out << (i ? ", " : "") << format_vector(l.periods[i]);
    }
    out << "\n";
  }
  if (shape) {
    std::vector<std::string> parts;
    for (const auto& u : shape->words) parts.push_back(format_word(u));
    out << "shape: " << join(parts, ", ") << "\n";
  }
  return out.str();
}

}  // namespace idxgram
