#pragma once

/// Indexed grammars: the data model, validation and one-step derivation.
///
/// A production has one of three shapes
///   Plain    A -> ν        every variable in ν inherits A's stack
///   Push     A -> B f      B receives A's stack with f pushed on top
///   Consume  A f -> ν      f is popped; every variable in ν inherits the rest
/// Stacks are written top-first.

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "idxgram/common.hpp"

namespace idxgram {

enum class ProductionKind { Plain, Push, Consume };

struct Production {
  Symbol lhs;
  Symbol lhs_index;  // empty unless kind == Consume
  ProductionKind kind = ProductionKind::Plain;
  std::vector<Symbol> rhs;  // for Push: exactly {B}
  Symbol push_index;        // only for Push

  static Production plain(Symbol a, std::vector<Symbol> body) {
    return {std::move(a), {}, ProductionKind::Plain, std::move(body), {}};
  }
  static Production push(Symbol a, Symbol b, Symbol f) {
    return {std::move(a), {}, ProductionKind::Push, {std::move(b)}, std::move(f)};
  }
  static Production consume(Symbol a, Symbol f, std::vector<Symbol> body) {
    return {std::move(a), std::move(f), ProductionKind::Consume, std::move(body), {}};
  }

  friend bool operator==(const Production&, const Production&) = default;
};

/// The 5-tuple (V, T, I, P, S). `name` is metadata and does not take part in equality.
struct IndexedGrammar {
  std::string name = "g";
  std::vector<Symbol> variables;
  std::vector<Symbol> terminals;
  std::vector<Symbol> indices;
  std::vector<Production> productions;
  Symbol start;

  bool is_variable(const Symbol& s) const {
    return std::find(variables.begin(), variables.end(), s) != variables.end();
  }
  bool is_terminal(const Symbol& s) const {
    return std::find(terminals.begin(), terminals.end(), s) != terminals.end();
  }
  bool is_index(const Symbol& s) const {
    return std::find(indices.begin(), indices.end(), s) != indices.end();
  }

  friend bool operator==(const IndexedGrammar& a, const IndexedGrammar& b) {
    auto as_set = [](const std::vector<Symbol>& v) { return std::set<Symbol>(v.begin(), v.end()); };
    return as_set(a.variables) == as_set(b.variables) && as_set(a.terminals) == as_set(b.terminals) &&
           as_set(a.indices) == as_set(b.indices) && a.productions == b.productions &&
           a.start == b.start;
  }
};

/// Fast membership lookups for a grammar's alphabets.
class SymbolTable {
public:
  explicit SymbolTable(const IndexedGrammar& g)
      : vars_(g.variables.begin(), g.variables.end()),
        terms_(g.terminals.begin(), g.terminals.end()),
        idx_(g.indices.begin(), g.indices.end()) {}

  bool variable(const Symbol& s) const { return vars_.count(s) != 0; }
  bool terminal(const Symbol& s) const { return terms_.count(s) != 0; }
  bool index(const Symbol& s) const { return idx_.count(s) != 0; }

private:
  std::unordered_set<Symbol> vars_, terms_, idx_;
};

inline std::size_t variable_occurrences(const SymbolTable& t, const Production& p) {
  if (p.kind == ProductionKind::Push) return 1;
  return static_cast<std::size_t>(
      std::count_if(p.rhs.begin(), p.rhs.end(), [&](const Symbol& s) { return t.variable(s); }));
}

/// Special iff the right-hand side holds at least two variable occurrences.
inline bool is_special(const IndexedGrammar& g, const Production& p) {
  return variable_occurrences(SymbolTable(g), p) >= 2;
}

inline std::size_t special_production_count(const IndexedGrammar& g) {
  SymbolTable t(g);
  return static_cast<std::size_t>(std::count_if(
      g.productions.begin(), g.productions.end(),
      [&](const Production& p) { return variable_occurrences(t, p) >= 2; }));
}

struct Violation {
  std::string location;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Reports every alphabet/form violation; an empty result means the grammar is valid.
inline std::vector<Violation> validate(const IndexedGrammar& g) {
  std::vector<Violation> out;
  auto check_names = [&](const std::vector<Symbol>& names, const char* what) {
    std::set<Symbol> seen;
    for (const auto& s : names) {
      if (!valid_symbol_name(s)) out.push_back({what, "invalid symbol name '" + s + "'"});
      if (!seen.insert(s).second) out.push_back({what, "duplicate symbol '" + s + "'"});
    }
  };
  check_names(g.variables, "variables");
  check_names(g.terminals, "terminals");
  check_names(g.indices, "indices");

  SymbolTable t(g);
  auto overlap = [&](const std::vector<Symbol>& a, auto&& in_b, const std::string& what) {
    for (const auto& s : a) {
      if (in_b(s)) out.push_back({what, "alphabets not disjoint: '" + s + "'"});
    }
  };
  overlap(g.variables, [&](const Symbol& s) { return t.terminal(s); }, "variables/terminals");
  overlap(g.variables, [&](const Symbol& s) { return t.index(s); }, "variables/indices");
  overlap(g.terminals, [&](const Symbol& s) { return t.index(s); }, "terminals/indices");

  if (!t.variable(g.start)) out.push_back({"start", "start symbol '" + g.start + "' is not a variable"});

  for (std::size_t i = 0; i < g.productions.size(); ++i) {
    const auto& p = g.productions[i];
    std::string loc = "production " + std::to_string(i);
    if (!t.variable(p.lhs)) out.push_back({loc, "lhs '" + p.lhs + "' is not a variable"});
    switch (p.kind) {
      case ProductionKind::Push:
        if (!p.lhs_index.empty()) out.push_back({loc, "push production may not consume an index"});
        if (p.rhs.size() != 1) {
          out.push_back({loc, "push body must be exactly one variable"});
        } else if (!t.variable(p.rhs[0])) {
          out.push_back({loc, "push target '" + p.rhs[0] + "' is not a variable"});
        }
        if (!t.index(p.push_index)) out.push_back({loc, "pushed symbol not an index: '" + p.push_index + "'"});
        break;
      case ProductionKind::Consume:
        if (!t.index(p.lhs_index)) out.push_back({loc, "consumed symbol not an index: '" + p.lhs_index + "'"});
        [[fallthrough]];
      case ProductionKind::Plain:
        if (p.kind == ProductionKind::Plain && !p.lhs_index.empty())
          out.push_back({loc, "plain production may not consume an index"});
        if (!p.push_index.empty()) out.push_back({loc, "only push productions push an index"});
        for (const auto& s : p.rhs) {
          if (!t.variable(s) && !t.terminal(s))
            out.push_back({loc, "rhs symbol '" + s + "' is neither a variable nor a terminal"});
        }
        break;
    }
  }
  return out;
}

/// Thrown by load helpers when a grammar fails validation.
class InvalidGrammar : public Error {
public:
  explicit InvalidGrammar(std::vector<Violation> v)
      : Error(describe(v)), violations(std::move(v)) {}
  std::vector<Violation> violations;

private:
  static std::string describe(const std::vector<Violation>& v) {
    std::string s = "invalid grammar";
    for (const auto& x : v) s += "; " + x.location + ": " + x.message;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Sentential forms

struct Item {
  bool is_variable = false;
  Symbol symbol;
  std::vector<Symbol> stack;  // top-first, empty for terminals

  static Item terminal(Symbol a) { return {false, std::move(a), {}}; }
  static Item variable(Symbol a, std::vector<Symbol> stack = {}) {
    return {true, std::move(a), std::move(stack)};
  }
  friend bool operator==(const Item&, const Item&) = default;
};

struct SententialForm {
  std::vector<Item> items;

  std::size_t width() const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [](const Item& i) { return i.is_variable; }));
  }
  bool is_terminal() const { return width() == 0; }
  Word yield() const {
    Word w;
    for (const auto& i : items) {
      if (!i.is_variable) w.push_back(i.symbol);
    }
    return w;
  }
  static SententialForm start(const IndexedGrammar& g) { return {{Item::variable(g.start)}}; }

  friend bool operator==(const SententialForm&, const SententialForm&) = default;
};

/// `a X1[f,e] b`; variables with an empty stack print bare.
inline std::string format_form(const SententialForm& f) {
  if (f.items.empty()) return "_";
  std::string out;
  for (std::size_t i = 0; i < f.items.size(); ++i) {
    if (i > 0) out += ' ';
    const auto& it = f.items[i];
    out += it.symbol;
    if (it.is_variable && !it.stack.empty()) out += "[" + join(it.stack, ",") + "]";
  }
  return out;
}

enum class ApplyErrorCode { PositionNotVariable, LhsMismatch, EmptyStackOnConsume, TopIndexMismatch };

class ApplyError : public Error {
public:
  ApplyError(ApplyErrorCode c, const std::string& what) : Error(what), code(c) {}
  ApplyErrorCode code;
};

/// Rewrites the variable at item position `pos` with production `p`.
inline SententialForm apply_production(const IndexedGrammar& g, const SententialForm& form,
                                       std::size_t pos, const Production& p) {
  if (pos >= form.items.size() || !form.items[pos].is_variable)
    throw ApplyError(ApplyErrorCode::PositionNotVariable,
                     "position " + std::to_string(pos) + " does not hold a variable");
  const Item& target = form.items[pos];
  if (target.symbol != p.lhs)
    throw ApplyError(ApplyErrorCode::LhsMismatch,
                     "production lhs '" + p.lhs + "' does not match '" + target.symbol + "'");

  std::vector<Symbol> inherited = target.stack;
  std::vector<Item> replacement;
  switch (p.kind) {
    case ProductionKind::Push: {
      std::vector<Symbol> st;
      st.reserve(inherited.size() + 1);
      st.push_back(p.push_index);
      st.insert(st.end(), inherited.begin(), inherited.end());
      replacement.push_back(Item::variable(p.rhs.at(0), std::move(st)));
      break;
    }
    case ProductionKind::Consume:
      if (inherited.empty())
        throw ApplyError(ApplyErrorCode::EmptyStackOnConsume,
                         "variable '" + target.symbol + "' has an empty stack");
      if (inherited.front() != p.lhs_index)
        throw ApplyError(ApplyErrorCode::TopIndexMismatch,
                         "top index '" + inherited.front() + "' is not '" + p.lhs_index + "'");
      inherited.erase(inherited.begin());
      [[fallthrough]];
    case ProductionKind::Plain: {
      SymbolTable t(g);
      for (const auto& s : p.rhs) {
        replacement.push_back(t.variable(s) ? Item::variable(s, inherited) : Item::terminal(s));
      }
      break;
    }
  }

  SententialForm out;
  out.items.reserve(form.items.size() + replacement.size());
  out.items.insert(out.items.end(), form.items.begin(), form.items.begin() + static_cast<std::ptrdiff_t>(pos));
  out.items.insert(out.items.end(), replacement.begin(), replacement.end());
  out.items.insert(out.items.end(), form.items.begin() + static_cast<std::ptrdiff_t>(pos) + 1, form.items.end());
  return out;
}

inline bool applicable(const Item& it, const Production& p) {
  if (!it.is_variable || it.symbol != p.lhs) return false;
  if (p.kind != ProductionKind::Consume) return true;
  return !it.stack.empty() && it.stack.front() == p.lhs_index;
}

struct Successor {
  std::size_t position;
  std::size_t production;
  SententialForm form;
};

/// All one-step derivatives, ordered by position, then production list order.
inline std::vector<Successor> successors(const IndexedGrammar& g, const SententialForm& form) {
  std::vector<Successor> out;
  for (std::size_t pos = 0; pos < form.items.size(); ++pos) {
    if (!form.items[pos].is_variable) continue;
    for (std::size_t pi = 0; pi < g.productions.size(); ++pi) {
      if (applicable(form.items[pos], g.productions[pi]))
        out.push_back({pos, pi, apply_production(g, form, pos, g.productions[pi])});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivations

struct DerivationStep {
  std::size_t production;
  std::size_t position;
  SententialForm form;  // the form after the step
  friend bool operator==(const DerivationStep&, const DerivationStep&) = default;
};

struct Derivation {
  SententialForm initial;
  std::vector<DerivationStep> steps;

  const SententialForm& last() const { return steps.empty() ? initial : steps.back().form; }

  /// Largest width over all forms, the initial one included.
  std::size_t index() const {
    std::size_t k = initial.width();
    for (const auto& s : steps) k = std::max(k, s.form.width());
    return k;
  }

  std::size_t special_count(const IndexedGrammar& g) const {
    SymbolTable t(g);
    return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [&](const DerivationStep& s) {
      return variable_occurrences(t, g.productions.at(s.production)) >= 2;
    }));
  }
};

/// Re-applies every step and checks it reproduces the recorded forms.
inline bool replay(const IndexedGrammar& g, const Derivation& d) {
  SententialForm cur = d.initial;
  for (const auto& s : d.steps) {
    if (s.production >= g.productions.size()) return false;
    try {
      cur = apply_production(g, cur, s.position, g.productions[s.production]);
    } catch (const ApplyError&) {
      return false;
    }
    if (!(cur == s.form)) return false;
  }
  return true;
}

/// One line per step: `<production-id> @ <position> | <form>`; the first line is the initial form.
inline std::string format_trace(const Derivation& d) {
  std::string out = "- @ - | " + format_form(d.initial) + "\n";
  for (const auto& s : d.steps) {
    out += std::to_string(s.production) + " @ " + std::to_string(s.position) + " | " + format_form(s.form) + "\n";
  }
  return out;
}

}  // namespace idxgram
