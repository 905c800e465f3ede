#pragma once

/// Budgeted exploration of the derivation relation.
///
/// Sibling variables in a sentential form derive independently, so three
/// rewriting disciplines are used:
///   Leftmost     always rewrite the leftmost variable. Generates exactly L(G);
///                step count, stack depths and special-production counts of a
///                derivation do not depend on the order of rewriting.
///   DepthFirst   finish the subtree of one child before starting a sibling.
///                Among all orders of a fixed derivation tree these reach the
///                minimum width, so index bounds are searched this way.
///   AllPositions every variable may be rewritten. Used to look for wide forms.
///
/// Pruning is always sound: a form is dropped only when the terminal count plus
/// a lower bound on what its variables still have to produce exceeds the
/// yield bound, or when a declared cap (width, stack) is exceeded; cap pruning
/// is recorded so callers know whether absence means refutation.

#include <chrono>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>

#include "idxgram/grammar.hpp"

namespace idxgram {

struct Budget {
  std::size_t max_steps = 64;
  std::optional<std::size_t> max_width;
  std::optional<std::size_t> max_stack;
  std::optional<std::size_t> max_yield;
  std::size_t frontier_cap = 1'000'000;
};

enum class Status { Proven, Refuted, Unknown };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Proven: return "Proven";
    case Status::Refuted: return "Refuted";
    case Status::Unknown: return "Unknown";
  }
  return "?";
}

/// What limited a search. `exhausted()` means no form was cut by the step bound.
struct SearchFlags {
  bool step_cap_hit = false;
  bool width_cap_hit = false;
  bool stack_cap_hit = false;
  std::size_t forms = 0;

  bool exhausted() const { return !step_cap_hit; }
  bool caps_hit() const { return width_cap_hit || stack_cap_hit; }
  void merge(const SearchFlags& o) {
    step_cap_hit |= o.step_cap_hit;
    width_cap_hit |= o.width_cap_hit;
    stack_cap_hit |= o.stack_cap_hit;
    forms += o.forms;
  }
};

struct Verdict {
  Status status = Status::Unknown;
  std::optional<Derivation> witness;
  SearchFlags flags;
  std::string note;
};

struct Enumeration {
  std::vector<Word> words;  // length-lexicographic
  SearchFlags flags;
  bool exhausted() const { return flags.exhausted(); }
};

struct MeasureResult {
  Status status = Status::Unknown;  // Proven: value is exact
  std::size_t value = 0;
  std::optional<Derivation> witness;
  SearchFlags flags;
};

class NotAMember : public Error {
public:
  using Error::Error;
};

namespace detail {

using Form = std::vector<std::int32_t>;

struct FormHash {
  std::size_t operator()(const Form& f) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : f) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max() / 4;

inline std::uint32_t sat_add(std::uint32_t a, std::uint32_t b) { return std::min(kInf, a + b); }

/// Integer-coded grammar. Forms are flat vectors: a terminal is its id (>= 0);
/// a variable is `-(id+1), tag, depth, idx_1 .. idx_depth` with the stack top-first.
class CompiledGrammar {
public:
  struct Prod {
    std::int32_t lhs;
    std::int32_t lhs_index;  // -1 unless Consume
    ProductionKind kind;
    std::vector<std::int32_t> body;  // terminals >= 0, variables -(id+1)
    std::int32_t push_var = -1;
    std::int32_t push_index = -1;
    std::uint32_t vars = 0;
    std::uint32_t terms = 0;
    bool special = false;
  };

  /// `deep_states` bounds the stack-prefix table behind stack_lower_bound().
  explicit CompiledGrammar(const IndexedGrammar& g, std::size_t deep_states = kDeepStates) : source_(&g) {
    for (const auto& v : g.variables) var_id_.emplace(v, static_cast<std::int32_t>(var_id_.size()));
    for (const auto& t : g.terminals) term_id_.emplace(t, static_cast<std::int32_t>(term_id_.size()));
    for (const auto& i : g.indices) index_id_.emplace(i, static_cast<std::int32_t>(index_id_.size()));
    nv_ = static_cast<std::int32_t>(g.variables.size());
    ni_ = static_cast<std::int32_t>(g.indices.size());
    by_lhs_.resize(static_cast<std::size_t>(nv_));
    for (std::size_t i = 0; i < g.productions.size(); ++i) {
      const auto& p = g.productions[i];
      Prod c;
      c.lhs = var_id_.at(p.lhs);
      c.kind = p.kind;
      c.lhs_index = p.kind == ProductionKind::Consume ? index_id_.at(p.lhs_index) : -1;
      if (p.kind == ProductionKind::Push) {
        c.push_var = var_id_.at(p.rhs.at(0));
        c.push_index = index_id_.at(p.push_index);
        c.vars = 1;
      } else {
        for (const auto& s : p.rhs) {
          if (auto it = var_id_.find(s); it != var_id_.end()) {
            c.body.push_back(-(it->second + 1));
            ++c.vars;
          } else {
            c.body.push_back(term_id_.at(s));
            ++c.terms;
          }
        }
      }
      c.special = c.vars >= 2;
      prods_.push_back(std::move(c));
      by_lhs_[static_cast<std::size_t>(prods_.back().lhs)].push_back(static_cast<std::int32_t>(i));
    }
    compute_lower_bounds();
    compute_deep_bounds(deep_states);
  }

  static constexpr std::size_t kDeepStates = 4096;
  static constexpr std::size_t kDeepStatesLarge = 1 << 18;

  const IndexedGrammar& source() const { return *source_; }
  std::int32_t variable_count() const { return nv_; }
  std::int32_t index_count() const { return ni_; }
  const std::vector<Prod>& prods() const { return prods_; }
  const std::vector<std::int32_t>& by_lhs(std::int32_t v) const { return by_lhs_[static_cast<std::size_t>(v)]; }
  std::int32_t start() const { return var_id_.at(source_->start); }

  std::optional<std::int32_t> terminal(const Symbol& s) const {
    auto it = term_id_.find(s);
    if (it == term_id_.end()) return std::nullopt;
    return it->second;
  }

  /// Lower bound on the yield length of variable v whose stack top is `top`
  /// (-1 for an empty stack); kInf when no terminal word can be derived.
  std::uint32_t lower_bound(std::int32_t v, std::int32_t top) const {
    return min_yield_[static_cast<std::size_t>(v) * static_cast<std::size_t>(ni_ + 1) +
                      static_cast<std::size_t>(top < 0 ? ni_ : top)];
  }

  /// Lower bound for variable v carrying the full stack `stack[0..depth)`
  /// (top first). Refines lower_bound() by looking at a longer stack prefix.
  std::uint32_t stack_lower_bound(std::int32_t v, const std::int32_t* stack, std::size_t depth) const {
    std::uint32_t base = lower_bound(v, depth ? stack[0] : -1);
    if (deep_d_ == 0 || base >= kInf) return base;
    const std::size_t len = std::min(depth, deep_d_);
    Form& key = scratch_;
    key.assign({v, depth <= deep_d_ ? 1 : 0});
    key.insert(key.end(), stack, stack + len);
    auto it = deep_.find(key);
    if (it == deep_.end() && key[1] == 1) {
      key[1] = 0;
      it = deep_.find(key);
    }
    if (it == deep_.end()) return base;
    return std::max(base, deep_value_[static_cast<std::size_t>(it->second)]);
  }

  Form initial_form() const { return {-(start() + 1), 0, 0}; }

  SententialForm decode(const Form& f) const {
    SententialForm out;
    for (std::size_t i = 0; i < f.size();) {
      if (f[i] >= 0) {
        out.items.push_back(Item::terminal(source_->terminals[static_cast<std::size_t>(f[i])]));
        ++i;
        continue;
      }
      Item it = Item::variable(source_->variables[static_cast<std::size_t>(-f[i] - 1)]);
      auto depth = static_cast<std::size_t>(f[i + 2]);
      for (std::size_t d = 0; d < depth; ++d) it.stack.push_back(source_->indices[static_cast<std::size_t>(f[i + 3 + d])]);
      out.items.push_back(std::move(it));
      i += 3 + depth;
    }
    return out;
  }

  Form encode(const SententialForm& s) const {
    Form f;
    for (const auto& it : s.items) {
      if (!it.is_variable) {
        f.push_back(term_id_.at(it.symbol));
        continue;
      }
      f.push_back(-(var_id_.at(it.symbol) + 1));
      f.push_back(0);
      f.push_back(static_cast<std::int32_t>(it.stack.size()));
      for (const auto& x : it.stack) f.push_back(index_id_.at(x));
    }
    return f;
  }

private:
  // Least fixpoint of min-yield over the abstraction (variable, stack top).
  // Every concrete derivation maps to an abstract one, so values are lower bounds.
  void compute_lower_bounds() {
    const auto tops = static_cast<std::size_t>(ni_ + 1);
    min_yield_.assign(static_cast<std::size_t>(nv_) * tops, kInf);
    auto at = [&](std::int32_t v, std::size_t t) -> std::uint32_t& {
      return min_yield_[static_cast<std::size_t>(v) * tops + t];
    };
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& p : prods_) {
        for (std::size_t t = 0; t < tops; ++t) {
          std::uint32_t val = kInf;
          switch (p.kind) {
            case ProductionKind::Push:
              val = at(p.push_var, static_cast<std::size_t>(p.push_index));
              break;
            case ProductionKind::Plain: {
              val = p.terms;
              for (auto s : p.body)
                if (s < 0) val = sat_add(val, at(-s - 1, t));
              break;
            }
            case ProductionKind::Consume: {
              if (static_cast<std::size_t>(p.lhs_index) != t) continue;
              std::uint32_t best = kInf;
              for (std::size_t t2 = 0; t2 < tops; ++t2) {
                std::uint32_t sum = 0;
                for (auto s : p.body)
                  if (s < 0) sum = sat_add(sum, at(-s - 1, t2));
                best = std::min(best, sum);
              }
              val = sat_add(p.terms, best);
              break;
            }
          }
          if (val < at(p.lhs, t)) {
            at(p.lhs, t) = val;
            changed = true;
          }
        }
      }
    }
  }

  // Same fixpoint over (variable, top-d stack prefix, prefix is the whole
  // stack), restricted to abstract states reachable from the start. A
  // truncated prefix stands for every stack extending it, so values stay
  // lower bounds. d grows while the reachable set stays small.
  void compute_deep_bounds(std::size_t max_states) {
    constexpr std::size_t kMaxDepth = 16;
    for (std::size_t d = 2; d <= kMaxDepth; ++d) {
      if (!build_deep(d, max_states)) break;
    }
  }

  bool build_deep(std::size_t d, std::size_t max_states) {
    struct Rule {
      std::uint32_t terms;
      std::vector<std::int32_t> children;
    };
    std::unordered_map<Form, std::int32_t, FormHash> ids;
    std::vector<Form> keys;
    std::vector<std::vector<Rule>> rules;
    auto intern = [&](Form k) -> std::int32_t {
      auto [it, fresh] = ids.emplace(k, static_cast<std::int32_t>(keys.size()));
      if (fresh) keys.push_back(std::move(k));
      return it->second;
    };
    auto child = [](std::int32_t var, bool complete, const std::int32_t* b, const std::int32_t* e) {
      Form k{var, complete ? 1 : 0};
      k.insert(k.end(), b, e);
      return k;
    };
    intern(Form{start(), 1});
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys.size() > max_states) return false;
      const Form key = keys[i];
      const std::int32_t v = key[0];
      const bool complete = key[1] == 1;
      const std::int32_t* pb = key.data() + 2;
      const std::int32_t* pe = key.data() + key.size();
      std::vector<Rule> rs;
      for (auto pi : by_lhs(v)) {
        const Prod& p = prods_[static_cast<std::size_t>(pi)];
        Rule r{p.terms, {}};
        switch (p.kind) {
          case ProductionKind::Plain:
            for (auto x : p.body)
              if (x < 0) r.children.push_back(intern(child(-x - 1, complete, pb, pe)));
            break;
          case ProductionKind::Consume: {
            const std::int32_t* nb = pb;
            if (pb != pe) {
              if (*pb != p.lhs_index) continue;
              nb = pb + 1;
            } else if (complete) {
              continue;
            }
            for (auto x : p.body)
              if (x < 0) r.children.push_back(intern(child(-x - 1, complete, nb, pe)));
            break;
          }
          case ProductionKind::Push: {
            Form k{p.push_var, complete ? 1 : 0, p.push_index};
            k.insert(k.end(), pb, pe);
            if (k.size() - 2 > d) {
              k.resize(d + 2);
              k[1] = 0;
            }
            r.children.push_back(intern(std::move(k)));
            break;
          }
        }
        rs.push_back(std::move(r));
      }
      rules.push_back(std::move(rs));
    }
    std::vector<std::uint32_t> value(keys.size(), kInf);
    std::vector<std::vector<std::int32_t>> parents(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
      for (const auto& r : rules[i])
        for (auto c : r.children) parents[static_cast<std::size_t>(c)].push_back(static_cast<std::int32_t>(i));
    std::deque<std::int32_t> work;
    std::vector<char> queued(keys.size(), 1);
    for (std::size_t i = 0; i < keys.size(); ++i) work.push_back(static_cast<std::int32_t>(i));
    while (!work.empty()) {
      auto i = static_cast<std::size_t>(work.front());
      work.pop_front();
      queued[i] = 0;
      std::uint32_t best = kInf;
      for (const auto& r : rules[i]) {
        std::uint32_t sum = r.terms;
        for (auto c : r.children) sum = sat_add(sum, value[static_cast<std::size_t>(c)]);
        best = std::min(best, sum);
      }
      if (best < value[i]) {
        value[i] = best;
        for (auto par : parents[i])
          if (!queued[static_cast<std::size_t>(par)]) {
            queued[static_cast<std::size_t>(par)] = 1;
            work.push_back(par);
          }
      }
    }
    deep_ = std::move(ids);
    deep_value_ = std::move(value);
    deep_d_ = d;
    return true;
  }

  const IndexedGrammar* source_;
  std::unordered_map<Symbol, std::int32_t> var_id_, term_id_, index_id_;
  std::int32_t nv_ = 0, ni_ = 0;
  std::vector<Prod> prods_;
  std::vector<std::vector<std::int32_t>> by_lhs_;
  std::vector<std::uint32_t> min_yield_;
  std::unordered_map<Form, std::int32_t, FormHash> deep_;
  std::vector<std::uint32_t> deep_value_;
  std::size_t deep_d_ = 0;
  mutable Form scratch_;
};

enum class Mode { Leftmost, DepthFirst, AllPositions };

struct FormStats {
  std::size_t width = 0;
  std::size_t max_depth = 0;
  std::size_t terminals = 0;
  std::uint32_t lower_bound = 0;
};

inline FormStats stats(const CompiledGrammar& cg, const Form& f) {
  FormStats s;
  for (std::size_t i = 0; i < f.size();) {
    if (f[i] >= 0) {
      ++s.terminals;
      ++i;
      continue;
    }
    ++s.width;
    auto depth = static_cast<std::size_t>(f[i + 2]);
    s.max_depth = std::max(s.max_depth, depth);
    s.lower_bound = sat_add(s.lower_bound, cg.stack_lower_bound(-f[i] - 1, f.data() + i + 3, depth));
    i += 3 + depth;
  }
  return s;
}

inline std::size_t item_position(const Form& f, std::size_t offset) {
  std::size_t pos = 0;
  for (std::size_t i = 0; i < offset;) {
    i += f[i] >= 0 ? 1 : 3 + static_cast<std::size_t>(f[i + 2]);
    ++pos;
  }
  return pos;
}

/// Checks the terminal segments of `f` can be embedded in `target` in order,
/// leaving at least the lower-bound length for every variable in between.
inline bool matches_target(const CompiledGrammar& cg, const Form& f, const std::vector<std::int32_t>& w) {
  // Split into terminal segments and per-gap lower bounds.
  std::vector<std::vector<std::int32_t>> segs(1);
  std::vector<std::uint32_t> gaps;
  for (std::size_t i = 0; i < f.size();) {
    if (f[i] >= 0) {
      segs.back().push_back(f[i]);
      ++i;
      continue;
    }
    auto depth = static_cast<std::size_t>(f[i + 2]);
    gaps.push_back(cg.stack_lower_bound(-f[i] - 1, f.data() + i + 3, depth));
    segs.emplace_back();
    i += 3 + depth;
  }
  const std::size_t n = w.size();
  const auto& first = segs.front();
  if (first.size() > n || !std::equal(first.begin(), first.end(), w.begin())) return false;
  if (segs.size() == 1) return first.size() == n;
  const auto& last = segs.back();
  if (last.size() > n || !std::equal(last.rbegin(), last.rend(), w.rbegin())) return false;
  std::size_t limit = n - last.size();
  std::size_t cur = first.size();
  for (std::size_t s = 1; s + 1 < segs.size(); ++s) {
    cur += gaps[s - 1];
    const auto& seg = segs[s];
    if (cur + seg.size() > limit) return false;
    if (seg.empty()) continue;
    auto it = std::search(w.begin() + static_cast<std::ptrdiff_t>(cur), w.begin() + static_cast<std::ptrdiff_t>(limit),
                          seg.begin(), seg.end());
    if (it == w.begin() + static_cast<std::ptrdiff_t>(limit)) return false;
    cur = static_cast<std::size_t>(it - w.begin()) + seg.size();
  }
  cur += gaps.back();
  return cur <= limit;
}

/// Renumbers DepthFirst tags to consecutive ranks so equivalent states coincide.
inline void canonicalize_tags(Form& f) {
  std::vector<std::int32_t> tags;
  for (std::size_t i = 0; i < f.size();) {
    if (f[i] >= 0) {
      ++i;
      continue;
    }
    tags.push_back(f[i + 1]);
    i += 3 + static_cast<std::size_t>(f[i + 2]);
  }
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
  for (std::size_t i = 0; i < f.size();) {
    if (f[i] >= 0) {
      ++i;
      continue;
    }
    f[i + 1] = static_cast<std::int32_t>(std::lower_bound(tags.begin(), tags.end(), f[i + 1]) - tags.begin());
    i += 3 + static_cast<std::size_t>(f[i + 2]);
  }
}

/// Offsets of the variables that may be rewritten under `mode`.
inline std::vector<std::size_t> rewritable(const Form& f, Mode mode) {
  std::vector<std::size_t> out;
  std::int32_t max_tag = -1;
  for (std::size_t i = 0; i < f.size();) {
    if (f[i] >= 0) {
      ++i;
      continue;
    }
    if (mode == Mode::Leftmost) return {i};
    if (mode == Mode::DepthFirst) {
      if (f[i + 1] > max_tag) {
        max_tag = f[i + 1];
        out.clear();
      }
      if (f[i + 1] == max_tag) out.push_back(i);
    } else {
      out.push_back(i);
    }
    i += 3 + static_cast<std::size_t>(f[i + 2]);
  }
  return out;
}

/// Applies production `pi` at variable offset `off`; nullopt if not applicable.
inline std::optional<Form> expand(const CompiledGrammar& cg, const Form& f, std::size_t off, std::int32_t pi,
                                  Mode mode) {
  const auto& p = cg.prods()[static_cast<std::size_t>(pi)];
  if (-f[off] - 1 != p.lhs) return std::nullopt;
  const auto tag = f[off + 1];
  const auto depth = static_cast<std::size_t>(f[off + 2]);
  const std::size_t end = off + 3 + depth;
  if (p.kind == ProductionKind::Consume && (depth == 0 || f[off + 3] != p.lhs_index)) return std::nullopt;

  Form out;
  out.reserve(f.size() + p.body.size() * (3 + depth) + 1);
  out.insert(out.end(), f.begin(), f.begin() + static_cast<std::ptrdiff_t>(off));
  if (p.kind == ProductionKind::Push) {
    out.push_back(-(p.push_var + 1));
    out.push_back(tag);
    out.push_back(static_cast<std::int32_t>(depth + 1));
    out.push_back(p.push_index);
    out.insert(out.end(), f.begin() + static_cast<std::ptrdiff_t>(off + 3), f.begin() + static_cast<std::ptrdiff_t>(end));
  } else {
    const std::size_t skip = p.kind == ProductionKind::Consume ? 1 : 0;
    const std::int32_t child_tag = (mode == Mode::DepthFirst && p.vars >= 2) ? tag + 1 : tag;
    for (auto s : p.body) {
      if (s >= 0) {
        out.push_back(s);
        continue;
      }
      out.push_back(s);
      out.push_back(child_tag);
      out.push_back(static_cast<std::int32_t>(depth - skip));
      out.insert(out.end(), f.begin() + static_cast<std::ptrdiff_t>(off + 3 + skip),
                 f.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }
  out.insert(out.end(), f.begin() + static_cast<std::ptrdiff_t>(end), f.end());
  if (mode == Mode::DepthFirst) canonicalize_tags(out);
  return out;
}

struct SearchConfig {
  Mode mode = Mode::Leftmost;
  std::size_t max_steps = 64;
  std::optional<std::size_t> max_width;
  std::optional<std::size_t> max_stack;
  std::optional<std::size_t> yield_bound;
  const std::vector<std::int32_t>* target = nullptr;
  std::size_t frontier_cap = 1'000'000;
  bool stop_at_first = false;
};

enum class Admit { Ok, Width, Stack, Yield };

inline Admit admit(const CompiledGrammar& cg, const Form& f, const SearchConfig& cfg) {
  FormStats s = stats(cg, f);
  if (s.lower_bound >= kInf) return Admit::Yield;
  if (cfg.max_width && s.width > *cfg.max_width) return Admit::Width;
  if (cfg.max_stack && s.max_depth > *cfg.max_stack) return Admit::Stack;
  if (cfg.yield_bound && s.terminals + s.lower_bound > *cfg.yield_bound) return Admit::Yield;
  if (cfg.target && !matches_target(cg, f, *cfg.target)) return Admit::Yield;
  return Admit::Ok;
}

struct Node {
  const Form* form;
  std::int32_t parent;
  std::int32_t prod;
  std::uint32_t item_pos;
  std::uint32_t depth;
};

/// Graph of explored forms with parent links for witness reconstruction.
class SearchTree {
public:
  std::int32_t add(Form f, std::int32_t parent, std::int32_t prod, std::uint32_t pos, std::uint32_t depth,
                   bool* inserted = nullptr) {
    auto [it, fresh] = index_.emplace(std::move(f), static_cast<std::int32_t>(nodes_.size()));
    if (inserted) *inserted = fresh;
    if (!fresh) return it->second;
    nodes_.push_back({&it->first, parent, prod, pos, depth});
    return it->second;
  }
  std::optional<std::int32_t> find(const Form& f) const {
    auto it = index_.find(f);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Node& node(std::int32_t i) { return nodes_[static_cast<std::size_t>(i)]; }
  const Node& node(std::int32_t i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }

  Derivation derivation_to(const CompiledGrammar& cg, std::int32_t leaf) const {
    std::vector<std::int32_t> chain;
    for (std::int32_t cur = leaf; cur >= 0; cur = node(cur).parent) chain.push_back(cur);
    std::reverse(chain.begin(), chain.end());
    Derivation d;
    d.initial = cg.decode(*node(chain.front()).form);
    for (std::size_t i = 1; i < chain.size(); ++i) {
      const auto& n = node(chain[i]);
      d.steps.push_back({static_cast<std::size_t>(n.prod), n.item_pos, cg.decode(*n.form)});
    }
    return d;
  }

private:
  std::unordered_map<Form, std::int32_t, FormHash> index_;
  std::deque<Node> nodes_;
};

struct SearchResult {
  SearchTree tree;
  std::vector<std::int32_t> terminals;  // nodes whose form has no variables
  SearchFlags flags;
};

inline bool is_terminal_form(const Form& f) {
  return std::all_of(f.begin(), f.end(), [](std::int32_t x) { return x >= 0; });
}

/// Breadth-first search from `root`. Forms are deduplicated, so each is reached at its minimal depth.
inline SearchResult bfs(const CompiledGrammar& cg, const Form& root, const SearchConfig& cfg) {
  SearchResult r;
  std::deque<std::int32_t> queue;
  if (admit(cg, root, cfg) != Admit::Ok) return r;
  queue.push_back(r.tree.add(root, -1, -1, 0, 0));
  while (!queue.empty()) {
    const std::int32_t id = queue.front();
    queue.pop_front();
    const Form& f = *r.tree.node(id).form;
    const std::uint32_t depth = r.tree.node(id).depth;
    if (is_terminal_form(f)) {
      r.terminals.push_back(id);
      if (cfg.stop_at_first) break;
      continue;
    }
    for (std::size_t off : rewritable(f, cfg.mode)) {
      const auto var = -f[off] - 1;
      for (auto pi : cg.by_lhs(var)) {
        auto next = expand(cg, f, off, pi, cfg.mode);
        if (!next) continue;
        switch (admit(cg, *next, cfg)) {
          case Admit::Width: r.flags.width_cap_hit = true; continue;
          case Admit::Stack: r.flags.stack_cap_hit = true; continue;
          case Admit::Yield: continue;
          case Admit::Ok: break;
        }
        if (depth >= cfg.max_steps) {
          r.flags.step_cap_hit = true;
          continue;
        }
        bool inserted = false;
        auto pos = static_cast<std::uint32_t>(item_position(f, off));
        auto child = r.tree.add(std::move(*next), id, pi, pos, depth + 1, &inserted);
        if (!inserted) continue;
        if (r.tree.size() > cfg.frontier_cap) throw BudgetOverflow("search exceeded frontier cap of " + std::to_string(cfg.frontier_cap) + " forms");
        queue.push_back(child);
      }
    }
  }
  r.flags.forms = r.tree.size();
  return r;
}

inline std::optional<std::vector<std::int32_t>> encode_word(const CompiledGrammar& cg, const Word& w) {
  std::vector<std::int32_t> out;
  for (const auto& s : w) {
    auto t = cg.terminal(s);
    if (!t) return std::nullopt;
    out.push_back(*t);
  }
  return out;
}

inline Word decode_word(const CompiledGrammar& cg, const Form& f) {
  Word w;
  for (auto x : f) w.push_back(cg.source().terminals[static_cast<std::size_t>(x)]);
  return w;
}

inline SearchConfig config_from(const Budget& b, Mode mode) {
  SearchConfig c;
  c.mode = mode;
  c.max_steps = b.max_steps;
  c.max_width = b.max_width;
  c.max_stack = b.max_stack;
  c.yield_bound = b.max_yield;
  c.frontier_cap = b.frontier_cap;
  return c;
}

inline std::optional<std::size_t> min_opt(std::optional<std::size_t> a, std::size_t b) {
  return a ? std::min(*a, b) : b;
}

/// Runs `search` on the grammar compiled with the small stack-prefix table;
/// if that runs past the frontier cap, retries once with the large table.
/// Most grammars never need it and the large table costs real time to build.
template <class F>
auto with_deep_retry(const IndexedGrammar& g, F&& search) {
  try {
    CompiledGrammar cg(g);
    return search(cg);
  } catch (const BudgetOverflow&) {
    CompiledGrammar cg(g, CompiledGrammar::kDeepStatesLarge);
    return search(cg);
  }
}

}  // namespace detail

/// Words of L(g) of length at most max_len reachable within the budget.
inline Enumeration enumerate_language(const IndexedGrammar& g, std::size_t max_len, const Budget& budget) {
  return detail::with_deep_retry(g, [&](const detail::CompiledGrammar& cg) {
    auto cfg = detail::config_from(budget, budget.max_width ? detail::Mode::DepthFirst : detail::Mode::Leftmost);
    cfg.yield_bound = detail::min_opt(budget.max_yield, max_len);
    auto r = detail::bfs(cg, cg.initial_form(), cfg);
    WordSet words;
    for (auto id : r.terminals) words.insert(detail::decode_word(cg, *r.tree.node(id).form));
    return Enumeration{std::vector<Word>(words.begin(), words.end()), r.flags};
  });
}

/// Proven with a witness when w is derivable within budget. Refuted when the
/// search was exhausted and either no cap pruned anything or the caller
/// declares the caps exact for g (`caps_exact`). Otherwise Unknown.
inline Verdict membership(const IndexedGrammar& g, const Word& w, const Budget& budget, bool caps_exact = false) {
  detail::CompiledGrammar cg(g);
  Verdict v;
  auto target = detail::encode_word(cg, w);
  if (!target) {
    v.status = Status::Refuted;
    v.note = "word uses a symbol outside the terminal alphabet";
    return v;
  }
  auto cfg = detail::config_from(budget, budget.max_width ? detail::Mode::DepthFirst : detail::Mode::Leftmost);
  cfg.yield_bound = detail::min_opt(budget.max_yield, w.size());
  cfg.target = &*target;
  cfg.stop_at_first = true;
  auto r = detail::bfs(cg, cg.initial_form(), cfg);
  v.flags = r.flags;
  if (!r.terminals.empty()) {
    v.status = Status::Proven;
    v.witness = r.tree.derivation_to(cg, r.terminals.front());
  } else if (r.flags.exhausted() && (!r.flags.caps_hit() || caps_exact)) {
    v.status = Status::Refuted;
  }
  return v;
}

/// Smallest k such that some derivation of w has index k, by iterative deepening on the width cap.
inline MeasureResult min_index(const IndexedGrammar& g, const Word& w, const Budget& budget) {
  MeasureResult out;
  Budget unbounded_width = budget;
  unbounded_width.max_width.reset();
  Verdict m = membership(g, w, unbounded_width);
  out.flags = m.flags;
  if (m.status == Status::Refuted) throw NotAMember("'" + format_word(w) + "' is not generated by the grammar");
  if (m.status == Status::Unknown) return out;

  detail::CompiledGrammar cg(g);
  auto target = *detail::encode_word(cg, w);
  const std::size_t upper = m.witness->index();
  const bool width_limited = budget.max_width && *budget.max_width < upper;
  const std::size_t below = width_limited ? *budget.max_width : upper - 1;
  // Each smaller k must be ruled out by a search that no step or stack cap cut short.
  bool exact = true;
  for (std::size_t k = 1; k <= below; ++k) {
    auto cfg = detail::config_from(budget, detail::Mode::DepthFirst);
    cfg.max_width = k;
    cfg.yield_bound = detail::min_opt(budget.max_yield, w.size());
    cfg.target = &target;
    cfg.stop_at_first = true;
    auto r = detail::bfs(cg, cg.initial_form(), cfg);
    out.flags.merge(r.flags);
    if (!r.terminals.empty()) {
      out.status = exact ? Status::Proven : Status::Unknown;
      out.value = k;
      out.witness = r.tree.derivation_to(cg, r.terminals.front());
      return out;
    }
    if (r.flags.step_cap_hit || r.flags.stack_cap_hit) exact = false;
  }
  // The leftmost witness is itself a derivation; its index bounds the minimum.
  out.status = exact && !width_limited ? Status::Proven : Status::Unknown;
  out.value = upper;
  out.witness = m.witness;
  return out;
}

/// Minimum number of special-production applications over derivations of w.
inline MeasureResult special_count_min(const IndexedGrammar& g, const Word& w, const Budget& budget) {
  detail::CompiledGrammar cg(g);
  MeasureResult out;
  auto target = detail::encode_word(cg, w);
  if (!target) throw NotAMember("'" + format_word(w) + "' uses symbols outside the terminal alphabet");
  auto cfg = detail::config_from(budget, detail::Mode::Leftmost);
  cfg.yield_bound = detail::min_opt(budget.max_yield, w.size());
  cfg.target = &*target;

  // 0-1 BFS on (special count, steps); forms keep the first (cheapest) arrival.
  detail::SearchTree tree;
  std::unordered_map<std::int32_t, std::uint32_t> cost;
  std::deque<std::int32_t> dq;
  auto root = cg.initial_form();
  if (detail::admit(cg, root, cfg) == detail::Admit::Ok) {
    dq.push_back(tree.add(root, -1, -1, 0, 0));
    cost[0] = 0;
  }
  std::vector<bool> done;
  while (!dq.empty()) {
    auto id = dq.front();
    dq.pop_front();
    if (static_cast<std::size_t>(id) < done.size() && done[static_cast<std::size_t>(id)]) continue;
    if (done.size() <= static_cast<std::size_t>(id)) done.resize(static_cast<std::size_t>(id) + 1, false);
    done[static_cast<std::size_t>(id)] = true;
    const detail::Form& f = *tree.node(id).form;
    const auto depth = tree.node(id).depth;
    const auto c = cost[id];
    if (detail::is_terminal_form(f)) {
      out.status = Status::Proven;
      out.value = c;
      out.witness = tree.derivation_to(cg, id);
      out.flags.forms = tree.size();
      return out;
    }
    for (std::size_t off : detail::rewritable(f, detail::Mode::Leftmost)) {
      for (auto pi : cg.by_lhs(-f[off] - 1)) {
        auto next = detail::expand(cg, f, off, pi, detail::Mode::Leftmost);
        if (!next) continue;
        auto a = detail::admit(cg, *next, cfg);
        if (a == detail::Admit::Stack) out.flags.stack_cap_hit = true;
        if (a != detail::Admit::Ok) continue;
        if (depth >= cfg.max_steps) {
          out.flags.step_cap_hit = true;
          continue;
        }
        const std::uint32_t nc = c + (cg.prods()[static_cast<std::size_t>(pi)].special ? 1U : 0U);
        auto existing = tree.find(*next);
        if (existing) {
          if (nc < cost[*existing] && !(static_cast<std::size_t>(*existing) < done.size() && done[static_cast<std::size_t>(*existing)])) {
            cost[*existing] = nc;
            auto& n = tree.node(*existing);
            n.parent = id;
            n.prod = pi;
            n.item_pos = static_cast<std::uint32_t>(detail::item_position(f, off));
            n.depth = depth + 1;
            dq.push_front(*existing);
          }
          continue;
        }
        auto child = tree.add(std::move(*next), id, pi, static_cast<std::uint32_t>(detail::item_position(f, off)), depth + 1);
        if (tree.size() > cfg.frontier_cap) throw BudgetOverflow("search exceeded frontier cap");
        cost[child] = nc;
        if (nc == c) dq.push_front(child); else dq.push_back(child);
      }
    }
  }
  out.flags.forms = tree.size();
  if (out.flags.exhausted() && !out.flags.caps_hit())
    throw NotAMember("'" + format_word(w) + "' is not generated by the grammar");
  return out;
}

/// Looks for a successful derivation containing a form of width > k.
///
/// Refuted carries such a derivation. Proven means no such derivation exists
/// within the budget and the explored space was finite, or the grammar has no
/// special production at all (then every form has width 1).
inline Verdict check_uncontrolled(const IndexedGrammar& g, std::size_t k, const Budget& budget) {
  Verdict v;
  if (k >= 1 && special_production_count(g) == 0) {
    v.status = Status::Proven;
    v.note = "no special productions: every sentential form has width 1";
    return v;
  }
  detail::CompiledGrammar cg(g);
  auto cfg = detail::config_from(budget, detail::Mode::AllPositions);
  cfg.max_width.reset();

  detail::SearchTree tree;
  // Widest first, then shallowest, then oldest.
  using Key = std::tuple<std::size_t, std::uint32_t, std::size_t>;
  auto cmp = [](const std::pair<Key, std::int32_t>& a, const std::pair<Key, std::int32_t>& b) {
    const auto& [wa, da, sa] = a.first;
    const auto& [wb, db, sb] = b.first;
    if (wa != wb) return wa < wb;
    if (da != db) return da > db;
    return sa > sb;
  };
  std::priority_queue<std::pair<Key, std::int32_t>, std::vector<std::pair<Key, std::int32_t>>, decltype(cmp)> pq(cmp);
  std::size_t serial = 0;
  bool complete = true;

  auto root = cg.initial_form();
  if (detail::admit(cg, root, cfg) != detail::Admit::Ok) {
    v.status = Status::Proven;
    v.note = "start variable derives no word within the yield bound";
    return v;
  }
  pq.push({{1, 0, serial++}, tree.add(root, -1, -1, 0, 0)});
  while (!pq.empty()) {
    auto [key, id] = pq.top();
    pq.pop();
    const detail::Form& f = *tree.node(id).form;
    const auto depth = tree.node(id).depth;
    if (std::get<1>(key) != depth) continue;  // stale entry
    auto st = detail::stats(cg, f);
    if (st.width > k) {
      auto sub = cfg;
      sub.mode = detail::Mode::Leftmost;
      sub.max_steps = cfg.max_steps - depth;
      sub.stop_at_first = true;
      auto r = detail::bfs(cg, f, sub);
      v.flags.merge(r.flags);
      if (!r.terminals.empty()) {
        Derivation head = tree.derivation_to(cg, id);
        Derivation tail = r.tree.derivation_to(cg, r.terminals.front());
        for (auto& s : tail.steps) head.steps.push_back(std::move(s));
        v.status = Status::Refuted;
        v.witness = std::move(head);
        v.flags.forms += tree.size();
        return v;
      }
      if (!r.flags.exhausted()) complete = false;
      continue;
    }
    if (detail::is_terminal_form(f)) continue;
    for (std::size_t off : detail::rewritable(f, detail::Mode::AllPositions)) {
      for (auto pi : cg.by_lhs(-f[off] - 1)) {
        auto next = detail::expand(cg, f, off, pi, detail::Mode::AllPositions);
        if (!next) continue;
        auto a = detail::admit(cg, *next, cfg);
        if (a == detail::Admit::Stack) v.flags.stack_cap_hit = true;
        if (a != detail::Admit::Ok) continue;
        if (depth >= cfg.max_steps) {
          v.flags.step_cap_hit = true;
          complete = false;
          continue;
        }
        auto w = detail::stats(cg, *next).width;
        auto pos = static_cast<std::uint32_t>(detail::item_position(f, off));
        if (auto existing = tree.find(*next)) {
          auto& n = tree.node(*existing);
          if (depth + 1 < n.depth) {
            n.parent = id;
            n.prod = pi;
            n.item_pos = pos;
            n.depth = depth + 1;
            pq.push({{w, depth + 1, serial++}, *existing});
          }
          continue;
        }
        auto child = tree.add(std::move(*next), id, pi, pos, depth + 1);
        if (tree.size() > cfg.frontier_cap) throw BudgetOverflow("search exceeded frontier cap");
        pq.push({{w, depth + 1, serial++}, child});
      }
    }
  }
  v.flags.forms += tree.size();
  v.status = complete ? Status::Proven : Status::Unknown;
  return v;
}

}  // namespace idxgram
