#pragma once

/// Reversal-bounded multicounter machines: simulation, reduction to
/// 1-reversal counters, expansion into a finite automaton that spells out
/// counter activity, and the Parikh-image pipeline built on it.
///
/// File format
///   states: q0, q1, f
///   alphabet: a, b
///   counters: 1
///   reversals: 1
///   initial: q0
///   halt: f
///   trans: q0, a, (*) -> q0, (+)       # letter or _, one test per counter
///   trans: q0, b, (p) -> q1, (-)       # tests z | p | *, deltas + | - | 0
///
/// A word is accepted when a run ends in the halting state, with the input
/// consumed and every counter at zero.

#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "idxgram/automata.hpp"
#include "idxgram/engine.hpp"
#include "idxgram/grammar.hpp"
#include "idxgram/semilinear.hpp"
#include "idxgram/trio.hpp"

namespace idxgram {

enum class CounterTest { Zero, Positive, Any };

class NotOneReversal : public Error {
public:
  using Error::Error;
};

struct CounterMachine {
  struct Transition {
    int from = 0;
    int letter = -1;  // -1 for ε
    std::vector<CounterTest> tests;
    int to = 0;
    std::vector<int> deltas;  // -1, 0, +1
  };

  std::vector<std::string> states;
  std::vector<Symbol> alphabet;
  std::size_t counters = 0;
  std::vector<std::size_t> reversals;
  int initial = 0;
  int halt = 0;
  std::vector<Transition> transitions;

  int state(const std::string& s) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == s) return static_cast<int>(i);
    return -1;
  }
  int letter(const Symbol& a) const {
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      if (alphabet[i] == a) return static_cast<int>(i);
    return -1;
  }
};

inline bool test_holds(CounterTest t, std::int64_t value) {
  switch (t) {
    case CounterTest::Zero: return value == 0;
    case CounterTest::Positive: return value > 0;
    case CounterTest::Any: return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Simulation

struct RunResult {
  Status status = Status::Unknown;
  std::vector<std::size_t> trace;  // transition indices of an accepting run
  bool counter_cap_hit = false;
  bool config_cap_hit = false;
  std::size_t configs = 0;
};

/// Tracks direction changes of one counter. A reversal is a switch between
/// increasing and decreasing; the first move must be an increment.
struct ReversalState {
  std::size_t reversals = 0;
  bool decreasing = false;

  /// Applies a move; false if it would exceed `bound`.
  bool move(int delta, std::size_t bound) {
    if (delta == 0) return true;
    bool down = delta < 0;
    if (down != decreasing) {
      if (reversals + 1 > bound) return false;
      ++reversals;
      decreasing = down;
    }
    return true;
  }
};

/// Breadth-first search over configurations (state, position, counters,
/// reversal bookkeeping). Counters above `counter_cap` (default 2|w|+4) are
/// cut off; if that happened and no accepting run was found the answer is
/// Unknown.
inline RunResult ncm_run(const CounterMachine& m, const Word& w, std::optional<std::int64_t> counter_cap = std::nullopt,
                         std::size_t max_configs = 2'000'000) {
  RunResult res;
  std::vector<int> input;
  for (const auto& a : w) {
    int l = m.letter(a);
    if (l < 0) {
      res.status = Status::Refuted;
      return res;
    }
    input.push_back(l);
  }
  const std::int64_t cap = counter_cap ? *counter_cap : 2 * static_cast<std::int64_t>(w.size()) + 4;
  const std::size_t k = m.counters;
  // config: state, pos, k counters, k reversal counts, k directions
  using Config = std::vector<std::int64_t>;
  std::map<Config, std::pair<std::int64_t, std::size_t>> parent;  // config -> (parent id, transition)
  std::vector<Config> order;
  Config start(2 + 3 * k, 0);
  start[0] = m.initial;
  parent.emplace(start, std::make_pair(-1, 0));
  order.push_back(start);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Config c = order[i];
    const auto pos = static_cast<std::size_t>(c[1]);
    if (c[0] == m.halt && pos == input.size() &&
        std::all_of(c.begin() + 2, c.begin() + 2 + static_cast<std::ptrdiff_t>(k), [](std::int64_t x) { return x == 0; })) {
      for (std::int64_t x = static_cast<std::int64_t>(i); parent.at(order[static_cast<std::size_t>(x)]).first >= 0;) {
        auto [p, t] = parent.at(order[static_cast<std::size_t>(x)]);
        res.trace.push_back(t);
        x = p;
      }
      std::reverse(res.trace.begin(), res.trace.end());
      res.status = Status::Proven;
      res.configs = order.size();
      return res;
    }
    for (std::size_t ti = 0; ti < m.transitions.size(); ++ti) {
      const auto& t = m.transitions[ti];
      if (t.from != c[0]) continue;
      if (t.letter >= 0 && (pos >= input.size() || input[pos] != t.letter)) continue;
      Config n = c;
      n[0] = t.to;
      if (t.letter >= 0) ++n[1];
      bool ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        std::int64_t& v = n[2 + j];
        if (!test_holds(t.tests[j], v)) ok = false;
        if (t.deltas[j] < 0 && v == 0) ok = false;
        ReversalState rs{static_cast<std::size_t>(n[2 + k + j]), n[2 + 2 * k + j] != 0};
        if (ok && !rs.move(t.deltas[j], m.reversals[j])) ok = false;
        n[2 + k + j] = static_cast<std::int64_t>(rs.reversals);
        n[2 + 2 * k + j] = rs.decreasing ? 1 : 0;
        v += t.deltas[j];
        if (ok && v > cap) {
          res.counter_cap_hit = true;
          ok = false;
        }
      }
      if (!ok) continue;
      if (parent.emplace(n, std::make_pair(static_cast<std::int64_t>(i), ti)).second) {
        order.push_back(std::move(n));
        if (order.size() > max_configs) {
          res.config_cap_hit = true;
          res.configs = order.size();
          return res;
        }
      }
    }
  }
  res.configs = order.size();
  res.status = res.counter_cap_hit ? Status::Unknown : Status::Refuted;
  return res;
}

/// Replays a transition sequence on w and checks that it is an accepting run:
/// letters match, tests hold, no counter goes below zero, reversal bounds hold.
inline bool audit_run(const CounterMachine& m, const Word& w, const std::vector<std::size_t>& trace) {
  int q = m.initial;
  std::size_t pos = 0;
  std::vector<std::int64_t> v(m.counters, 0);
  std::vector<ReversalState> rs(m.counters);
  for (auto ti : trace) {
    if (ti >= m.transitions.size()) return false;
    const auto& t = m.transitions[ti];
    if (t.from != q) return false;
    if (t.letter >= 0) {
      if (pos >= w.size() || m.letter(w[pos]) != t.letter) return false;
      ++pos;
    }
    for (std::size_t j = 0; j < m.counters; ++j) {
      if (!test_holds(t.tests[j], v[j])) return false;
      if (t.deltas[j] < 0 && v[j] == 0) return false;
      if (!rs[j].move(t.deltas[j], m.reversals[j])) return false;
      v[j] += t.deltas[j];
    }
    q = t.to;
  }
  return q == m.halt && pos == w.size() && std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

// ---------------------------------------------------------------------------
// Reduction to 1-reversal counters

/// Every counter with reversal bound r ≠ 1 becomes ⌈(r+1)/2⌉ components. The
/// j-th increasing phase of the counter increments component j; a decrement
/// takes one from any positive component of the current or an earlier phase,
/// so each component increases and then decreases. The finite control records
/// how many reversals each such counter has made. Counters with bound 1 are
/// kept as they are.
inline CounterMachine to_one_reversal(const CounterMachine& m) {
  std::vector<std::size_t> tracked, first_component(m.counters), parts(m.counters);
  std::size_t total = 0;
  for (std::size_t c = 0; c < m.counters; ++c) {
    parts[c] = m.reversals[c] == 1 ? 1 : (m.reversals[c] + 2) / 2;
    first_component[c] = total;
    total += parts[c];
    if (m.reversals[c] != 1) tracked.push_back(c);
  }
  if (tracked.empty()) return m;

  CounterMachine out;
  out.alphabet = m.alphabet;
  out.counters = total;
  out.reversals.assign(total, 1);

  // control state: original state plus (reversal count, direction) per tracked counter
  using Key = std::vector<std::size_t>;
  std::map<Key, int> ids;
  std::deque<Key> work;
  NameAllocator names;
  auto intern = [&](const Key& key) {
    auto [it, fresh] = ids.emplace(key, static_cast<int>(out.states.size()));
    if (fresh) {
      std::string name = m.states[key[0]] + "@";
      for (std::size_t i = 0; i < tracked.size(); ++i) {
        if (i) name += ".";
        name += std::to_string(key[1 + 2 * i]) + (key[2 + 2 * i] ? "d" : "u");
      }
      out.states.push_back(names.fresh(name));
      work.push_back(key);
    }
    return it->second;
  };
  Key start(1 + 2 * tracked.size(), 0);
  start[0] = static_cast<std::size_t>(m.initial);
  out.initial = intern(start);

  while (!work.empty()) {
    Key key = work.front();
    work.pop_front();
    const int from = ids.at(key);
    for (const auto& t : m.transitions) {
      if (t.from != static_cast<int>(key[0])) continue;
      Key next = key;
      next[0] = static_cast<std::size_t>(t.to);
      bool ok = true;
      // per original counter: list of alternative (tests, deltas) on its components
      std::vector<std::vector<std::pair<std::vector<CounterTest>, std::vector<int>>>> options(m.counters);
      for (std::size_t c = 0; c < m.counters && ok; ++c) {
        const std::size_t n = parts[c];
        auto ti = std::find(tracked.begin(), tracked.end(), c);
        if (ti == tracked.end()) {
          options[c].push_back({{t.tests[c]}, {t.deltas[c]}});
          continue;
        }
        const std::size_t slot = static_cast<std::size_t>(ti - tracked.begin());
        ReversalState rs{key[1 + 2 * slot], key[2 + 2 * slot] != 0};
        if (!rs.move(t.deltas[c], m.reversals[c])) {
          ok = false;
          break;
        }
        next[1 + 2 * slot] = rs.reversals;
        next[2 + 2 * slot] = rs.decreasing ? 1 : 0;
        const std::size_t phase = rs.reversals / 2;  // component of the current increasing phase
        std::vector<CounterTest> any(n, CounterTest::Any);
        std::vector<int> none(n, 0);
        if (t.tests[c] == CounterTest::Zero) {
          if (t.deltas[c] < 0) {
            ok = false;
            break;
          }
          std::vector<CounterTest> zero(n, CounterTest::Zero);
          std::vector<int> d = none;
          if (t.deltas[c] > 0) d[phase] = 1;
          options[c].push_back({zero, d});
        } else if (t.deltas[c] < 0 || t.tests[c] == CounterTest::Positive) {
          // pick the positive component that witnesses the test or pays the decrement
          for (std::size_t i = 0; i <= std::min(phase, n - 1); ++i) {
            std::vector<CounterTest> tests = any;
            tests[i] = CounterTest::Positive;
            std::vector<int> d = none;
            if (t.deltas[c] < 0) d[i] = -1;
            if (t.deltas[c] > 0) d[phase] = 1;
            options[c].push_back({tests, d});
          }
        } else {
          std::vector<int> d = none;
          if (t.deltas[c] > 0) d[phase] = 1;
          options[c].push_back({any, d});
        }
      }
      if (!ok) continue;
      const int to = intern(next);
      // cartesian product of the per-counter options
      std::vector<std::size_t> pick(m.counters, 0);
      for (;;) {
        CounterMachine::Transition nt;
        nt.from = from;
        nt.to = to;
        nt.letter = t.letter;
        for (std::size_t c = 0; c < m.counters; ++c) {
          const auto& [tests, deltas] = options[c][pick[c]];
          nt.tests.insert(nt.tests.end(), tests.begin(), tests.end());
          nt.deltas.insert(nt.deltas.end(), deltas.begin(), deltas.end());
        }
        out.transitions.push_back(std::move(nt));
        std::size_t c = 0;
        while (c < m.counters && ++pick[c] == options[c].size()) pick[c++] = 0;
        if (c == m.counters) break;
      }
    }
  }
  // single halting state reached from every copy of the old one with all components zero
  out.halt = static_cast<int>(out.states.size());
  out.states.push_back(names.fresh(m.states[static_cast<std::size_t>(m.halt)] + "@end"));
  for (const auto& [key, id] : ids)
    if (static_cast<int>(key[0]) == m.halt)
      out.transitions.push_back({id, -1, std::vector<CounterTest>(total, CounterTest::Zero), out.halt, std::vector<int>(total, 0)});
  return out;
}

// ---------------------------------------------------------------------------
// Expansion into a finite automaton

/// Letters p_i (increment of counter i) and q_i (decrement) added to the input alphabet.
struct CounterLetters {
  std::vector<Symbol> inc;
  std::vector<Symbol> dec;
};

inline CounterLetters counter_letters(const CounterMachine& m) {
  NameAllocator names(m.alphabet);
  CounterLetters l;
  for (std::size_t i = 0; i < m.counters; ++i) {
    l.inc.push_back(names.fresh("p" + std::to_string(i + 1)));
    l.dec.push_back(names.fresh("q" + std::to_string(i + 1)));
  }
  return l;
}

/// NFA over A ∪ {p_i, q_i}. Each counter is in phase Init, Up, Down or Zero
/// (the last one a guess that the counter has returned to zero). A machine
/// move reads its letter, then p_i / q_i for each counter it changes. Zero
/// tests need Init or Zero, positive tests Up or Down; acceptance needs the
/// halting state with every counter in Init or Zero. Words w' accepted with
/// |w'|_{p_i} = |w'|_{q_i} for all i are exactly the spelled-out accepting
/// runs.
inline Nfa expand_to_nfa(const CounterMachine& m, const CounterLetters& letters) {
  for (std::size_t c = 0; c < m.counters; ++c)
    if (m.reversals[c] > 1) throw NotOneReversal("counter " + std::to_string(c + 1) + " has reversal bound " + std::to_string(m.reversals[c]) + "; apply to_one_reversal first");
  enum Phase : char { Init = 'I', Up = 'U', Down = 'D', Zero = 'Z' };
  Nfa n;
  for (const auto& a : m.alphabet) n.add_letter(a);
  for (std::size_t c = 0; c < m.counters; ++c) {
    n.add_letter(letters.inc[c]);
    n.add_letter(letters.dec[c]);
  }
  using Key = std::pair<int, std::string>;
  std::map<Key, int> ids;
  std::deque<Key> work;
  auto intern = [&](const Key& key) {
    auto [it, fresh] = ids.emplace(key, static_cast<int>(n.states.size()));
    if (fresh) {
      bool settled = std::all_of(key.second.begin(), key.second.end(), [](char p) { return p == Init || p == Zero; });
      n.add_state(m.states[static_cast<std::size_t>(key.first)] + "[" + key.second + "]", key.first == m.halt && settled);
      work.push_back(key);
    }
    return it->second;
  };
  n.initial = intern({m.initial, std::string(m.counters, Init)});
  std::size_t hop = 0;
  while (!work.empty()) {
    Key key = work.front();
    work.pop_front();
    const int from = ids.at(key);
    for (const auto& t : m.transitions) {
      if (t.from != key.first) continue;
      // successor phase strings (a decrement may or may not be the last one)
      std::vector<std::string> phases{key.second};
      bool ok = true;
      for (std::size_t c = 0; c < m.counters && ok; ++c) {
        std::vector<std::string> next;
        for (const auto& ph : phases) {
          char p = ph[c];
          bool zero_now = p == Init || p == Zero;
          if (t.tests[c] == CounterTest::Zero && !zero_now) continue;
          if (t.tests[c] == CounterTest::Positive && zero_now) continue;
          if (t.deltas[c] > 0) {
            if (p == Init || p == Up) {
              std::string s = ph;
              s[c] = Up;
              next.push_back(s);
            }
          } else if (t.deltas[c] < 0) {
            if (p == Up || p == Down) {
              std::string s = ph;
              s[c] = Down;
              next.push_back(s);
              s[c] = Zero;
              next.push_back(s);
            }
          } else {
            next.push_back(ph);
          }
        }
        phases = std::move(next);
      }
      for (const auto& ph : phases) {
        std::vector<int> spelled;
        if (t.letter >= 0) spelled.push_back(n.letter(m.alphabet[static_cast<std::size_t>(t.letter)]));
        for (std::size_t c = 0; c < m.counters; ++c) {
          if (t.deltas[c] > 0) spelled.push_back(n.letter(letters.inc[c]));
          if (t.deltas[c] < 0) spelled.push_back(n.letter(letters.dec[c]));
        }
        const int to = intern({t.to, ph});
        if (spelled.empty()) {
          n.edges.push_back({from, -1, to});
          continue;
        }
        int cur = from;
        for (std::size_t i = 0; i < spelled.size(); ++i) {
          int nxt = i + 1 == spelled.size() ? to : n.add_state("~" + std::to_string(++hop));
          n.edges.push_back({cur, spelled[i], nxt});
          cur = nxt;
        }
      }
    }
  }
  return n;
}

// ---------------------------------------------------------------------------
// Parikh image of L(g) ∩ L(m)

struct ParikhIntersection {
  std::set<Vector> pipeline;  // through the grammar constructions
  std::set<Vector> direct;    // ψ of enumerate(g) filtered by the simulator
  bool agree = false;
  bool exhausted = true;
  bool simulator_unknown = false;
};

/// ψ(L(g) ∩ L(m)) restricted to words of length ≤ radius, computed twice:
/// by building h⁻¹(L(g)) ∩ R with R the expansion of m, enumerating it up to radius + pad letters, keeping words with
/// balanced p_i / q_i counts and projecting to the input letters; and
/// directly, by running m on the words of L(g).
inline ParikhIntersection parikh_of_intersection(const IndexedGrammar& g, const CounterMachine& machine, std::size_t radius,
                                                 std::optional<std::size_t> pad = std::nullopt, Budget budget = {}) {
  for (const auto& t : g.terminals)
    if (machine.letter(t) < 0) throw Error("terminal '" + t + "' is not in the machine alphabet");
  CounterMachine m = to_one_reversal(machine);
  const std::vector<Symbol>& A = m.alphabet;
  CounterLetters letters = counter_letters(m);
  const std::size_t extra = pad ? *pad : 2 * m.counters * radius;

  std::vector<Symbol> full = A;
  for (std::size_t c = 0; c < m.counters; ++c) {
    full.push_back(letters.inc[c]);
    full.push_back(letters.dec[c]);
  }
  Dfa r3 = determinize(expand_to_nfa(m, letters), full);

  // lift over the grammar's own terminals; machine letters it never uses stay absent
  std::vector<Symbol> lift = g.terminals;
  for (std::size_t c = 0; c < m.counters; ++c) {
    lift.push_back(letters.inc[c]);
    lift.push_back(letters.dec[c]);
  }
  IndexedGrammar lifted = inverse_projection(g, lift);
  IndexedGrammar l4 = prune_grammar(intersect_dfa(normalize_rhs(lifted), r3));

  ParikhIntersection out;
  Budget b = budget;
  b.max_steps = std::max(b.max_steps, 8 * (radius + extra) + 8);
  auto e4 = enumerate_language(l4, radius + extra, b);
  out.exhausted = e4.flags.exhausted() && !e4.flags.caps_hit();
  for (const auto& w : e4.words) {
    Vector psi = parikh(w, full);
    bool balanced = true;
    for (std::size_t c = 0; c < m.counters; ++c)
      if (psi[A.size() + 2 * c] != psi[A.size() + 2 * c + 1]) balanced = false;
    if (!balanced) continue;
    if (std::accumulate(psi.begin(), psi.begin() + static_cast<std::ptrdiff_t>(A.size()), std::int64_t{0}) > static_cast<std::int64_t>(radius)) continue;
    out.pipeline.insert(Vector(psi.begin(), psi.begin() + static_cast<std::ptrdiff_t>(A.size())));
  }

  auto eg = enumerate_language(g, radius, b);
  out.exhausted = out.exhausted && eg.flags.exhausted() && !eg.flags.caps_hit();
  for (const auto& w : eg.words) {
    auto run = ncm_run(machine, w);
    if (run.status == Status::Unknown) out.simulator_unknown = true;
    if (run.status == Status::Proven) out.direct.insert(parikh(w, A));
  }
  out.agree = out.pipeline == out.direct;
  return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace detail {

/// Splits on commas that are not inside parentheses.
inline std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::vector<std::string> paren_items(const std::string& s) {
  std::string t = trim(s);
  if (!t.empty() && t.front() == '(') {
    if (t.back() != ')') throw Error("unbalanced parentheses in '" + t + "'");
    t = t.substr(1, t.size() - 2);
  }
  if (trim(t).empty()) return {};
  auto items = split_list(t);
  if (items.size() == 1 && items[0].size() > 1 && items[0].find(' ') == std::string::npos) {
    // compact form such as "zp" or "+-"
    std::vector<std::string> chars;
    for (char c : items[0]) chars.emplace_back(1, c);
    return chars;
  }
  return items;
}

}  // namespace detail

inline CounterMachine parse_machine(const std::string& text) {
  CounterMachine m;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  bool have_counters = false, have_initial = false, have_halt = false;
  std::vector<std::string> pending;  // trans lines, parsed once counters are known
  std::vector<std::size_t> pending_line;
  std::string initial, halt;
  auto fail = [&](std::size_t line, const std::string& msg) { throw Error("line " + std::to_string(line) + ": " + msg); };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string t = detail::trim(detail::strip_comment(raw));
    if (t.empty()) continue;
    auto colon = t.find(':');
    if (colon == std::string::npos) fail(lineno, "expected 'key: value'");
    std::string key = detail::trim(t.substr(0, colon));
    std::string rest = detail::trim(t.substr(colon + 1));
    if (key == "states") {
      for (auto& s : detail::split_list(rest))
        if (!s.empty() && m.state(s) < 0) m.states.push_back(s);
    } else if (key == "alphabet") {
      for (auto& s : detail::split_list(rest))
        if (!s.empty() && m.letter(s) < 0) m.alphabet.push_back(s);
    } else if (key == "counters") {
      try {
        m.counters = static_cast<std::size_t>(std::stoul(rest));
      } catch (const std::exception&) {
        fail(lineno, "expected a counter count");
      }
      have_counters = true;
    } else if (key == "reversals") {
      for (auto& s : detail::split_list(rest)) {
        if (s.empty()) continue;
        try {
          m.reversals.push_back(static_cast<std::size_t>(std::stoul(s)));
        } catch (const std::exception&) {
          fail(lineno, "expected reversal bounds");
        }
      }
    } else if (key == "initial") {
      initial = rest;
      have_initial = true;
    } else if (key == "halt") {
      halt = rest;
      have_halt = true;
    } else if (key == "trans") {
      pending.push_back(rest);
      pending_line.push_back(lineno);
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }
  }
  if (!have_counters) m.counters = 0;
  if (m.reversals.empty()) m.reversals.assign(m.counters, 1);
  if (m.reversals.size() == 1 && m.counters > 1) m.reversals.assign(m.counters, m.reversals[0]);
  if (m.reversals.size() != m.counters) throw Error("need one reversal bound per counter");
  if (!have_initial) throw Error("missing 'initial:' line");
  if (!have_halt) throw Error("missing 'halt:' line");
  auto state = [&](const std::string& s) {
    int id = m.state(s);
    if (id < 0) {
      m.states.push_back(s);
      id = static_cast<int>(m.states.size()) - 1;
    }
    return id;
  };
  m.initial = state(initial);
  m.halt = state(halt);
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const std::string& s = pending[i];
    auto arrow = s.find("->");
    if (arrow == std::string::npos) fail(pending_line[i], "expected '->'");
    auto lhs = detail::split_top_level(s.substr(0, arrow));
    auto rhs = detail::split_top_level(s.substr(arrow + 2));
    if (lhs.size() < 2 || lhs.size() > 3 || rhs.empty() || rhs.size() > 2)
      fail(pending_line[i], "expected 'trans: p, a, (tests) -> q, (deltas)'");
    CounterMachine::Transition t;
    t.from = state(lhs[0]);
    if (lhs[1] != "_") {
      t.letter = m.letter(lhs[1]);
      if (t.letter < 0) fail(pending_line[i], "letter '" + lhs[1] + "' not in the alphabet");
    }
    t.to = state(rhs[0]);
    auto tests = lhs.size() == 3 ? detail::paren_items(lhs[2]) : std::vector<std::string>{};
    auto deltas = rhs.size() == 2 ? detail::paren_items(rhs[1]) : std::vector<std::string>{};
    if (tests.empty()) tests.assign(m.counters, "*");
    if (deltas.empty()) deltas.assign(m.counters, "0");
    if (tests.size() != m.counters || deltas.size() != m.counters)
      fail(pending_line[i], "need one test and one delta per counter");
    for (const auto& x : tests) {
      if (x == "z") t.tests.push_back(CounterTest::Zero);
      else if (x == "p") t.tests.push_back(CounterTest::Positive);
      else if (x == "*") t.tests.push_back(CounterTest::Any);
      else fail(pending_line[i], "bad counter test '" + x + "'");
    }
    for (const auto& x : deltas) {
      if (x == "+") t.deltas.push_back(1);
      else if (x == "-") t.deltas.push_back(-1);
      else if (x == "0") t.deltas.push_back(0);
      else fail(pending_line[i], "bad counter delta '" + x + "'");
    }
    m.transitions.push_back(std::move(t));
  }
  return m;
}

inline std::string serialize_machine(const CounterMachine& m) {
  std::ostringstream out;
  out << "states: " << join(m.states, ", ") << "\n";
  out << "alphabet: " << join(m.alphabet, ", ") << "\n";
  out << "counters: " << m.counters << "\n";
  std::vector<std::string> rev;
  for (auto r : m.reversals) rev.push_back(std::to_string(r));
  out << "reversals: " << join(rev, ", ") << "\n";
  out << "initial: " << m.states[static_cast<std::size_t>(m.initial)] << "\n";
  out << "halt: " << m.states[static_cast<std::size_t>(m.halt)] << "\n";
  for (const auto& t : m.transitions) {
    std::vector<std::string> tests, deltas;
    for (auto x : t.tests) tests.push_back(x == CounterTest::Zero ? "z" : x == CounterTest::Positive ? "p" : "*");
    for (auto d : t.deltas) deltas.push_back(d > 0 ? "+" : d < 0 ? "-" : "0");
    out << "trans: " << m.states[static_cast<std::size_t>(t.from)] << ", "
        << (t.letter < 0 ? std::string("_") : m.alphabet[static_cast<std::size_t>(t.letter)]) << ", (" << join(tests, ",")
        << ") -> " << m.states[static_cast<std::size_t>(t.to)] << ", (" << join(deltas, ",") << ")\n";
  }
  return out.str();
}

}  // namespace idxgram
