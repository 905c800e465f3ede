#pragma once

/// Automata over tuples of naturals, read as parallel binary tracks,
/// least significant bit first. A symbol is a bitmask with bit i holding the
/// current bit of track i. All constructions here keep languages closed under
/// appending all-zero symbols, so a tuple is accepted under every padding or
/// under none.

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "idxgram/common.hpp"

namespace idxgram {

using Vector = std::vector<std::int64_t>;

class TrackMismatch : public Error {
public:
  using Error::Error;
};

struct TupleAutomaton {
  using Edge = std::pair<std::uint32_t, int>;  // symbol, target

  int tracks = 0;
  int initial = 0;
  std::vector<std::vector<Edge>> out;
  std::vector<bool> accepting;
  bool deterministic = true;

  int size() const { return static_cast<int>(out.size()); }
  std::uint32_t symbols() const { return 1u << tracks; }

  int add_state(bool accept = false) {
    out.emplace_back();
    accepting.push_back(accept);
    return size() - 1;
  }
  void add_edge(int from, std::uint32_t sym, int to) { out[static_cast<std::size_t>(from)].push_back({sym, to}); }

  bool accepts_symbols(const std::vector<std::uint32_t>& word) const {
    std::vector<char> cur(out.size(), 0), next(out.size(), 0);
    cur[static_cast<std::size_t>(initial)] = 1;
    for (auto sym : word) {
      std::fill(next.begin(), next.end(), 0);
      for (std::size_t q = 0; q < out.size(); ++q)
        if (cur[q])
          for (const auto& [s, t] : out[q])
            if (s == sym) next[static_cast<std::size_t>(t)] = 1;
      std::swap(cur, next);
    }
    for (std::size_t q = 0; q < out.size(); ++q)
      if (cur[q] && accepting[q]) return true;
    return false;
  }
};

/// LSB-first encoding of a tuple of naturals, `extra` zero symbols appended.
inline std::vector<std::uint32_t> encode_tuple(const Vector& v, std::size_t extra = 0) {
  std::size_t len = 0;
  for (auto x : v) {
    if (x < 0) throw Error("tuple entries must be natural numbers");
    std::size_t bits = 0;
    for (auto y = static_cast<std::uint64_t>(x); y; y >>= 1) ++bits;
    len = std::max(len, bits);
  }
  std::vector<std::uint32_t> word(len + extra, 0);
  for (std::size_t t = 0; t < len; ++t)
    for (std::size_t i = 0; i < v.size(); ++i)
      if ((static_cast<std::uint64_t>(v[i]) >> t) & 1u) word[t] |= 1u << i;
  return word;
}

inline Vector decode_tuple(const std::vector<std::uint32_t>& word, int tracks) {
  Vector v(static_cast<std::size_t>(tracks), 0);
  for (std::size_t t = word.size(); t-- > 0;)
    for (int i = 0; i < tracks; ++i) v[static_cast<std::size_t>(i)] = 2 * v[static_cast<std::size_t>(i)] + ((word[t] >> i) & 1u);
  return v;
}

inline bool accepts_tuple(const TupleAutomaton& a, const Vector& v) {
  if (static_cast<int>(v.size()) != a.tracks)
    throw TrackMismatch("tuple of dimension " + std::to_string(v.size()) + " for a " + std::to_string(a.tracks) + "-track automaton");
  return a.accepts_symbols(encode_tuple(v));
}

/// Deterministic automaton for {x ∈ ℕ^m : a·x = c}. States are residuals s;
/// reading β moves s to (s - a·β)/2 when that is even. Start c, accept 0.
inline TupleAutomaton equation_automaton(const Vector& a, std::int64_t c) {
  TupleAutomaton A;
  A.tracks = static_cast<int>(a.size());
  if (A.tracks > 24) throw Error("too many tracks");
  std::unordered_map<std::int64_t, int> id;
  std::deque<std::int64_t> work;
  auto intern = [&](std::int64_t s) {
    auto [it, fresh] = id.emplace(s, A.size());
    if (fresh) {
      A.add_state(s == 0);
      work.push_back(s);
    }
    return it->second;
  };
  A.initial = intern(c);
  while (!work.empty()) {
    std::int64_t s = work.front();
    work.pop_front();
    int from = id.at(s);
    for (std::uint32_t beta = 0; beta < A.symbols(); ++beta) {
      std::int64_t dot = 0;
      for (int i = 0; i < A.tracks; ++i)
        if ((beta >> i) & 1u) dot += a[static_cast<std::size_t>(i)];
      std::int64_t t = s - dot;
      if (t % 2 != 0) continue;
      A.add_edge(from, beta, intern(t / 2));
    }
  }
  return A;
}

/// Intersection. Both sides must have the same track count.
inline TupleAutomaton product(const TupleAutomaton& a, const TupleAutomaton& b) {
  if (a.tracks != b.tracks) throw TrackMismatch("product of " + std::to_string(a.tracks) + "- and " + std::to_string(b.tracks) + "-track automata");
  TupleAutomaton r;
  r.tracks = a.tracks;
  r.deterministic = a.deterministic && b.deterministic;
  std::map<std::pair<int, int>, int> id;
  std::deque<std::pair<int, int>> work;
  auto intern = [&](int p, int q) {
    auto [it, fresh] = id.emplace(std::make_pair(p, q), r.size());
    if (fresh) {
      r.add_state(a.accepting[static_cast<std::size_t>(p)] && b.accepting[static_cast<std::size_t>(q)]);
      work.emplace_back(p, q);
    }
    return it->second;
  };
  r.initial = intern(a.initial, b.initial);
  while (!work.empty()) {
    auto [p, q] = work.front();
    work.pop_front();
    int from = id.at({p, q});
    for (const auto& [s1, t1] : a.out[static_cast<std::size_t>(p)])
      for (const auto& [s2, t2] : b.out[static_cast<std::size_t>(q)])
        if (s1 == s2) r.add_edge(from, s1, intern(t1, t2));
  }
  return r;
}

/// Nondeterministic union over a fresh initial state.
inline TupleAutomaton union_of(const TupleAutomaton& a, const TupleAutomaton& b) {
  if (a.tracks != b.tracks) throw TrackMismatch("union of " + std::to_string(a.tracks) + "- and " + std::to_string(b.tracks) + "-track automata");
  TupleAutomaton r;
  r.tracks = a.tracks;
  r.deterministic = false;
  r.initial = r.add_state(a.accepting[static_cast<std::size_t>(a.initial)] || b.accepting[static_cast<std::size_t>(b.initial)]);
  auto copy = [&](const TupleAutomaton& x) {
    int base = r.size();
    for (int q = 0; q < x.size(); ++q) r.add_state(x.accepting[static_cast<std::size_t>(q)]);
    for (int q = 0; q < x.size(); ++q)
      for (const auto& [s, t] : x.out[static_cast<std::size_t>(q)]) r.add_edge(base + q, s, base + t);
    for (const auto& [s, t] : x.out[static_cast<std::size_t>(x.initial)]) r.add_edge(r.initial, s, base + t);
  };
  copy(a);
  copy(b);
  return r;
}

/// Keeps the listed tracks (in the given order) and existentially quantifies
/// the others. The dropped tracks may need more bits than the kept ones, so a
/// state also accepts when it reaches acceptance on symbols that are zero on
/// every kept track.
inline TupleAutomaton project_tracks(const TupleAutomaton& a, const std::vector<int>& keep) {
  for (int t : keep)
    if (t < 0 || t >= a.tracks) throw TrackMismatch("track " + std::to_string(t) + " out of range");
  TupleAutomaton r;
  r.tracks = static_cast<int>(keep.size());
  r.deterministic = false;
  r.initial = a.initial;
  r.out.resize(a.out.size());
  r.accepting = a.accepting;
  auto map_sym = [&](std::uint32_t s) {
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < keep.size(); ++i)
      if ((s >> keep[i]) & 1u) m |= 1u << i;
    return m;
  };
  for (int q = 0; q < a.size(); ++q) {
    std::set<std::pair<std::uint32_t, int>> seen;
    for (const auto& [s, t] : a.out[static_cast<std::size_t>(q)])
      if (seen.insert({map_sym(s), t}).second) r.add_edge(q, map_sym(s), t);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int q = 0; q < r.size(); ++q) {
      if (r.accepting[static_cast<std::size_t>(q)]) continue;
      for (const auto& [s, t] : r.out[static_cast<std::size_t>(q)])
        if (s == 0 && r.accepting[static_cast<std::size_t>(t)]) {
          r.accepting[static_cast<std::size_t>(q)] = true;
          changed = true;
          break;
        }
    }
  }
  return r;
}

/// Subset construction; the result is complete (the empty subset is a sink).
inline TupleAutomaton determinize(const TupleAutomaton& a) {
  TupleAutomaton r;
  r.tracks = a.tracks;
  r.deterministic = true;
  std::map<std::vector<int>, int> id;
  std::vector<std::vector<int>> subsets;
  auto intern = [&](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    auto [it, fresh] = id.emplace(s, r.size());
    if (fresh) {
      bool acc = std::any_of(s.begin(), s.end(), [&](int q) { return a.accepting[static_cast<std::size_t>(q)]; });
      r.add_state(acc);
      subsets.push_back(std::move(s));
    }
    return it->second;
  };
  r.initial = intern({a.initial});
  std::vector<std::vector<int>> by_symbol(a.symbols());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (auto& v : by_symbol) v.clear();
    for (int q : subsets[i])
      for (const auto& [s, t] : a.out[static_cast<std::size_t>(q)]) by_symbol[s].push_back(t);
    for (std::uint32_t s = 0; s < a.symbols(); ++s) {
      int t = intern(by_symbol[s]);
      r.add_edge(static_cast<int>(i), s, t);
    }
  }
  return r;
}

inline bool is_complete_dfa(const TupleAutomaton& a) {
  if (!a.deterministic) return false;
  for (const auto& edges : a.out) {
    if (edges.size() != a.symbols()) return false;
    std::vector<char> seen(a.symbols(), 0);
    for (const auto& [s, t] : edges) {
      if (seen[s]) return false;
      seen[s] = 1;
    }
  }
  return true;
}

/// Complement relative to all tuples of the same dimension.
inline TupleAutomaton complement(const TupleAutomaton& a) {
  TupleAutomaton r = is_complete_dfa(a) ? a : determinize(a);
  for (std::size_t q = 0; q < r.accepting.size(); ++q) r.accepting[q] = !r.accepting[q];
  return r;
}

/// Moore partition refinement on a complete DFA, restricted to reachable states.
inline TupleAutomaton minimize(const TupleAutomaton& in) {
  TupleAutomaton a = is_complete_dfa(in) ? in : determinize(in);
  const std::uint32_t nsym = a.symbols();
  std::vector<std::vector<int>> delta(a.out.size(), std::vector<int>(nsym, -1));
  for (std::size_t q = 0; q < a.out.size(); ++q)
    for (const auto& [s, t] : a.out[q]) delta[q][s] = t;

  std::vector<int> order{a.initial};
  std::vector<char> seen(a.out.size(), 0);
  seen[static_cast<std::size_t>(a.initial)] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int t : delta[static_cast<std::size_t>(order[i])])
      if (!seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        order.push_back(t);
      }

  std::vector<int> cls(a.out.size(), 0);
  for (int q : order) cls[static_cast<std::size_t>(q)] = a.accepting[static_cast<std::size_t>(q)] ? 1 : 0;
  std::size_t count = 0;
  for (;;) {
    std::map<std::vector<int>, int> sig;
    std::vector<int> next(a.out.size(), 0);
    for (int q : order) {
      std::vector<int> key{cls[static_cast<std::size_t>(q)]};
      for (int t : delta[static_cast<std::size_t>(q)]) key.push_back(cls[static_cast<std::size_t>(t)]);
      auto [it, fresh] = sig.emplace(std::move(key), static_cast<int>(sig.size()));
      next[static_cast<std::size_t>(q)] = it->second;
    }
    bool stable = sig.size() == count;
    count = sig.size();
    cls = std::move(next);
    if (stable) break;
  }
  TupleAutomaton r;
  r.tracks = a.tracks;
  r.deterministic = true;
  std::vector<int> rep(count, -1);
  for (int q : order)
    if (rep[static_cast<std::size_t>(cls[static_cast<std::size_t>(q)])] < 0) rep[static_cast<std::size_t>(cls[static_cast<std::size_t>(q)])] = q;
  for (std::size_t c = 0; c < count; ++c) r.add_state(a.accepting[static_cast<std::size_t>(rep[c])]);
  for (std::size_t c = 0; c < count; ++c)
    for (std::uint32_t s = 0; s < nsym; ++s)
      r.add_edge(static_cast<int>(c), s, cls[static_cast<std::size_t>(delta[static_cast<std::size_t>(rep[c])][s])]);
  r.initial = cls[static_cast<std::size_t>(a.initial)];
  return r;
}

/// Emptiness test: nullopt if the language is empty, otherwise a member
/// with a shortest encoding.
inline std::optional<Vector> shortest_member(const TupleAutomaton& a) {
  std::vector<int> parent(a.out.size(), -2);
  std::vector<std::uint32_t> via(a.out.size(), 0);
  std::deque<int> work{a.initial};
  parent[static_cast<std::size_t>(a.initial)] = -1;
  while (!work.empty()) {
    int q = work.front();
    work.pop_front();
    if (a.accepting[static_cast<std::size_t>(q)]) {
      std::vector<std::uint32_t> word;
      for (int x = q; parent[static_cast<std::size_t>(x)] >= 0; x = parent[static_cast<std::size_t>(x)]) word.push_back(via[static_cast<std::size_t>(x)]);
      std::reverse(word.begin(), word.end());
      return decode_tuple(word, a.tracks);
    }
    auto edges = a.out[static_cast<std::size_t>(q)];
    std::sort(edges.begin(), edges.end());
    for (const auto& [s, t] : edges)
      if (parent[static_cast<std::size_t>(t)] == -2) {
        parent[static_cast<std::size_t>(t)] = q;
        via[static_cast<std::size_t>(t)] = s;
        work.push_back(t);
      }
  }
  return std::nullopt;
}

/// Checks the padding law on one encoding: accepted with and without `extra`
/// trailing zero symbols alike.
inline bool padding_consistent(const TupleAutomaton& a, const Vector& v, std::size_t extra = 3) {
  return a.accepts_symbols(encode_tuple(v)) == a.accepts_symbols(encode_tuple(v, extra));
}

}  // namespace idxgram
