#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace idxgram;

namespace {

IndexedGrammar fixture(const std::string& name) { return load_grammar(read_file(std::string(IDXGRAM_FIXTURE_DIR) + "/" + name + ".ig")); }

oracle::WordSet words(const Enumeration& e) { return oracle::to_set(e.words); }

/// Least k for which the naive all-positions search with width cap k derives w.
std::optional<std::size_t> oracle_min_index(const IndexedGrammar& g, const Word& w) {
  for (std::size_t k = 1; k <= 10; ++k)
    if (oracle::language(g, w.size(), k, w.size() + 2).count(w)) return k;
  return std::nullopt;
}

Derivation require_witness(const IndexedGrammar& g, const std::optional<Derivation>& d, const Word& w) {
  REQUIRE(d);
  CHECK(replay(g, *d));
  CHECK(d->last().is_terminal());
  CHECK(d->last().yield() == w);
  return *d;
}

struct Case {
  const char* name;
  std::size_t len;
  std::size_t width;  // oracle width cap, at least the index the words need
};

// fixture, and the length up to which the naive oracle stays cheap
const Case kCases[] = {{"sec5", 7, 7}, {"ex1", 8, 5}, {"anbn", 8, 2}, {"astar", 6, 2}, {"bstar", 6, 2}, {"abstar", 5, 2},
                       {"abn", 8, 2}, {"empty", 6, 4}, {"eps", 6, 2}, {"abc", 6, 6}, {"copy", 6, 4}, {"aa", 4, 2}};

}  // namespace

TEST_CASE("enumeration examples") {
  auto e = enumerate_language(fixture("sec5"), 14, {});
  CHECK(e.exhausted());
  CHECK(e.words == std::vector<Word>{parse_word("$"), parse_word("abc$abc"), parse_word("aabbcc$aabbcc")});

  auto x = enumerate_language(fixture("ex1"), 8, {});
  CHECK(x.words == std::vector<Word>{parse_word("abaa"), parse_word("abaabaaa")});

  auto eps = enumerate_language(fixture("eps"), 5, {});
  CHECK(eps.words == std::vector<Word>{Word{}});
  CHECK(enumerate_language(fixture("empty"), 6, {}).words.empty());
}

TEST_CASE("enumeration agrees with the naive rewriting oracle") {
  for (const auto& c : kCases) {
    CAPTURE(c.name);
    auto g = fixture(c.name);
    Budget b;
    b.max_steps = 200;
    auto e = enumerate_language(g, c.len, b);
    CHECK(e.exhausted());
    // every consume in these fixtures sits beside a variable that emits a letter
    // for the same index, so stacks deeper than the word are never completed
    CHECK(words(e) == oracle::language(g, c.len, c.width, c.len + 2));
  }
}

TEST_CASE("enumeration is deterministic and monotone in the budget") {
  auto g = fixture("copy");
  Budget small;
  small.max_steps = 6;
  Budget big;
  big.max_steps = 40;
  auto a = enumerate_language(g, 8, small), b = enumerate_language(g, 8, small), c = enumerate_language(g, 8, big);
  CHECK(a.words == b.words);
  CHECK_FALSE(a.exhausted());
  for (const auto& w : a.words) CHECK(std::binary_search(c.words.begin(), c.words.end(), w, ShortLex{}));
  CHECK(c.words.size() > a.words.size());
}

TEST_CASE("membership examples") {
  auto ex1 = fixture("ex1");
  Budget b;
  b.max_steps = 40;
  auto yes = membership(ex1, parse_word("abaa"), b);
  CHECK(yes.status == Status::Proven);
  require_witness(ex1, yes.witness, parse_word("abaa"));
  CHECK(membership(ex1, parse_word("abab"), b).status == Status::Refuted);
  CHECK(membership(fixture("anbn"), Word{"c"}, b).status == Status::Refuted);

  SECTION("capped searches say Unknown unless the caps are declared exact") {
    Budget capped = b;
    capped.max_stack = 1;
    auto v = membership(ex1, parse_word("abaab"), capped);
    CHECK(v.flags.stack_cap_hit);
    CHECK(v.status == Status::Unknown);
    CHECK(membership(ex1, parse_word("abaab"), capped, true).status == Status::Refuted);
  }
}

TEST_CASE("membership is Proven exactly on enumerated words") {
  for (auto name : {"sec5", "ex1", "anbn", "abn", "copy", "abc", "eps", "empty"}) {
    CAPTURE(name);
    auto g = fixture(name);
    const std::size_t n = 5;
    auto listed = words(enumerate_language(g, n, {}));
    for (const auto& w : oracle::all_words(g.terminals, n)) {
      auto v = membership(g, w, {});
      CAPTURE(format_word(w));
      CHECK(v.status == (listed.count(w) ? Status::Proven : Status::Refuted));
      if (v.witness) require_witness(g, v.witness, w);
    }
  }
}

TEST_CASE("min_index examples") {
  auto sec5 = fixture("sec5");
  auto m = min_index(sec5, parse_word("abc$abc"), {});
  CHECK(m.status == Status::Proven);
  CHECK(m.value == 7);
  CHECK(require_witness(sec5, m.witness, parse_word("abc$abc")).index() == 7);

  auto ex1 = fixture("ex1");
  auto a = min_index(ex1, parse_word("abaa"), {});
  CHECK(a.status == Status::Proven);
  CHECK(a.value == 3);

  auto eps = min_index(fixture("eps"), Word{}, {});
  CHECK(eps.value == 1);
  CHECK_THROWS_AS(min_index(ex1, parse_word("abab"), {}), NotAMember);
}

TEST_CASE("min_index matches the width-capped oracle") {
  for (auto name : {"ex1", "anbn", "abc", "copy", "abstar"}) {
    CAPTURE(name);
    auto g = fixture(name);
    for (const auto& w : enumerate_language(g, 6, {}).words) {
      CAPTURE(format_word(w));
      auto m = min_index(g, w, {});
      CHECK(m.status == Status::Proven);
      CHECK(m.value == oracle_min_index(g, w));
      CHECK(require_witness(g, m.witness, w).index() == m.value);
    }
  }
}

TEST_CASE("min_index is Unknown when a smaller width cannot be ruled out") {
  auto sec5 = fixture("sec5");
  Budget tight;
  tight.max_steps = 64;
  tight.max_width = 3;
  auto m = min_index(sec5, parse_word("abc$abc"), tight);
  CHECK(m.status == Status::Unknown);
  CHECK(m.value == 7);
}

TEST_CASE("special_count_min") {
  CHECK(special_count_min(fixture("sec5"), parse_word("abc$abc"), {}).value == 1);
  CHECK(special_count_min(fixture("sec5"), parse_word("$"), {}).value == 1);
  CHECK(special_count_min(fixture("anbn"), parse_word("aabb"), {}).value == 0);
  auto ex1 = fixture("ex1");
  auto s = special_count_min(ex1, parse_word("abaabaaa"), {});
  CHECK(s.value == 2);
  CHECK(require_witness(ex1, s.witness, parse_word("abaabaaa")).special_count(ex1) == 2);
}

TEST_CASE("check_uncontrolled") {
  auto ex1 = fixture("ex1");
  auto v = check_uncontrolled(ex1, 3, {});
  CHECK(v.status == Status::Refuted);
  auto d = require_witness(ex1, v.witness, v.witness ? v.witness->last().yield() : Word{});
  CHECK(d.index() > 3);

  auto right_linear = parse_grammar("grammar r\nvariables: S\nterminals: a\nstart: S\nprod: S -> a S\nprod: S -> a\n");
  CHECK(check_uncontrolled(right_linear, 1, {}).status == Status::Proven);

  SECTION("union of uncontrolled inputs") {
    auto u = union_grammars(fixture("anbn"), fixture("abn"));
    CHECK(check_uncontrolled(u, 1, {}).status == Status::Proven);
  }
  SECTION("a finite grammar with one special production is searched out") {
    auto g = parse_grammar("grammar f\nvariables: S, A\nterminals: a\nstart: S\nprod: S -> A A\nprod: A -> a\n");
    CHECK(check_uncontrolled(g, 2, {}).status == Status::Proven);
    auto w = check_uncontrolled(g, 1, {});
    CHECK(w.status == Status::Refuted);
    REQUIRE(w.witness);
    CHECK(replay(g, *w.witness));
  }
  SECTION("sec5 needs width 7") {
    Budget b;
    b.max_steps = 40;
    CHECK(check_uncontrolled(fixture("sec5"), 6, b).status == Status::Refuted);
  }
}

TEST_CASE("trace format") {
  auto g = fixture("anbn");
  auto v = membership(g, parse_word("ab"), {});
  REQUIRE(v.witness);
  auto t = format_trace(*v.witness);
  CHECK(t.find(" @ ") != std::string::npos);
  CHECK(t.find(" | ") != std::string::npos);
}
