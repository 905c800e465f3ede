#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace idxgram;

namespace {

SemilinearFile sls(const std::string& name) {
  return parse_semilinear(read_file(std::string(IDXGRAM_FIXTURE_DIR) + "/sls/" + name + ".sls"));
}

const LinearSet kSec5{{0, 0, 0, 1, 0, 0, 0}, {{1, 1, 1, 0, 1, 1, 1}}};
const GinsburgShape kSec5Shape{{{"a"}, {"b"}, {"c"}, {"$"}, {"a"}, {"b"}, {"c"}}};

GinsburgShape shape(std::initializer_list<const char*> words) {
  std::vector<Word> ws;
  for (auto w : words) ws.push_back(parse_word(w));
  return GinsburgShape(ws);
}

/// {φ(v) : v ∈ S, |φ(v)| <= n}, walking every exponent tuple that fits and
/// asking the coefficient-search oracle.
oracle::WordSet ginsburg_language(const GinsburgShape& sh, const SemilinearSet& s, std::size_t n) {
  oracle::WordSet out;
  Vector v(sh.dim(), 0);
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t used) {
    if (i == sh.dim()) {
      if (oracle::semilinear_member(v, s)) out.insert(ginsburg_apply(sh, v));
      return;
    }
    for (v[i] = 0; used + static_cast<std::size_t>(v[i]) * sh.words[i].size() <= n; ++v[i])
      walk(i + 1, used + static_cast<std::size_t>(v[i]) * sh.words[i].size());
    v[i] = 0;
  };
  walk(0, 0);
  return out;
}

}  // namespace

TEST_CASE("Parikh and Ginsburg maps") {
  CHECK(parikh(parse_word("abc$abc"), {"a", "b", "c", "$"}) == Vector{2, 2, 2, 1});
  CHECK(parikh(Word{}, {"a", "b"}) == Vector{0, 0});
  CHECK(parikh(parse_word("abaabaaa"), {"a", "b"}) == Vector{6, 2});
  CHECK_THROWS_AS(parikh(parse_word("x"), {"a"}), Error);
  CHECK(format_word(ginsburg_apply(kSec5Shape, {1, 1, 1, 1, 1, 1, 1})) == "abc$abc");
  CHECK(ginsburg_apply(kSec5Shape, Vector(7, 0)).empty());
  CHECK(format_word(ginsburg_apply(shape({"ab"}), {3})) == "ababab");
  CHECK_THROWS_AS(GinsburgShape({Word{}}), Error);
}

TEST_CASE("diophantine oracle examples") {
  CHECK(diophantine_member({3, 3, 3, 1, 3, 3, 3}, kSec5));
  CHECK_FALSE(diophantine_member({2, 3, 3, 1, 3, 3, 3}, kSec5));
  CHECK(diophantine_member(kSec5.base, kSec5));
  CHECK_THROWS_AS(diophantine_member({1, 2}, kSec5), DimensionMismatch);
}

TEST_CASE("zero periods are dropped") {
  LinearSet l{{1, 0}, {{0, 0}, {1, 2}}};
  CHECK(l.periods.size() == 1);
  CHECK_THROWS_AS(LinearSet({1, 0}, {{1}}), DimensionMismatch);
}

TEST_CASE("equation automata") {
  auto eq = equation_automaton({1, -1}, 0);
  CHECK(accepts_tuple(eq, {3, 3}));
  CHECK_FALSE(accepts_tuple(eq, {2, 3}));
  auto five = equation_automaton({1}, 5);
  for (std::int64_t x = 0; x < 40; ++x) CHECK(accepts_tuple(five, {x}) == (x == 5));
  auto twice = equation_automaton({2, -1}, 0);
  CHECK(accepts_tuple(twice, {3, 6}));
  CHECK_FALSE(accepts_tuple(twice, {3, 5}));
  CHECK_THROWS_AS(accepts_tuple(twice, {1}), TrackMismatch);

  SECTION("agrees with arithmetic on random equations") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::int64_t> coef(-3, 3), rhs(-4, 8);
    for (int round = 0; round < 40; ++round) {
      Vector a{coef(rng), coef(rng), coef(rng)};
      std::int64_t c = rhs(rng);
      auto A = equation_automaton(a, c);
      CHECK(A.deterministic);
      for (const auto& v : oracle::grid(3, 7)) {
        CHECK(accepts_tuple(A, v) == (a[0] * v[0] + a[1] * v[1] + a[2] * v[2] == c));
        CHECK(padding_consistent(A, v));
      }
    }
  }
}

TEST_CASE("automaton algebra") {
  auto eq = equation_automaton({1, -1}, 0);
  auto first = project_tracks(eq, {0});
  for (std::int64_t x = 0; x < 20; ++x) CHECK(accepts_tuple(first, {x}));

  auto nothing = equation_automaton({0}, 1);
  CHECK_FALSE(shortest_member(nothing));
  auto all = complement(nothing);
  CHECK(accepts_tuple(all, {0}));
  CHECK(shortest_member(all) == Vector{0});

  // {x even} ∩ {x = 3k}
  auto even = project_tracks(equation_automaton({1, -2}, 0), {0});
  auto triple = project_tracks(equation_automaton({1, -3}, 0), {0});
  auto both = product(even, triple);
  CHECK(accepts_tuple(both, {6}));
  CHECK_FALSE(accepts_tuple(both, {4}));
  CHECK_FALSE(accepts_tuple(both, {3}));
  auto either = union_of(even, triple);
  for (std::int64_t x = 0; x < 30; ++x) {
    CHECK(accepts_tuple(either, {x}) == (x % 2 == 0 || x % 3 == 0));
    CHECK(accepts_tuple(complement(either), {x}) != accepts_tuple(either, {x}));
    CHECK(accepts_tuple(minimize(either), {x}) == accepts_tuple(either, {x}));
    CHECK(accepts_tuple(determinize(either), {x}) == accepts_tuple(either, {x}));
  }
  CHECK(minimize(either).size() <= determinize(either).size());
  CHECK_THROWS_AS(product(eq, even), TrackMismatch);
}

TEST_CASE("set membership on fixtures") {
  auto sec5 = sls("sec5");
  REQUIRE(sec5.shape);
  CHECK(*sec5.shape == kSec5Shape);
  CHECK(sec5.set.components.at(0) == kSec5);
  CHECK(slset_member({2, 2, 2, 1, 2, 2, 2}, sec5.set));
  CHECK(slset_member({4, 4, 4, 1, 4, 4, 4}, sec5.set));
  CHECK_FALSE(slset_member(Vector(7, 0), sec5.set));
  CHECK_THROWS_AS(slset_member({1, 1}, sec5.set), DimensionMismatch);
  auto evens = sls("evens").set;
  for (const auto& v : oracle::grid(2, 8)) CHECK(slset_member(v, evens) == (v[0] % 2 == 0 || v[0] == v[1]));
}

TEST_CASE("linear set automata agree with the diophantine oracle") {
  std::mt19937 rng(17);
  for (int round = 0; round < 60; ++round) {
    std::size_t dim = 1 + round % 3;
    auto s = oracle::random_semilinear(rng, dim, 2, 3, 4);
    auto a = semilinear_automaton(s);
    for (const auto& v : oracle::grid(dim, dim == 3 ? 6 : 8)) {
      CAPTURE(serialize_semilinear(s), format_vector(v));
      bool truth = oracle::semilinear_member(v, s);
      REQUIRE(accepts_tuple(a, v) == truth);
      CHECK(diophantine_member(v, s) == truth);
      CHECK(padding_consistent(a, v));
    }
  }
}

TEST_CASE("subset, equality and emptiness") {
  auto diag = sls("diag").set, quad = sls("quadrant").set;
  CHECK(slset_subset(diag, quad).decision == Decision::Proven);
  auto back = slset_subset(quad, diag);
  CHECK(back.decision == Decision::Refuted);
  REQUIRE(back.witness);
  CHECK((*back.witness == Vector{1, 0} || *back.witness == Vector{0, 1}));
  CHECK(slset_subset(diag, diag).decision == Decision::Proven);

  SemilinearSet doubled(2, {diag.components[0], diag.components[0]});
  CHECK(slset_equal(doubled, diag).decision == Decision::Proven);
  CHECK(slset_equal(quad, diag).decision == Decision::Refuted);

  CHECK(slset_empty(SemilinearSet(2, {})).decision == Decision::Proven);
  auto ne = slset_empty(diag);
  CHECK(ne.decision == Decision::Refuted);
  CHECK(ne.witness == Vector{0, 0});
  CHECK_THROWS_AS(slset_subset(diag, sls("sec5").set), DimensionMismatch);
}

TEST_CASE("subset verdicts agree with the grid") {
  std::mt19937 rng(23);
  int proven = 0, refuted = 0;
  for (int round = 0; round < 80; ++round) {
    std::size_t dim = 1 + round % 2;
    auto s1 = oracle::random_semilinear(rng, dim, 2, 2, 3);
    auto s2 = oracle::random_semilinear(rng, dim, 2, 2, 3);
    // every third pair is a subset by construction
    if (round % 3 == 0) s2.components.insert(s2.components.end(), s1.components.begin(), s1.components.end());
    auto v = slset_subset(s1, s2);
    CAPTURE(serialize_semilinear(s1), serialize_semilinear(s2));
    bool grid_ok = true;
    for (const auto& x : oracle::grid(dim, 8))
      if (oracle::semilinear_member(x, s1) && !oracle::semilinear_member(x, s2)) grid_ok = false;
    if (v.decision == Decision::Proven) {
      ++proven;
      CHECK(grid_ok);
    } else {
      ++refuted;
      REQUIRE(v.witness);
      CHECK(oracle::semilinear_member(*v.witness, s1));
      CHECK_FALSE(oracle::semilinear_member(*v.witness, s2));
    }
  }
  CHECK(proven > 10);
  CHECK(refuted > 10);
}

TEST_CASE("bounded languages") {
  auto sec5 = sls("sec5");
  CHECK(bounded_word_member(parse_word("abc$abc"), kSec5Shape, sec5.set));
  CHECK_FALSE(bounded_word_member(parse_word("abc$ac"), kSec5Shape, sec5.set));
  CHECK(bounded_word_member(Word{}, shape({"a", "b"}), sls("diag").set));
  // ab can be read as (ab)^1 or a^1 b^1
  CHECK(bounded_word_member(parse_word("ab"), shape({"ab", "a", "b"}), SemilinearSet(LinearSet({0, 1, 1}, {}))));
  CHECK(bounded_word_member(parse_word("ab"), shape({"ab", "a", "b"}), SemilinearSet(LinearSet({1, 0, 0}, {}))));

  SECTION("identical data is Proven") {
    CHECK(bounded_lang_subset(kSec5Shape, sec5.set, kSec5Shape, sec5.set, 20).decision == Decision::Proven);
  }
  SECTION("inclusion in the full set over the same shape is decided at set level") {
    SemilinearSet full(LinearSet(Vector(7, 0), {{1, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0, 0},
                                               {0, 0, 0, 1, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0}, {0, 0, 0, 0, 0, 1, 0},
                                               {0, 0, 0, 0, 0, 0, 1}}));
    CHECK(bounded_lang_subset(kSec5Shape, sec5.set, kSec5Shape, full, 20).decision == Decision::Proven);
    // a different shape for the same language forces enumeration
    auto v = bounded_lang_subset(kSec5Shape, sec5.set, shape({"a", "b", "c", "$", "abc"}),
                                 SemilinearSet(LinearSet({0, 0, 0, 1, 0}, {{1, 1, 1, 0, 0}, {0, 0, 0, 0, 1}})), 20);
    CHECK(v.decision == Decision::Refuted);
    REQUIRE(v.witness);
    CHECK(format_word(*v.witness) == "aabbcc$aabbcc");
  }
  SECTION("a perturbed period is Refuted at n = 1") {
    SemilinearSet other(LinearSet({0, 0, 0, 1, 0, 0, 0}, {{1, 1, 1, 0, 1, 1, 2}}));
    auto v = bounded_lang_subset(kSec5Shape, sec5.set, kSec5Shape, other, 20);
    CHECK(v.decision == Decision::Refuted);
    REQUIRE(v.witness);
    CHECK(format_word(*v.witness) == "abc$abc");
  }
  SECTION("differing shapes verify up to the bound") {
    auto v = bounded_lang_subset(shape({"ab"}), SemilinearSet(LinearSet({0}, {{1}})), shape({"a", "b"}),
                                 SemilinearSet(LinearSet({0, 0}, {{1, 0}, {0, 1}})), 12);
    CHECK(v.decision == Decision::Refuted);  // abab is not in a*b*
    CHECK(format_word(*v.witness) == "abab");
    auto ok = bounded_lang_subset(shape({"aa"}), SemilinearSet(LinearSet({0}, {{1}})), shape({"a"}),
                                  SemilinearSet(LinearSet({0}, {{2}})), 12);
    CHECK(ok.decision == Decision::VerifiedUpTo);
    CHECK(ok.checked_up_to == 12);
  }
}

TEST_CASE("synthesized grammars generate φ(S)") {
  SECTION("sec5 data") {
    auto g = linear_to_grammar(kSec5Shape, kSec5);
    CHECK(validate(g).empty());
    CHECK(enumerate_language(g, 14, {}).words ==
          std::vector<Word>{parse_word("$"), parse_word("abc$abc"), parse_word("aabbcc$aabbcc")});
    CHECK(enumerate_language(semilinear_to_grammar(kSec5Shape, SemilinearSet(kSec5)), 14, {}).words ==
          enumerate_language(g, 14, {}).words);
  }
  SECTION("small cases") {
    auto astar = linear_to_grammar(shape({"a"}), LinearSet({0}, {{1}}));
    CHECK(enumerate_language(astar, 5, {}).words.size() == 6);
    auto abb = linear_to_grammar(shape({"a", "b"}), LinearSet({1, 2}, {}));
    CHECK(enumerate_language(abb, 8, {}).words == std::vector<Word>{parse_word("abb")});
    auto two = semilinear_to_grammar(shape({"a", "b"}), SemilinearSet(2, {LinearSet({1, 0}, {}), LinearSet({0, 2}, {})}));
    CHECK(validate(two).empty());
    CHECK(oracle::to_set(enumerate_language(two, 6, {}).words) == oracle::WordSet{parse_word("a"), parse_word("bb")});
    auto none = semilinear_to_grammar(shape({"a"}), SemilinearSet(1, {}));
    CHECK(validate(none).empty());
    CHECK(enumerate_language(none, 6, {}).words.empty());
  }
  SECTION("random sets against the grid") {
    std::mt19937 rng(29);
    for (int round = 0; round < 25; ++round) {
      std::size_t dim = 1 + round % 3;
      std::vector<Word> words;
      for (std::size_t i = 0; i < dim; ++i) words.push_back(parse_word(i % 2 ? "b" : (rng() % 2 ? "a" : "ab")));
      GinsburgShape sh(words);
      auto s = oracle::random_semilinear(rng, dim, 2, 2, 2);
      auto g = semilinear_to_grammar(sh, s);
      CAPTURE(serialize_semilinear(s, sh));
      CHECK(validate(g).empty());
      Budget b;
      b.max_steps = 120;
      auto e = enumerate_language(g, 7, b);
      CHECK(e.exhausted());
      CHECK(oracle::to_set(e.words) == ginsburg_language(sh, s, 7));
    }
  }
}

TEST_CASE("synthesized grammars use one special production") {
  for (auto name : {"sec5", "diag", "quadrant"}) {
    CAPTURE(name);
    auto f = sls(name);
    auto g = linear_to_grammar(*f.shape, f.set.components.at(0));
    CHECK(special_production_count(g) == 1);
    // each pushed index emits a letter and e sits at the bottom, so stacks
    // above n + 1 derive nothing of length <= n
    Budget capped;
    capped.max_stack = 11;
    auto e = enumerate_language(g, 10, capped);
    CHECK(e.words.size() == ginsburg_language(*f.shape, f.set, 10).size());
    for (const auto& w : e.words) {
      CAPTURE(format_word(w));
      auto s = special_count_min(g, w, capped);
      CHECK(s.status == Status::Proven);
      CHECK(s.value == 1);
    }
    // every derivation of a word up to length 8 stays within width k; each
    // pushed index emits a letter, so stacks above 8 lead nowhere
    Budget b;
    b.max_steps = 60;
    b.max_yield = 8;
    b.max_stack = 8;
    CHECK(check_uncontrolled(g, f.shape->dim(), b).status == Status::Proven);
  }
}

TEST_CASE("text format") {
  for (auto name : {"sec5", "diag", "quadrant", "evens"}) {
    auto f = sls(name);
    auto again = parse_semilinear(serialize_semilinear(f.set, f.shape));
    CHECK(again.set.components == f.set.components);
    CHECK(again.shape == f.shape);
  }
  CHECK_THROWS_AS(parse_semilinear("dim: 2\nlinear: base = (1,2,3)\n"), DimensionMismatch);
  CHECK_THROWS_AS(parse_semilinear("dim: 2\nlinear: base = (1,2); periods = (1,x)\n"), Error);
}
