#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace idxgram;

namespace {

EtolSystem etol(const std::string& name) {
  return parse_etol(read_file(std::string(IDXGRAM_FIXTURE_DIR) + "/etol/" + name + ".etol"));
}

const char* const kAnf[] = {"anbn", "ab", "apbp", "copy", "anbncn", "dyck1"};

/// A table-name stack as deep as the longest shortest derivation of the
/// listed words is enough for the converted grammar to reach all of them.
std::size_t stack_needed(const EtolSystem& sys, const std::vector<Word>& words) {
  std::size_t depth = 1;
  for (const auto& w : words) {
    auto d = etol_derivation_length(sys, w);
    REQUIRE(d);
    depth = std::max(depth, *d);
  }
  return depth;
}

}  // namespace

TEST_CASE("parallel steps") {
  auto sys = etol("anbn");
  CHECK(etol_step(sys, parse_word("S"), 0, {0}) == parse_word("a S b"));
  CHECK(etol_step(sys, parse_word("a S b"), 1, {0, 0, 0}) == parse_word("ab"));
  auto two = parse_etol("axiom: S\nterminals: a, b\ntable t:\n  rule: S -> a\n  rule: S -> b\n");
  auto ab = etol_step(two, parse_word("S S"), 0, {0, 1});
  CHECK(ab == parse_word("ab"));
}

TEST_CASE("active normal form") {
  for (auto name : kAnf) {
    CAPTURE(name);
    CHECK(check_anf(etol(name)).empty());
  }
  auto bad = check_anf(etol("notanf"));
  CHECK(std::find(bad.begin(), bad.end(), "terminal a is active") != bad.end());
  CHECK(std::find(bad.begin(), bad.end(), "inactive non-terminal U") != bad.end());
  CHECK_THROWS_AS(etol_to_indexed(etol("notanf")), NotInANF);
}

TEST_CASE("enumeration agrees with plain rewriting") {
  for (auto name : kAnf) {
    CAPTURE(name);
    auto sys = etol(name);
    auto e = etol_enumerate(sys, 8);
    CHECK(e.exhausted());
    CHECK(oracle::to_set(e.words) == oracle::etol_language(sys, 8, 12));
  }
  auto anbn = etol_enumerate(etol("anbn"), 10).words;
  CHECK(anbn.size() == 6);
  auto term = parse_etol("axiom: a\nterminals: a\ntable t:\n");
  CHECK(etol_enumerate(term, 4).words == std::vector<Word>{parse_word("a")});
  auto stuck = parse_etol("axiom: S\nterminals: a\ntable t:\n  rule: S -> S\n");
  CHECK(etol_enumerate(stuck, 4).words.empty());
}

TEST_CASE("converted grammars generate the same language") {
  for (auto name : kAnf) {
    CAPTURE(name);
    auto sys = etol(name);
    auto g = etol_to_indexed(sys);
    CHECK(validate(g).empty());
    CHECK(g.indices.size() == sys.tables.size());
    const std::size_t n = 10;
    auto e = etol_enumerate(sys, n);
    Budget b;
    b.max_steps = 200;
    b.max_stack = stack_needed(sys, e.words);
    CHECK(oracle::to_set(enumerate_language(g, n, b).words) == oracle::to_set(e.words));
  }
  SECTION("single word") {
    auto g = etol_to_indexed(etol("ab"));
    CHECK(enumerate_language(g, 6, {}).words == std::vector<Word>{parse_word("ab")});
  }
}

TEST_CASE("table order does not matter") {
  auto sys = etol("dyck1");
  auto flipped = sys;
  std::reverse(flipped.tables.begin(), flipped.tables.end());
  auto e = etol_enumerate(sys, 8);
  Budget b;
  b.max_steps = 200;
  b.max_stack = stack_needed(sys, e.words);
  CHECK(enumerate_language(etol_to_indexed(flipped), 8, b).words == enumerate_language(etol_to_indexed(sys), 8, b).words);
}

TEST_CASE("converted derivations stay within twice the ET0L index") {
  for (auto name : {"anbn", "ab", "apbp", "copy", "dyck1"}) {
    CAPTURE(name);
    auto sys = etol(name);
    auto g = etol_to_indexed(sys);
    for (const auto& w : etol_enumerate(sys, 6).words) {
      CAPTURE(format_word(w));
      auto k = etol_index(sys, w);
      REQUIRE(k.status == Status::Proven);
      Budget b;
      b.max_stack = *etol_derivation_length(sys, w);
      auto m = min_index(g, w, b);
      REQUIRE(m.witness);
      CHECK(replay(g, *m.witness));
      CHECK(m.value <= 2 * k.value);
    }
  }
  SECTION("index-1 system needs width at most 2") {
    auto sys = etol("anbn");
    auto g = etol_to_indexed(sys);
    for (const auto& w : etol_enumerate(sys, 10).words) CHECK(min_index(g, w, {}).value <= 2);
  }
}

TEST_CASE("ET0L index measurements") {
  CHECK(etol_index(etol("anbn"), parse_word("aabb")).value == 1);
  CHECK(etol_index(etol("apbp"), parse_word("aab")).value == 2);
  CHECK(etol_index(etol("anbncn"), parse_word("abc")).value == 3);
  CHECK(etol_index(etol("anbn"), parse_word("aab")).status == Status::Refuted);
}
