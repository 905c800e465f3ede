#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace idxgram;

namespace {

CounterMachine machine(const std::string& name) {
  return parse_machine(read_file(std::string(IDXGRAM_FIXTURE_DIR) + "/ncm/" + name + ".ncm"));
}
IndexedGrammar fixture(const std::string& name) { return load_grammar(read_file(std::string(IDXGRAM_FIXTURE_DIR) + "/" + name + ".ig")); }

const char* const kMachines[] = {"anbn", "anbncn", "twoblocks", "all", "none", "pump"};

}  // namespace

TEST_CASE("simulator examples") {
  auto anbn = machine("anbn");
  auto yes = ncm_run(anbn, parse_word("aabb"));
  CHECK(yes.status == Status::Proven);
  CHECK(audit_run(anbn, parse_word("aabb"), yes.trace));
  CHECK(ncm_run(anbn, parse_word("aab")).status == Status::Refuted);
  auto abc = machine("anbncn");
  CHECK(ncm_run(abc, parse_word("abc")).status == Status::Proven);
  CHECK(ncm_run(abc, parse_word("abcc")).status == Status::Refuted);
  for (const auto& w : oracle::all_words({"a", "b"}, 4)) CHECK(ncm_run(machine("none"), w).status == Status::Refuted);
  CHECK(ncm_run(machine("all"), parse_word("abba")).status == Status::Proven);
  CHECK(ncm_run(machine("pump"), parse_word("bbb")).status == Status::Proven);
  CHECK(ncm_run(machine("pump"), parse_word("ab")).status == Status::Refuted);
}

TEST_CASE("trace audit rejects tampered runs") {
  auto m = machine("anbn");
  auto r = ncm_run(m, parse_word("ab"));
  REQUIRE(r.status == Status::Proven);
  CHECK(audit_run(m, parse_word("ab"), r.trace));
  CHECK_FALSE(audit_run(m, parse_word("aab"), r.trace));
  auto shorter = r.trace;
  shorter.pop_back();
  CHECK_FALSE(audit_run(m, parse_word("ab"), shorter));
  // decrementing at zero
  std::size_t down = 0;
  for (std::size_t i = 0; i < m.transitions.size(); ++i)
    if (!m.transitions[i].deltas.empty() && m.transitions[i].deltas[0] < 0) down = i;
  CHECK_FALSE(audit_run(m, parse_word("b"), {1, down}));
}

TEST_CASE("reversal bounds are enforced") {
  // anbn with its bound lowered to 0 can never decrement
  auto m = machine("anbn");
  m.reversals = {0};
  CHECK(ncm_run(m, parse_word("ab")).status == Status::Refuted);
  CHECK(ncm_run(m, Word{}).status == Status::Proven);
  auto two = machine("twoblocks");
  CHECK(ncm_run(two, parse_word("abab")).status == Status::Proven);
  two.reversals = {1};
  CHECK(ncm_run(two, parse_word("abab")).status == Status::Refuted);
  CHECK(ncm_run(two, parse_word("ab")).status == Status::Proven);
}

TEST_CASE("simulator agrees with the recursive oracle") {
  for (auto name : kMachines) {
    CAPTURE(name);
    auto m = machine(name);
    for (const auto& w : oracle::all_words(m.alphabet, 8)) {
      CAPTURE(format_word(w));
      auto r = ncm_run(m, w);
      REQUIRE(r.status != Status::Unknown);
      CHECK((r.status == Status::Proven) == oracle::accepts(m, w));
      if (r.status == Status::Proven) CHECK(audit_run(m, w, r.trace));
    }
  }
}

TEST_CASE("reduction to 1-reversal counters") {
  SECTION("three reversals become two counters") {
    auto m = machine("twoblocks");
    auto one = to_one_reversal(m);
    CHECK(one.counters == 2);
    CHECK(one.reversals == std::vector<std::size_t>{1, 1});
    for (const auto& w : oracle::all_words(m.alphabet, 8)) {
      CAPTURE(format_word(w));
      CHECK(oracle::accepts(one, w) == oracle::accepts(m, w));
    }
  }
  SECTION("1-reversal machines are unchanged") {
    for (auto name : {"anbn", "anbncn", "all", "none"}) {
      auto m = machine(name);
      auto one = to_one_reversal(m);
      CHECK(serialize_machine(one) == serialize_machine(m));
    }
  }
  SECTION("a monotone counter stays one counter") {
    auto m = machine("pump");
    auto one = to_one_reversal(m);
    CHECK(one.counters == 1);
    for (const auto& w : oracle::all_words(m.alphabet, 8)) CHECK(oracle::accepts(one, w) == oracle::accepts(m, w));
  }
  SECTION("higher bounds") {
    auto m = machine("twoblocks");
    m.reversals = {4};
    auto one = to_one_reversal(m);
    CHECK(one.counters == 3);
    for (const auto& w : oracle::all_words(m.alphabet, 7)) CHECK(oracle::accepts(one, w) == oracle::accepts(m, w));
  }
}

TEST_CASE("expansion satisfies conditions (1)-(2)") {
  CHECK_THROWS_AS(expand_to_nfa(machine("twoblocks"), counter_letters(machine("twoblocks"))), NotOneReversal);
  for (auto name : kMachines) {
    CAPTURE(name);
    auto m = to_one_reversal(machine(name));
    auto l = counter_letters(m);
    auto nfa = expand_to_nfa(m, l);
    auto d = determinize(nfa, oracle::expanded_alphabet(m, l));
    auto live = oracle::live_states(d);
    for (const auto& x : oracle::all_words(m.alphabet, 8)) {
      CAPTURE(format_word(x));
      auto cap = 2 * static_cast<std::int64_t>(x.size()) + 4;
      CHECK(oracle::expansion_accepts(d, live, m, l, x, cap) == oracle::accepts(m, x, cap));
    }
  }
  SECTION("machine accepting only ε") {
    auto m = parse_machine("states: q\nalphabet: a\ncounters: 1\nreversals: 1\ninitial: q\nhalt: q\n");
    auto l = counter_letters(m);
    auto nfa = expand_to_nfa(m, l);
    CHECK(oracle::nfa_accepts(nfa, Word{}));
    CHECK_FALSE(oracle::nfa_accepts(nfa, parse_word("a")));
  }
  SECTION("increments with no way back cannot balance") {
    auto m = parse_machine("states: q\nalphabet: a\ncounters: 1\nreversals: 1\ninitial: q\nhalt: q\ntrans: q, a, (*) -> q, (+)\n");
    auto l = counter_letters(m);
    auto d = determinize(expand_to_nfa(m, l), oracle::expanded_alphabet(m, l));
    for (const auto& x : oracle::all_words({"a"}, 5)) CHECK(oracle::expansion_accepts(d, oracle::live_states(d), m, l, x, 12) == x.empty());
  }
  SECTION("letters are fresh") {
    auto m = parse_machine("states: q\nalphabet: p1, q1\ncounters: 1\nreversals: 1\ninitial: q\nhalt: q\n");
    auto l = counter_letters(m);
    CHECK(l.inc[0] != "p1");
    CHECK(l.dec[0] != "q1");
  }
}

TEST_CASE("Parikh image of the intersection") {
  auto brute = [](const IndexedGrammar& g, const CounterMachine& m, std::size_t radius) {
    std::set<Vector> out;
    for (const auto& w : oracle::language(g, radius, 5, radius + 2))
      if (oracle::accepts(m, w)) out.insert(parikh(w, m.alphabet));
    return out;
  };
  SECTION("(a+b)* against a^n b^n") {
    auto p = parikh_of_intersection(fixture("abstar"), machine("anbn"), 6);
    CHECK(p.exhausted);
    CHECK(p.pipeline == std::set<Vector>{{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  }
  SECTION("a machine accepting everything is neutral") {
    auto g = fixture("anbn");
    auto p = parikh_of_intersection(g, machine("all"), 6);
    std::set<Vector> expect;
    for (const auto& w : enumerate_language(g, 6, {}).words) expect.insert(parikh(w, {"a", "b"}));
    CHECK(p.pipeline == expect);
  }
  SECTION("empty grammar") {
    auto p = parikh_of_intersection(fixture("empty"), machine("all"), 6);
    CHECK(p.pipeline.empty());
  }
  SECTION("pipeline equals brute force on fixture pairs") {
    const std::pair<const char*, const char*> pairs[] = {
        {"abstar", "anbn"}, {"abstar", "twoblocks"}, {"abstar", "pump"}, {"abstar", "none"}, {"abn", "anbn"},
        {"anbn", "twoblocks"}, {"copy", "all"},     {"abc", "anbncn"},  {"eps", "anbn"}, {"ex1", "pump"}, {"copy", "anbn"}};
    for (auto [gname, mname] : pairs) {
      CAPTURE(gname, mname);
      auto g = fixture(gname);
      auto m = machine(mname);
      auto p = parikh_of_intersection(g, m, 6);
      CHECK(p.exhausted);
      CHECK(p.agree);
      CHECK_FALSE(p.simulator_unknown);
      CHECK(p.pipeline == brute(g, m, 6));
    }
  }
  SECTION("alphabet mismatch is an error") {
    CHECK_THROWS_AS(parikh_of_intersection(fixture("abc"), machine("anbn"), 4), Error);
  }
}

TEST_CASE("machine text format") {
  for (auto name : kMachines) {
    CAPTURE(name);
    auto m = machine(name);
    CHECK(serialize_machine(parse_machine(serialize_machine(m))) == serialize_machine(m));
  }
  CHECK_THROWS_AS(parse_machine("states: q\nalphabet: a\ncounters: 1\ninitial: q\nhalt: q\ntrans: q, a, (z,z) -> q, (+)\n"), Error);
  CHECK_THROWS_AS(parse_machine("states: q\nalphabet: a\ncounters: 1\ninitial: q\nhalt: q\ntrans: q, a, (z) -> q, (2)\n"), Error);
}
