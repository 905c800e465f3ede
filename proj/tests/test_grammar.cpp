#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"

using namespace idxgram;

namespace {

IndexedGrammar fixture(const std::string& name) { return load_grammar(read_file(std::string(IDXGRAM_FIXTURE_DIR) + "/" + name + ".ig")); }

bool has_violation(const std::vector<Violation>& vs, const std::string& text) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.message.find(text) != std::string::npos; });
}

const char* kBad = R"(grammar bad
variables: S, A
terminals: a, S
indices: f
start: S
prod: S -> A [+a]
)";

}  // namespace

TEST_CASE("sec5 grammar is valid and has 17 productions") {
  auto g = fixture("sec5");
  CHECK(validate(g).empty());
  CHECK(g.productions.size() == 17);
  CHECK(g.variables.size() == 9);
  CHECK(special_production_count(g) == 1);
}

TEST_CASE("validation reports alphabet overlap and non-index pushes") {
  auto g = parse_grammar(kBad);
  auto v = validate(g);
  CHECK(has_violation(v, "alphabets not disjoint"));
  CHECK(has_violation(v, "pushed symbol not an index"));
  CHECK_THROWS_AS(load_grammar(kBad), InvalidGrammar);
}

TEST_CASE("file format details") {
  SECTION("_ is the empty body") {
    auto g = parse_grammar("grammar e\nvariables: S\nterminals: a\nstart: S\nprod: S -> _\n");
    REQUIRE(g.productions.size() == 1);
    CHECK(g.productions[0].rhs.empty());
  }
  SECTION("duplicate start line is a syntax error") {
    CHECK_THROWS_AS(parse_grammar("grammar e\nvariables: S\nterminals: a\nstart: S\nstart: S\nprod: S -> _\n"), ParseError);
  }
  SECTION("errors carry a line number") {
    try {
      parse_grammar("grammar e\nvariables: S\nterminals: a\nstart: S\nprod: S -> [+\n");
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
  }
}

TEST_CASE("round trip on every fixture") {
  for (auto name : {"sec5", "ex1", "anbn", "astar", "bstar", "abstar", "abn", "empty", "eps", "abc", "copy", "aa"}) {
    auto g = fixture(name);
    CAPTURE(name);
    CHECK(parse_grammar(serialize_grammar(g)) == g);
  }
}

TEST_CASE("apply_production follows the three derivation cases") {
  auto g = fixture("sec5");
  auto prod = [&](const Production& p) {
    auto it = std::find(g.productions.begin(), g.productions.end(), p);
    REQUIRE(it != g.productions.end());
    return static_cast<std::size_t>(it - g.productions.begin());
  };
  const auto push_f = Production::push("Y", "Y", "f");
  const auto q = Production::plain("Y", {"X1", "X2", "X3", "X4", "X5", "X6", "X7"});
  const auto x1e = Production::consume("X1", "e", {});
  SECTION("push") {
    SententialForm f{{Item::variable("Y", {"e"})}};
    auto n = apply_production(g, f, 0, g.productions[prod(push_f)]);
    CHECK(n == SententialForm{{Item::variable("Y", {"f", "e"})}});
  }
  SECTION("plain copies the stack to every variable") {
    SententialForm f{{Item::variable("Y", {"f", "e"})}};
    auto n = apply_production(g, f, 0, g.productions[prod(q)]);
    REQUIRE(n.items.size() == 7);
    for (const auto& it : n.items) CHECK(it.stack == std::vector<Symbol>{"f", "e"});
  }
  SECTION("consume to the empty body erases the variable") {
    SententialForm f{{Item::terminal("a"), Item::variable("X1", {"e"}), Item::terminal("b")}};
    auto n = apply_production(g, f, 1, g.productions[prod(x1e)]);
    CHECK(n == SententialForm{{Item::terminal("a"), Item::terminal("b")}});
  }
  SECTION("errors") {
    SententialForm f{{Item::terminal("a"), Item::variable("X1", {})}};
    auto consume = g.productions[prod(x1e)];
    auto code = [&](std::size_t pos, const Production& p) {
      try {
        apply_production(g, f, pos, p);
      } catch (const ApplyError& e) {
        return e.code;
      }
      FAIL("no error");
      return ApplyErrorCode::PositionNotVariable;
    };
    CHECK(code(0, consume) == ApplyErrorCode::PositionNotVariable);
    CHECK(code(1, g.productions[prod(push_f)]) == ApplyErrorCode::LhsMismatch);
    CHECK(code(1, consume) == ApplyErrorCode::EmptyStackOnConsume);
    f.items[1].stack = {"f"};
    CHECK(code(1, consume) == ApplyErrorCode::TopIndexMismatch);
  }
}

TEST_CASE("successors on the sec5 grammar") {
  auto g = fixture("sec5");
  CHECK(successors(g, SententialForm::start(g)).size() == 1);
  CHECK(successors(g, SententialForm{{Item::terminal("a")}}).empty());
  CHECK(successors(g, SententialForm{{Item::variable("Y", {"e"})}}).size() == 2);
}

TEST_CASE("stack-copy, width and context laws on random forms") {
  std::mt19937 rng(7);
  for (auto name : {"sec5", "ex1", "copy", "abc"}) {
    auto g = fixture(name);
    SymbolTable tab(g);
    std::uniform_int_distribution<std::size_t> len(1, 4), stack(0, 3);
    for (int round = 0; round < 200; ++round) {
      SententialForm f;
      std::size_t n = len(rng);
      for (std::size_t i = 0; i < n; ++i) {
        if (rng() % 3 == 0) {
          f.items.push_back(Item::terminal(g.terminals[rng() % g.terminals.size()]));
        } else {
          std::vector<Symbol> st;
          for (std::size_t d = stack(rng); d > 0; --d) st.push_back(g.indices[rng() % g.indices.size()]);
          f.items.push_back(Item::variable(g.variables[rng() % g.variables.size()], st));
        }
      }
      for (const auto& s : successors(g, f)) {
        const auto& p = g.productions[s.production];
        const auto& old = f.items[s.position];
        std::size_t body_vars = 0;
        for (const auto& x : p.rhs) body_vars += tab.variable(x) ? 1 : 0;
        if (p.kind == ProductionKind::Push) {
          CHECK(s.form.width() == f.width());
        } else {
          CHECK(s.form.width() == f.width() - 1 + body_vars);
          auto expect = old.stack;
          if (p.kind == ProductionKind::Consume) expect.erase(expect.begin());
          for (std::size_t i = 0; i < p.rhs.size(); ++i) {
            const auto& it = s.form.items[s.position + i];
            if (it.is_variable) CHECK(it.stack == expect);
          }
        }
        // items outside the rewritten position are untouched
        std::size_t grown = s.form.items.size() - (f.items.size() - 1);
        for (std::size_t i = 0; i < s.position; ++i) CHECK(s.form.items[i] == f.items[i]);
        for (std::size_t i = s.position + 1; i < f.items.size(); ++i) CHECK(s.form.items[i - 1 + grown] == f.items[i]);
      }
    }
  }
}

TEST_CASE("replay detects tampered derivations") {
  auto g = fixture("sec5");
  Derivation d;
  d.initial = SententialForm::start(g);
  SententialForm cur = d.initial;
  for (int i = 0; i < 3; ++i) {
    auto s = successors(g, cur).front();
    d.steps.push_back({s.production, s.position, s.form});
    cur = s.form;
  }
  CHECK(replay(g, d));
  d.steps[1].form.items.push_back(Item::terminal("a"));
  CHECK_FALSE(replay(g, d));
}
