// idxgram: batch front-end for the indexed-grammar workbench.
//
// Every command prints one report (`key: value` lines). Exit status:
// 0 proven / ok, 1 refuted or violation, 2 unknown (budget), 3 usage or input error.

#include <iostream>

#include "CLI11.hpp"
#include "idxgram/idxgram.hpp"

#ifndef IDXGRAM_FIXTURE_DIR
#define IDXGRAM_FIXTURE_DIR "fixtures"
#endif

using namespace idxgram;

namespace {

enum Exit { kOk = 0, kRefuted = 1, kUnknown = 2, kUsage = 3 };

struct Options {
  std::size_t max_len = 10;
  std::size_t max_steps = 64;
  std::optional<std::size_t> max_width;
  std::optional<std::size_t> max_stack;
  std::size_t radius = 6;
  std::size_t k = 3;
  bool no_timing = false;
  std::string out;
  std::string fixtures = IDXGRAM_FIXTURE_DIR;

  Budget budget() const {
    Budget b;
    b.max_steps = max_steps;
    b.max_width = max_width;
    b.max_stack = max_stack;
    return b;
  }
};

int exit_for(Status s) {
  switch (s) {
    case Status::Proven: return kOk;
    case Status::Refuted: return kRefuted;
    case Status::Unknown: return kUnknown;
  }
  return kUnknown;
}

int exit_for(Decision d) { return d == Decision::Refuted ? kRefuted : d == Decision::Proven ? kOk : kUnknown; }

/// Collects input files for the digest and builds the report for one command.
class Run {
public:
  Run(const Options& opt, std::string command) : opt_(opt) { report_.add("command", command); }

  std::string load(const std::string& path) {
    std::string text = read_file(path);
    inputs_.push_back(text);
    return text;
  }
  IndexedGrammar grammar(const std::string& path) { return load_grammar(load(path)); }

  CommandReport& report() { return report_; }

  /// Prints the report (with digest and timing) and returns the exit code.
  int finish(int code) {
    CommandReport r;
    r.fields.push_back(report_.fields.front());
    r.add("input-digest", input_digest(inputs_));
    r.fields.insert(r.fields.end(), report_.fields.begin() + 1, report_.fields.end());
    if (!opt_.no_timing) {
      std::ostringstream ms;
      ms.precision(3);
      ms << std::fixed << clock_.elapsed_ms();
      r.add("elapsed-ms", ms.str());
    }
    r.add("exit", std::to_string(code));
    std::cout << format_report(r);
    return code;
  }

  /// Grammar results go to --out when given, otherwise into the report.
  void emit_grammar(const IndexedGrammar& g) {
    report_.add("variables", g.variables.size());
    report_.add("productions", g.productions.size());
    report_.add("special-productions", special_production_count(g));
    emit_text("grammar", serialize_grammar(g));
  }
  void emit_text(const std::string& key, const std::string& text) {
    if (!opt_.out.empty()) {
      std::ofstream f(opt_.out, std::ios::binary);
      if (!f) throw Error("cannot write '" + opt_.out + "'");
      f << text;
      report_.add("written", opt_.out);
    } else {
      report_.add(key, text);
    }
  }

private:
  const Options& opt_;
  CommandReport report_;
  std::vector<std::string> inputs_;
  Stopwatch clock_;
};

void add_flags(const Enumeration& e, CommandReport& r) {
  r.add("exhausted", e.flags.exhausted());
  r.add("forms", e.flags.forms);
  if (e.flags.caps_hit()) r.add("caps-hit", true);
}

void add_flags(const SearchFlags& f, CommandReport& r) {
  r.add("exhausted", f.exhausted());
  r.add("forms", f.forms);
  if (f.caps_hit()) r.add("caps-hit", true);
}

std::vector<Symbol> letters_of(const std::string& list) {
  std::vector<Symbol> out;
  for (auto& s : detail::split_list(list))
    if (!s.empty()) out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------
// replicate-paper

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::set<Word> as_set(const std::vector<Word>& v) { return {v.begin(), v.end()}; }

std::string show(const std::set<Word>& ws, std::size_t limit = 6) {
  std::vector<std::string> parts;
  for (const auto& w : ws) {
    if (parts.size() == limit) {
      parts.push_back("...");
      break;
    }
    parts.push_back(format_word(w));
  }
  return "{" + join(parts, ", ") + "} (" + std::to_string(ws.size()) + ")";
}

std::vector<Check> replicate(const Options& opt, Run& run) {
  std::vector<Check> out;
  const std::string dir = opt.fixtures + "/";
  auto grammar = [&](const std::string& name) { return run.grammar(dir + name + ".ig"); };
  auto check = [&](std::string name, auto&& body) {
    Check c{std::move(name), false, ""};
    try {
      body(c);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = std::string("error: ") + e.what();
    }
    out.push_back(std::move(c));
  };

  IndexedGrammar sec5 = grammar("sec5");
  IndexedGrammar ex1 = grammar("ex1");

  check("sec5 language to length 14", [&](Check& c) {
    auto e = enumerate_language(sec5, 14, opt.budget());
    std::set<Word> expect{parse_word("$"), parse_word("abc$abc"), parse_word("aabbcc$aabbcc")};
    auto got = as_set(e.words);
    c.pass = e.exhausted() && got == expect;
    c.detail = show(got);
  });
  check("sec5 equals phi of its exponent set", [&](Check& c) {
    auto f = parse_semilinear(run.load(dir + "sls/sec5.sls"));
    std::set<Word> expect;
    std::vector<std::size_t> weight;
    for (const auto& u : f.shape->words) weight.push_back(u.size());
    for_each_vector(f.shape->dim(), weight, 14, [&](const Vector& v) {
      if (slset_member(v, f.set)) expect.insert(ginsburg_apply(*f.shape, v));
      return true;
    });
    auto got = as_set(enumerate_language(sec5, 14, opt.budget()).words);
    c.pass = got == expect;
    c.detail = show(expect);
  });
  check("sec5 min-index of abc$abc is 7", [&](Check& c) {
    auto m = min_index(sec5, parse_word("abc$abc"), opt.budget());
    c.pass = m.status == Status::Proven && m.value == 7;
    c.detail = std::to_string(m.value) + " " + to_string(m.status);
  });
  check("example language to length 20", [&](Check& c) {
    Budget b = opt.budget();
    b.max_steps = std::max<std::size_t>(b.max_steps, 128);
    auto e = enumerate_language(ex1, 20, b);
    std::set<Word> expect;
    for (std::size_t n = 1;; ++n) {
      Word w;
      for (std::size_t i = 1; i <= n; ++i) {
        w.insert(w.end(), i, "a");
        w.push_back("b");
      }
      w.insert(w.end(), n + 1, "a");
      if (w.size() > 20) break;
      expect.insert(w);
    }
    auto got = as_set(e.words);
    c.pass = e.exhausted() && got == expect;
    c.detail = show(got);
  });
  check("example min-index of abaa is 3", [&](Check& c) {
    auto m = min_index(ex1, parse_word("abaa"), opt.budget());
    c.pass = m.status == Status::Proven && m.value == 3;
    c.detail = std::to_string(m.value) + " " + to_string(m.status);
  });
  check("example is not uncontrolled index 3", [&](Check& c) {
    auto v = check_uncontrolled(ex1, 3, opt.budget());
    c.pass = v.status == Status::Refuted && v.witness && replay(ex1, *v.witness) && v.witness->index() > 3;
    c.detail = std::string(to_string(v.status)) + (v.witness ? ", witness width " + std::to_string(v.witness->index()) : "");
  });
  check("union anbn + a*", [&](Check& c) {
    auto g1 = grammar("anbn"), g2 = grammar("astar");
    auto u = union_grammars(g1, g2);
    auto expect = as_set(enumerate_language(g1, 8, opt.budget()).words);
    for (auto& w : enumerate_language(g2, 8, opt.budget()).words) expect.insert(w);
    auto got = as_set(enumerate_language(u, 8, opt.budget()).words);
    c.pass = got == expect;
    c.detail = show(got);
  });
  check("morphic image of sec5", [&](Check& c) {
    auto h = parse_morphism(run.load(dir + "auto/double.morph"));
    std::set<Word> expect;
    for (auto& w : enumerate_language(sec5, 14, opt.budget()).words) expect.insert(h.apply(w));
    auto got = as_set(enumerate_language(morphism_image(sec5, h), 8, opt.budget()).words);
    std::set<Word> capped;
    for (auto& w : expect)
      if (w.size() <= 8) capped.insert(w);
    c.pass = got == capped;
    c.detail = show(got);
  });
  check("sec5 intersected with a*b*c*$a*b*c*", [&](Check& c) {
    auto d = parse_dfa(run.load(dir + "auto/abc_dollar.dfa"));
    auto got = as_set(enumerate_language(intersect_dfa(normalize_rhs(sec5), d), 14, opt.budget()).words);
    std::set<Word> expect;
    for (auto& w : enumerate_language(sec5, 14, opt.budget()).words)
      if (d.accepts(w)) expect.insert(w);
    c.pass = got == expect;
    c.detail = show(got);
  });
  for (const char* name : {"anbn", "copy", "ab", "apbp", "anbncn", "dyck1"}) {
    check(std::string("etol ") + name + " conversion to length 8", [&](Check& c) {
      auto sys = parse_etol(run.load(dir + "etol/" + name + ".etol"));
      auto e = etol_enumerate(sys, 8);
      std::size_t depth = 0;
      for (auto& w : e.words) depth = std::max(depth, *etol_derivation_length(sys, w));
      Budget b = opt.budget();
      b.max_steps = std::max<std::size_t>(b.max_steps, 200);
      b.max_stack = depth;
      auto g = enumerate_language(etol_to_indexed(sys), 8, b);
      c.pass = as_set(e.words) == as_set(g.words);
      c.detail = show(as_set(g.words));
    });
  }
  check("etol notanf is rejected", [&](Check& c) {
    auto v = check_anf(parse_etol(run.load(dir + "etol/notanf.etol")));
    c.pass = !v.empty();
    c.detail = std::to_string(v.size()) + " violations";
  });
  for (auto [g, m] : std::vector<std::pair<std::string, std::string>>{{"abstar", "anbn"}, {"abc", "anbncn"}, {"anbn", "twoblocks"}, {"abstar", "pump"}}) {
    check("parikh of " + g + " and machine " + m, [&, g = g, m = m](Check& c) {
      auto p = parikh_of_intersection(grammar(g), parse_machine(run.load(dir + "ncm/" + m + ".ncm")), opt.radius);
      c.pass = p.agree && p.exhausted;
      std::vector<std::string> vs;
      for (auto& v : p.pipeline) vs.push_back(format_vector(v));
      c.detail = "{" + join(vs, " ") + "}";
    });
  }
  check("diag subset of quadrant", [&](Check& c) {
    auto a = parse_semilinear(run.load(dir + "sls/diag.sls")), b = parse_semilinear(run.load(dir + "sls/quadrant.sls"));
    c.pass = slset_subset(a.set, b.set).decision == Decision::Proven && slset_subset(b.set, a.set).decision == Decision::Refuted;
    c.detail = "proven one way, refuted the other";
  });
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Indexed grammar workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--max-len", opt.max_len, "Longest word to enumerate")->capture_default_str();
  app.add_option("--max-steps", opt.max_steps, "Derivation step budget")->capture_default_str();
  app.add_option("--max-width", opt.max_width, "Cap on sentential-form width");
  app.add_option("--max-stack", opt.max_stack, "Cap on index stack height");
  app.add_option("--radius", opt.radius, "Sample radius for Parikh and bounded checks")->capture_default_str();
  app.add_option("--k", opt.k, "Width bound for check-uncontrolled")->capture_default_str();
  app.add_option("-o,--out", opt.out, "Write constructed grammars/automata here");
  app.add_option("--fixtures", opt.fixtures, "Fixture directory for replicate-paper")->capture_default_str();
  app.add_flag("--no-timing", opt.no_timing, "Leave elapsed-ms out of reports");

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

  std::vector<std::function<int()>> actions;
  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* s = parent->add_subcommand(name, help);
    s->fallthrough();
    return s;
  };
  std::string f1, f2, word, letters;

  // -- grammar-core / derivation-engine
  auto* validate_cmd = sub(&app, "validate", "Check a grammar file");
  validate_cmd->add_option("grammar", f1)->required();
  validate_cmd->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto g = parse_grammar(run.load(f1));
      auto v = validate(g);
      run.report().add("grammar-name", g.name).add("violations", v.size());
      for (auto& x : v) run.report().add("violation", x.location + ": " + x.message);
      run.report().add("special-productions", special_production_count(g));
      return run.finish(v.empty() ? kOk : kRefuted);
    });
  });

  auto* enum_cmd = sub(&app, "enumerate", "List L(G) up to --max-len");
  enum_cmd->add_option("grammar", f1)->required();
  enum_cmd->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto g = run.grammar(f1);
      auto e = enumerate_language(g, opt.max_len, opt.budget());
      run.report().add("max-len", opt.max_len).add("count", e.words.size());
      for (auto& w : e.words) run.report().add("word", format_word(w));
      add_flags(e, run.report());
      return run.finish(e.exhausted() && !e.flags.caps_hit() ? kOk : kUnknown);
    });
  });

  auto* member_cmd = sub(&app, "member", "Decide w in L(G) with a witness derivation");
  member_cmd->add_option("grammar", f1)->required();
  member_cmd->add_option("word", word)->required();
  member_cmd->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto g = run.grammar(f1);
      auto v = membership(g, parse_word(word), opt.budget());
      run.report().add("word", format_word(parse_word(word))).add("status", to_string(v.status));
      if (v.witness) run.report().add("trace", format_trace(*v.witness));
      add_flags(v.flags, run.report());
      return run.finish(exit_for(v.status));
    });
  });

  auto* mi_cmd = sub(&app, "min-index", "Least width of a derivation of w");
  mi_cmd->add_option("grammar", f1)->required();
  mi_cmd->add_option("word", word)->required();
  mi_cmd->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto g = run.grammar(f1);
      auto m = min_index(g, parse_word(word), opt.budget());
      run.report().add("word", format_word(parse_word(word))).add("status", to_string(m.status)).add("min-index", m.value);
      if (m.witness) run.report().add("trace", format_trace(*m.witness));
      add_flags(m.flags, run.report());
      return run.finish(exit_for(m.status));
    });
  });

  auto* unc_cmd = sub(&app, "check-uncontrolled", "Does every derivation stay within width --k?");
  unc_cmd->add_option("grammar", f1)->required();
  unc_cmd->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto g = run.grammar(f1);
      auto v = check_uncontrolled(g, opt.k, opt.budget());
      run.report().add("k", opt.k).add("status", to_string(v.status));
      if (!v.note.empty()) run.report().add("note", v.note);
      if (v.witness) {
        run.report().add("witness-width", v.witness->index());
        run.report().add("replays", replay(g, *v.witness));
        run.report().add("trace", format_trace(*v.witness));
      }
      add_flags(v.flags, run.report());
      return run.finish(exit_for(v.status));
    });
  });

  // -- trio-constructions
  auto* tr = sub(&app, "transform", "Closure constructions");
  tr->require_subcommand(1);
  auto grammar_op = [&](const std::string& name, const std::string& help, bool second, const std::string& second_name,
                        std::function<IndexedGrammar(Run&)> op) {
    auto* s = sub(tr, name, help);
    s->add_option("grammar", f1)->required();
    if (second) s->add_option(second_name, f2)->required();
    s->callback([&, op] {
      actions.push_back([&, op] {
        Run run(opt, command);
        auto g = op(run);
        run.emit_grammar(g);
        return run.finish(kOk);
      });
    });
    return s;
  };
  grammar_op("union", "L(G1) + L(G2)", true, "grammar2", [&](Run& r) { return union_grammars(r.grammar(f1), r.grammar(f2)); });
  grammar_op("morph", "h(L(G))", true, "morphism", [&](Run& r) {
    auto g = r.grammar(f1);
    return morphism_image(g, parse_morphism(r.load(f2)));
  });
  grammar_op("inv-morph", "h^-1(L(G))", true, "morphism", [&](Run& r) {
    auto g = r.grammar(f1);
    return inverse_morphism(g, parse_morphism(r.load(f2)));
  });
  grammar_op("normalize", "Right-hand-side normal form", false, "", [&](Run& r) { return normalize_rhs(r.grammar(f1)); });
  grammar_op("intersect-dfa", "L(G) intersected with a regular set", true, "dfa", [&](Run& r) {
    auto g = r.grammar(f1);
    return prune_grammar(intersect_dfa(normalize_rhs(g), parse_dfa(r.load(f2))));
  });
  grammar_op("inv-proj", "Inverse projection onto --letters", false, "", [&](Run& r) {
    auto g = r.grammar(f1);
    auto extra = letters_of(letters);
    std::vector<Symbol> ext = g.terminals;
    for (auto& x : extra)
      if (std::find(ext.begin(), ext.end(), x) == ext.end()) ext.push_back(x);
    return inverse_projection(g, ext);
  })->add_option("--letters", letters, "Letters to add, comma separated")->required();
  grammar_op("transduce", "Image under a rational transduction", true, "transducer", [&](Run& r) {
    auto g = r.grammar(f1);
    return nivat_transduce(g, parse_transducer(r.load(f2)));
  });

  // -- semilinear-engine
  auto synth = [&](const std::string& name, const std::string& help, bool linear_only) {
    auto* s = sub(&app, name, help);
    s->add_option("set", f1)->required();
    s->callback([&, linear_only] {
      actions.push_back([&, linear_only] {
        Run run(opt, command);
        auto f = parse_semilinear(run.load(f1));
        if (!f.shape) throw Error("the set file needs a 'shape:' line");
        if (linear_only && f.set.components.size() != 1) throw Error("synth-linear needs exactly one linear set");
        auto g = linear_only ? linear_to_grammar(*f.shape, f.set.components.front()) : semilinear_to_grammar(*f.shape, f.set);
        run.emit_grammar(g);
        return run.finish(kOk);
      });
    });
  };
  synth("synth-linear", "Grammar for phi(L) of one linear set", true);
  synth("synth-semilinear", "Grammar for phi(S) of a semilinear set", false);

  auto* sl = sub(&app, "slset", "Semilinear set decisions");
  sl->require_subcommand(1);
  std::string vec;
  auto* slm = sub(sl, "member", "v in S");
  slm->add_option("set", f1)->required();
  slm->add_option("vector", vec)->required();
  slm->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto f = parse_semilinear(run.load(f1));
      auto v = detail::parse_vector(vec);
      bool in = slset_member(v, f.set);
      run.report().add("vector", format_vector(v)).add("status", in ? "Proven" : "Refuted");
      return run.finish(in ? kOk : kRefuted);
    });
  });
  auto set_pair = [&](const std::string& name, const std::string& help, auto op) {
    auto* s = sub(sl, name, help);
    s->add_option("set1", f1)->required();
    s->add_option("set2", f2)->required();
    s->callback([&, op] {
      actions.push_back([&, op] {
        Run run(opt, command);
        auto a = parse_semilinear(run.load(f1)), b = parse_semilinear(run.load(f2));
        SetVerdict v = op(a.set, b.set);
        run.report().add("status", to_string(v.decision));
        if (v.witness) run.report().add("witness", format_vector(*v.witness));
        return run.finish(exit_for(v.decision));
      });
    });
  };
  set_pair("subset", "S1 contained in S2", [](const SemilinearSet& a, const SemilinearSet& b) { return slset_subset(a, b); });
  set_pair("equal", "S1 = S2", [](const SemilinearSet& a, const SemilinearSet& b) { return slset_equal(a, b); });
  auto* sle = sub(sl, "empty", "S is empty");
  sle->add_option("set", f1)->required();
  sle->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto v = slset_empty(parse_semilinear(run.load(f1)).set);
      run.report().add("status", to_string(v.decision));
      if (v.witness) run.report().add("witness", format_vector(*v.witness));
      return run.finish(exit_for(v.decision));
    });
  });

  auto* bd = sub(&app, "bounded", "Bounded Ginsburg semilinear languages");
  bd->require_subcommand(1);
  auto* bdm = sub(bd, "member", "w in phi(S)");
  bdm->add_option("set", f1)->required();
  bdm->add_option("word", word)->required();
  bdm->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto f = parse_semilinear(run.load(f1));
      if (!f.shape) throw Error("the set file needs a 'shape:' line");
      bool in = bounded_word_member(parse_word(word), *f.shape, f.set);
      run.report().add("word", format_word(parse_word(word))).add("status", in ? "Proven" : "Refuted");
      return run.finish(in ? kOk : kRefuted);
    });
  });
  auto* bds = sub(bd, "subset", "phi1(S1) contained in phi2(S2), words up to --max-len");
  bds->add_option("set1", f1)->required();
  bds->add_option("set2", f2)->required();
  bds->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto a = parse_semilinear(run.load(f1)), b = parse_semilinear(run.load(f2));
      if (!a.shape || !b.shape) throw Error("both set files need a 'shape:' line");
      auto v = bounded_lang_subset(*a.shape, a.set, *b.shape, b.set, opt.max_len);
      run.report().add("status", to_string(v.decision));
      if (v.decision == Decision::VerifiedUpTo) run.report().add("checked-up-to", v.checked_up_to);
      if (v.witness) run.report().add("witness", format_word(*v.witness));
      return run.finish(exit_for(v.decision));
    });
  });

  // -- etol-systems
  auto* et = sub(&app, "etol", "ET0L systems");
  et->require_subcommand(1);
  auto* ete = sub(et, "enumerate", "Words of the system up to --max-len");
  ete->add_option("system", f1)->required();
  ete->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto sys = parse_etol(run.load(f1));
      EtolBudget b;
      b.max_steps = opt.max_steps;
      b.max_width = opt.max_width;
      auto e = etol_enumerate(sys, opt.max_len, b);
      run.report().add("max-len", opt.max_len).add("count", e.words.size());
      for (auto& w : e.words) run.report().add("word", format_word(w));
      add_flags(e, run.report());
      return run.finish(e.exhausted() ? kOk : kUnknown);
    });
  });
  auto* eta = sub(et, "check-anf", "Active normal form check");
  eta->add_option("system", f1)->required();
  eta->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto v = check_anf(parse_etol(run.load(f1)));
      run.report().add("status", v.empty() ? "Proven" : "Refuted").add("violations", v.size());
      for (auto& x : v) run.report().add("violation", x);
      return run.finish(v.empty() ? kOk : kRefuted);
    });
  });
  auto* etc = sub(et, "convert", "Equivalent indexed grammar");
  etc->add_option("system", f1)->required();
  etc->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      run.emit_grammar(etol_to_indexed(parse_etol(run.load(f1))));
      return run.finish(kOk);
    });
  });

  // -- counter-machines
  auto* nc = sub(&app, "ncm", "Reversal-bounded counter machines");
  nc->require_subcommand(1);
  auto* ncr = sub(nc, "run", "Simulate the machine on w");
  ncr->add_option("machine", f1)->required();
  ncr->add_option("word", word)->required();
  ncr->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto m = parse_machine(run.load(f1));
      auto w = parse_word(word);
      auto r = ncm_run(m, w);
      run.report().add("word", format_word(w)).add("status", to_string(r.status)).add("configurations", r.configs);
      if (r.counter_cap_hit) run.report().add("counter-cap-hit", true);
      if (r.status == Status::Proven) {
        std::vector<std::string> steps;
        for (auto t : r.trace) {
          const auto& tr = m.transitions[t];
          steps.push_back(m.states[static_cast<std::size_t>(tr.from)] + ">" + m.states[static_cast<std::size_t>(tr.to)]);
        }
        run.report().add("run", join(steps, " "));
        run.report().add("audited", audit_run(m, w, r.trace));
      }
      return run.finish(exit_for(r.status));
    });
  });
  auto* nco = sub(nc, "one-reversal", "Equivalent machine with 1-reversal counters");
  nco->add_option("machine", f1)->required();
  nco->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto m = to_one_reversal(parse_machine(run.load(f1)));
      run.report().add("states", m.states.size()).add("counters", m.counters);
      run.emit_text("machine", serialize_machine(m));
      return run.finish(kOk);
    });
  });
  auto* ncx = sub(nc, "expand", "Finite automaton spelling out counter moves");
  ncx->add_option("machine", f1)->required();
  ncx->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto m = parse_machine(run.load(f1));
      auto n = expand_to_nfa(m, counter_letters(m));
      run.report().add("states", n.states.size()).add("alphabet", join(n.alphabet, ", "));
      run.emit_text("nfa", serialize_nfa(n));
      return run.finish(kOk);
    });
  });
  auto* ncp = sub(nc, "parikh-intersect", "Parikh vectors of L(G) and L(M) up to --radius");
  ncp->add_option("grammar", f1)->required();
  ncp->add_option("machine", f2)->required();
  ncp->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto g = run.grammar(f1);
      auto p = parikh_of_intersection(g, parse_machine(run.load(f2)), opt.radius, std::nullopt, opt.budget());
      run.report().add("radius", opt.radius).add("count", p.pipeline.size());
      for (auto& v : p.pipeline) run.report().add("vector", format_vector(v));
      run.report().add("agrees-with-simulation", p.agree).add("exhausted", p.exhausted);
      if (!p.agree) return run.finish(kRefuted);
      return run.finish(p.exhausted && !p.simulator_unknown ? kOk : kUnknown);
    });
  });

  // -- fixture suite
  auto* rp = sub(&app, "replicate-paper", "Run the fixture replication suite");
  rp->callback([&] {
    actions.push_back([&] {
      Run run(opt, command);
      auto checks = replicate(opt, run);
      std::size_t failed = 0;
      for (auto& c : checks) {
        run.report().add("check", (c.pass ? "pass | " : "FAIL | ") + c.name + " | " + c.detail);
        if (!c.pass) ++failed;
      }
      run.report().add("checks", checks.size()).add("failed", failed);
      return run.finish(failed ? kRefuted : kOk);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    int code = kOk;
    for (auto& a : actions) code = a();
    return code;
  } catch (const std::exception& e) {
    CommandReport r;
    r.add("command", command).add("error", e.what()).add("exit", std::to_string(kUsage));
    std::cout << format_report(r);
    return kUsage;
  }
}
