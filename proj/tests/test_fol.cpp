#include <doctest.h>

#include <functional>
#include <random>

#include "ddclab/fol.hpp"
#include "ddclab/fol_check.hpp"
#include "ddclab/fol_model.hpp"
#include "test_support.hpp"

using namespace ddclab;
using namespace ddclab::fol;

namespace {

Problem load_problem(const std::string& name) {
  return parse_problem(testing::read_file(testing::repo_path("proofs/" + name)));
}

std::vector<ProofStep> load_trace(const std::string& name) {
  return parse_proof(testing::read_file(testing::repo_path("proofs/" + name)));
}

Clause clause_of(const char* text) {
  auto steps = parse_proof(std::string("1. ") + text + ". Deny 1");
  return steps.at(0).clause;
}

}  // namespace

TEST_CASE("formula parsing") {
  Formula f = parse_formula("man(X) -> mortal(X).");
  REQUIRE(f.kind == Formula::Kind::Implies);
  CHECK(f.children[0].lit.atom.pred == "man");
  CHECK(f.children[0].lit.atom.args[0].kind == Term::Kind::Var);
  CHECK(f.children[1].lit.atom.pred == "mortal");

  Formula ground = parse_formula("man(socrates).");
  CHECK(ground.kind == Formula::Kind::Atom);
  CHECK(ground.lit.atom.args[0].kind == Term::Kind::Const);

  Formula eq = parse_formula("stage1 = compile(sP,cT,e1effects,e1,e2).");
  CHECK(eq.lit.atom.is_equality);
  CHECK(eq.lit.atom.args[1].kind == Term::Kind::Fn);
  CHECK(eq.lit.atom.args[1].args.size() == 5);

  Formula neq = parse_formula("cA != stage2.");
  CHECK(neq.lit.atom.is_equality);
  CHECK_FALSE(neq.lit.positive);

  Formula quantified = parse_formula("(all A accurately_translates(cT,lsP,sP,A,e1,e2))");
  CHECK(quantified.kind == Formula::Kind::ForAll);

  Formula nested = parse_formula("p(X) & q(X) -> r(X) | -s(X).");
  CHECK(nested.kind == Formula::Kind::Implies);
  CHECK(nested.children[0].kind == Formula::Kind::And);
  CHECK(nested.children[1].kind == Formula::Kind::Or);
}

TEST_CASE("formula parse errors") {
  CHECK_THROWS_AS(parse_formula("a = ."), FolError);
  CHECK_THROWS_AS(parse_formula("p(X"), FolError);
  CHECK_THROWS_AS(parse_formula("X."), FolError);          // bare variable
  CHECK_THROWS_AS(parse_formula("socrates."), FolError);   // bare constant
  CHECK_THROWS_AS(parse_formula("all x p(x)"), FolError);  // lowercase quantified name
  CHECK_THROWS_AS(parse_formula("F(a) = b."), FolError);   // uppercase function
  CHECK_THROWS_AS(parse_formula("p(a) !"), FolError);
}

TEST_CASE("clausify") {
  auto cs = clausify(parse_formula("man(X) -> mortal(X)."));
  REQUIRE(cs.size() == 1);
  CHECK(to_string(cs[0]) == "-man(X) | mortal(X)");

  // ground fact: itself as a unit clause
  auto unit = clausify(parse_formula("man(socrates)."));
  REQUIRE(unit.size() == 1);
  CHECK(to_string(unit[0]) == "man(socrates)");

  // conjunction in the conclusion splits
  auto split = clausify(parse_formula("p(X) -> q(X) & r(X)."));
  CHECK(split.size() == 2);

  // negated universal is outside the fragment
  CHECK_THROWS_AS(clausify(parse_formula("-(all X p(X))")), FolError);
}

TEST_CASE("clausify matches the transcribed steps") {
  Problem p1 = load_problem("proof1.fol");
  auto cs = clausify(*p1.find_assumption("define_exactly_correspond"));
  REQUIRE(cs.size() == 1);
  Clause claimed = clause_of(
      "-accurately_translates(A,B,C,D,E,F) | "
      "exactly_correspond(compile(C,A,D,E,F),C,B,F)");
  CHECK(clauses_match(claimed, cs[0], true));
}

TEST_CASE("unification") {
  Term t1 = parse_term("f(X,a)");
  Term t2 = parse_term("f(b,Y)");
  auto s = unify(t1, t2);
  REQUIRE(s.has_value());
  CHECK(to_string(apply_substitution(t1, *s)) == "f(b,a)");
  CHECK(to_string(apply_substitution(t2, *s)) == "f(b,a)");

  auto s2 = unify(parse_term("X"), parse_term("socrates"));
  REQUIRE(s2.has_value());
  CHECK(to_string(s2->at("X")) == "socrates");

  // occurs check
  CHECK_FALSE(unify(parse_term("X"), parse_term("f(X)")).has_value());
  CHECK_FALSE(unify(parse_term("a"), parse_term("b")).has_value());
  CHECK_FALSE(unify(parse_term("f(a)"), parse_term("g(a)")).has_value());
  // chained bindings
  auto s3 = unify(parse_term("f(X,X)"), parse_term("f(Y,a)"));
  REQUIRE(s3.has_value());
  CHECK(to_string(apply_substitution(parse_term("f(X,X)"), *s3)) == "f(a,a)");
}

TEST_CASE("resolution derives the textbook conclusion") {
  Clause fact = clause_of("man(socrates)");
  Clause rule = clause_of("-man(X) | mortal(X)");
  auto rs = resolvents(rule, fact);
  REQUIRE_FALSE(rs.empty());
  bool found = false;
  for (const auto& r : rs) {
    if (clauses_match(clause_of("mortal(socrates)"), r, false)) found = true;
  }
  CHECK(found);
}

TEST_CASE("paramodulation rewrites subterms under unification") {
  Clause eq = clause_of("f(A,B,C) = g(C,B,A)");
  Clause target = clause_of("p(f(d,e,X))");
  auto ps = paramodulants(eq, target);
  bool found = false;
  for (const auto& r : ps) {
    if (clauses_match(clause_of("p(g(X,e,d))"), r, false)) found = true;
  }
  CHECK(found);
}

TEST_CASE("the three transcribed traces are accepted") {
  for (const char* name : {"proof1", "proof2", "proof3"}) {
    CAPTURE(name);
    Problem problem = load_problem(std::string(name) + ".fol");
    auto trace = load_trace(std::string(name) + ".prf");
    auto result = check_proof(problem, trace);
    CHECK_MESSAGE(result.accepted, name << " step " << result.failing_step << ": "
                                        << result.reason);
  }
  CHECK(load_trace("proof1.prf").size() == 19);
  CHECK(load_trace("proof2.prf").size() == 30);
  CHECK(load_trace("proof3.prf").size() == 10);
}

TEST_CASE("a trace that stops before the empty clause is rejected") {
  Problem problem = load_problem("proof3.fol");
  auto trace = load_trace("proof3.prf");
  trace.pop_back();  // drop the final $F
  auto result = check_proof(problem, trace);
  CHECK_FALSE(result.accepted);
  CHECK(result.reason.find("empty clause") != std::string::npos);
}

TEST_CASE("a mutated step is rejected") {
  Problem problem = load_problem("proof1.fol");
  auto trace = load_trace("proof1.prf");
  // replace stage2 with stage1 in step 18's conclusion
  for (auto& step : trace) {
    if (step.id == 18) {
      step.clause = clause_of("exactly_correspond(stage1,sA,lsA,eArun)");
    }
  }
  auto result = check_proof(problem, trace);
  CHECK_FALSE(result.accepted);
  CHECK(result.failing_step == 18);
}

TEST_CASE("mutation resistance: corrupted steps are rejected") {
  std::mt19937 rng(77);
  for (const char* name : {"proof1", "proof2", "proof3"}) {
    CAPTURE(name);
    Problem problem = load_problem(std::string(name) + ".fol");
    auto pristine = load_trace(std::string(name) + ".prf");
    REQUIRE(check_proof(problem, pristine).accepted);

    int rejected = 0;
    int attempts = 0;
    while (rejected < 10 && attempts < 300) {
      ++attempts;
      auto trace = pristine;
      std::size_t index = rng() % trace.size();
      ProofStep& step = trace[index];
      int mutation = int(rng() % 3);
      bool mutated = false;
      if (mutation == 0 && !step.is_formula && !step.clause.empty()) {
        // flip the sign of one literal
        std::size_t k = rng() % step.clause.literals.size();
        step.clause.literals[k].positive = !step.clause.literals[k].positive;
        mutated = true;
      } else if (mutation == 1 && step.rationale.premise1 > 1) {
        step.rationale.premise1 -= 1;
        mutated = true;
      } else if (mutation == 2 && !step.is_formula && !step.clause.empty()) {
        // rename the first constant found in the first literal
        std::function<bool(Term&)> patch = [&](Term& t) {
          if (t.kind == Term::Kind::Const) {
            t.name = "bogus";
            return true;
          }
          for (auto& a : t.args) {
            if (patch(a)) return true;
          }
          return false;
        };
        for (auto& lit : step.clause.literals) {
          for (auto& arg : lit.atom.args) {
            if (patch(arg)) {
              mutated = true;
              break;
            }
          }
          if (mutated) break;
        }
      }
      if (!mutated) continue;
      if (!check_proof(problem, trace).accepted) ++rejected;
    }
    CHECK_MESSAGE(rejected >= 10,
                  "only " << rejected << " of " << attempts << " mutations rejected");
  }
}

TEST_CASE("acceptance is invariant under consistent variable renaming") {
  for (const char* name : {"proof1", "proof2", "proof3"}) {
    CAPTURE(name);
    Problem problem = load_problem(std::string(name) + ".fol");
    auto trace = load_trace(std::string(name) + ".prf");
    std::function<void(Term&)> rename = [&](Term& t) {
      if (t.kind == Term::Kind::Var) t.name += "PRIME";
      for (auto& a : t.args) rename(a);
    };
    std::function<void(Formula&)> rename_formula = [&](Formula& f) {
      for (auto& t : f.lit.atom.args) rename(t);
      if (!f.bound_var.empty()) f.bound_var += "PRIME";
      for (auto& c : f.children) rename_formula(c);
    };
    for (auto& step : trace) {
      if (step.is_formula) {
        rename_formula(step.formula);
      } else {
        for (auto& l : step.clause.literals) {
          for (auto& t : l.atom.args) rename(t);
        }
      }
    }
    CHECK(check_proof(problem, trace).accepted);
  }
}

TEST_CASE("check_step rejections carry the rule and premise ids") {
  Problem problem = load_problem("proof3.fol");
  auto trace = load_trace("proof3.prf");
  std::map<int, const ProofStep*> earlier;
  for (const auto& s : trace) {
    if (s.id < 9) earlier.emplace(s.id, &s);
  }
  ProofStep bogus = trace[8];  // step 9
  bogus.clause = clause_of("exactly_correspond(cGP,sP,lsP,eA)");
  auto r = check_step(bogus, earlier, problem);
  CHECK_FALSE(r.accepted);
  CHECK(r.reason.find("resolvent") != std::string::npos);

  ProofStep forward = trace[8];
  forward.rationale.premise1 = 99;  // not an earlier step
  CHECK_FALSE(check_step(forward, earlier, problem).accepted);
}

TEST_CASE("soundness spot check: accepted inferences hold in domain-2 models") {
  // exhaustive over all 32 interpretations of the tiny socrates signature
  std::vector<Formula> premises{parse_formula("man(X) -> mortal(X)."),
                                parse_formula("man(socrates).")};
  for (int c = 0; c < 2; ++c) {
    for (int man_bits = 0; man_bits < 4; ++man_bits) {
      for (int mortal_bits = 0; mortal_bits < 4; ++mortal_bits) {
        Interpretation m;
        m.domain_size = 2;
        m.arity = {{"socrates", 0}, {"man", 1}, {"mortal", 1}};
        m.functions["socrates"] = {c};
        m.predicates["man"] = {bool(man_bits & 1), bool(man_bits & 2)};
        m.predicates["mortal"] = {bool(mortal_bits & 1), bool(mortal_bits & 2)};
        if (!verify_model(premises, m)) continue;
        CHECK(eval_formula(parse_formula("mortal(socrates)."), m));
      }
    }
  }

  // constructed models for a trace step with a bigger signature: problem
  // 3's Resolve of -at(...)|ec(compile(...)) against at(cGP,...). Build
  // random domain-2 models that satisfy both premises by construction,
  // then require the accepted resolvent to hold in each.
  auto trace = load_trace("proof3.prf");
  auto clause_formula = [](const Clause& c) {
    Formula out = Formula::atom(c.literals[0]);
    for (std::size_t i = 1; i < c.literals.size(); ++i) {
      out = Formula::binary(Formula::Kind::Or, std::move(out),
                            Formula::atom(c.literals[i]));
    }
    return out;
  };
  std::vector<Formula> premise_formulas{clause_formula(trace[3].clause),
                                        clause_formula(trace[4].clause)};
  Formula conclusion = clause_formula(trace[8].clause);

  std::mt19937 rng(5150);
  int models_checked = 0;
  for (int sample = 0; sample < 200; ++sample) {
    Interpretation m;
    m.domain_size = 2;
    for (const char* name : {"cGP", "lsP", "sP", "eP", "eA"}) {
      m.arity[name] = 0;
      m.functions[name] = {int(rng() % 2)};
    }
    m.arity["compile"] = 5;
    std::vector<int> compile_table;
    for (int i = 0; i < 32; ++i) compile_table.push_back(int(rng() % 2));
    m.functions["compile"] = compile_table;

    // sparse random at table, then force the rows premise 5 needs
    m.arity["accurately_translates"] = 6;
    std::vector<bool> at_table(64);
    for (int i = 0; i < 64; ++i) at_table[std::size_t(i)] = rng() % 8 == 0;
    auto idx6 = [](int a, int b, int c, int d, int e, int f) {
      return std::size_t(((((a * 2 + b) * 2 + c) * 2 + d) * 2 + e) * 2 + f);
    };
    int cgp = m.functions["cGP"][0], lsp = m.functions["lsP"][0];
    int sp = m.functions["sP"][0], ep = m.functions["eP"][0], ea = m.functions["eA"][0];
    at_table[idx6(cgp, lsp, sp, 0, ep, ea)] = true;
    at_table[idx6(cgp, lsp, sp, 1, ep, ea)] = true;
    m.predicates["accurately_translates"] = at_table;

    // derive ec so that premise 4 holds: wherever at(a,b,c,d,e,f) is true,
    // ec(compile(c,a,d,e,f),c,b,f) must be true; the rest is random
    m.arity["exactly_correspond"] = 4;
    std::vector<bool> ec_table(16);
    for (int i = 0; i < 16; ++i) ec_table[std::size_t(i)] = rng() % 2 == 0;
    auto idx4 = [](int a, int b, int c, int d) {
      return std::size_t(((a * 2 + b) * 2 + c) * 2 + d);
    };
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d)
            for (int e = 0; e < 2; ++e)
              for (int f = 0; f < 2; ++f) {
                if (!at_table[idx6(a, b, c, d, e, f)]) continue;
                int compiled =
                    compile_table[std::size_t((((c * 2 + a) * 2 + d) * 2 + e) * 2 + f)];
                ec_table[idx4(compiled, c, b, f)] = true;
              }
    m.predicates["exactly_correspond"] = ec_table;

    REQUIRE(verify_model(premise_formulas, m));
    ++models_checked;
    CHECK(eval_formula(conclusion, m));
  }
  CHECK(models_checked == 200);
}
