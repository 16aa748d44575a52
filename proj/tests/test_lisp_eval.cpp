#include <doctest.h>

#include "ddclab/corpus.hpp"
#include "ddclab/lisp_eval.hpp"
#include "ddclab/machine.hpp"
#include "test_support.hpp"

using namespace ddclab;
using namespace ddclab::lisp_eval;

namespace {

SExpr sx(const char* text) { return parse_sexpr(text); }

SExpr call1(const DefunEnv& env, const char* fn, SExpr arg) {
  std::vector<SExpr> args{std::move(arg)};
  return eval_call(env, fn, args).value;
}

}  // namespace

TEST_CASE("load the correct compiler environment") {
  auto env = DefunEnv::load(corpus::correct_compiler_source());
  CHECK(env.size() == 6);
  for (const char* fn : {"OPERATORP", "COMPILE-FORMS", "COMPILE-FORM", "COMPILE-DEF",
                         "COMPILE-DEFS", "COMPILE-PROGRAM"}) {
    CHECK(env.has_function(fn));
  }
}

TEST_CASE("load errors") {
  CHECK_NOTHROW(DefunEnv::load(sx("((DEFUN ID (X) X))")));
  CHECK_THROWS_AS(DefunEnv::load(sx("((DEFUN F (X) (G X)))")), EvalError);  // undefined G
  CHECK_THROWS_AS(DefunEnv::load(sx("((DEFUN F (X) Y))")), EvalError);      // unbound Y
  CHECK_THROWS_AS(DefunEnv::load(sx("((DEFUN F (X) X) (DEFUN F (Y) Y))")), EvalError);
  CHECK_THROWS_AS(DefunEnv::load(sx("((DEFUN F (X)))")), EvalError);  // malformed
  CHECK_THROWS_AS(DefunEnv::load(sx("(42)")), EvalError);
  // operator and special-form names cannot be shadowed
  CHECK_THROWS_AS(DefunEnv::load(sx("((DEFUN CONS (X Y) X))")), EvalError);
  CHECK_THROWS_AS(DefunEnv::load(sx("((DEFUN IF (X) X))")), EvalError);
}

TEST_CASE("identity and special forms") {
  auto env = DefunEnv::load(sx("((DEFUN ID (X) X))"));
  CHECK(call1(env, "ID", SExpr::integer(7)).int_value() == 7);
  CHECK(call1(env, "ID", SExpr::nil()).is_nil());

  auto env2 = DefunEnv::load(sx(
      "((DEFUN PICK (X) (IF X 'YES 'NO)) (DEFUN QQ (X) '(A B)) (DEFUN TT (X) T))"));
  CHECK(call1(env2, "PICK", SExpr::symbol("ANY")).is_symbol_named("YES"));
  CHECK(call1(env2, "PICK", SExpr::nil()).is_symbol_named("NO"));
  CHECK(sexpr_equal(call1(env2, "QQ", SExpr::nil()), sx("(A B)")));
  CHECK(call1(env2, "TT", SExpr::nil()).is_symbol_named("T"));
}

TEST_CASE("OPERATORP recognizes operators via MEMBER") {
  auto env = DefunEnv::load(corpus::correct_compiler_source());
  // hand-evaluated: MEMBER over the operator list returns the tail from CONS
  SExpr tail = call1(env, "OPERATORP", SExpr::symbol("CONS"));
  REQUIRE_FALSE(tail.is_nil());
  CHECK(tail.items().front().is_symbol_named("CONS"));
  CHECK(sexpr_equal(tail, sx("(CONS EQUAL APPEND MEMBER ASSOC + - * LIST1 LIST2)")));
  CHECK(call1(env, "OPERATORP", SExpr::symbol("FROB")).is_nil());
}

TEST_CASE("compiling factorial yields the published machine code") {
  auto env = DefunEnv::load(corpus::correct_compiler_source());
  const auto& prog = corpus::factorial_program();
  auto result = eval_call(env, "COMPILE-PROGRAM",
                          std::vector<SExpr>(prog.items().begin(), prog.items().end()));
  SExpr expected = sx(
      "((DEFCODE FAC"
      "  ((PUSHV 0) (PUSHC 0) (OPR EQUAL)"
      "   (IF ((PUSHC 1)) ((PUSHV 0) (PUSHV 1) (OPR 1-) (CALL FAC) (OPR *)))"
      "   (POP 1)))"
      " ((PUSHV 0) (CALL FAC) (POP 1)))");
  CHECK(sexpr_equal(result.value, expected));
}

TEST_CASE("eval errors") {
  auto env = DefunEnv::load(sx("((DEFUN ID (X) X))"));
  std::vector<SExpr> two{SExpr::integer(1), SExpr::integer(2)};
  CHECK_THROWS_AS(eval_call(env, "ID", two), EvalError);          // arity
  CHECK_THROWS_AS(eval_call(env, "NOPE", two), EvalError);        // undefined
  auto bad = DefunEnv::load(sx("((DEFUN F (X) (CAR X)))"));
  std::vector<SExpr> one_int{SExpr::integer(3)};
  CHECK_THROWS_AS(eval_call(bad, "F", one_int), EvalError);       // CAR of integer

  auto loop = DefunEnv::load(sx("((DEFUN LOOP (X) (LOOP X)))"));
  EvalLimits tight;
  tight.fuel = 100;
  std::vector<SExpr> arg{SExpr::nil()};
  try {
    eval_call(loop, "LOOP", arg, tight);
    FAIL("expected fuel exhaustion");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::FuelExhausted);
  }
  EvalLimits shallow;
  shallow.max_depth = 10;
  try {
    eval_call(loop, "LOOP", arg, shallow);
    FAIL("expected depth error");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalError::Kind::DepthExceeded);
  }
}

TEST_CASE("determinism of eval_call") {
  auto env = DefunEnv::load(corpus::correct_compiler_source());
  const auto& prog = corpus::login_program();
  std::vector<SExpr> args(prog.items().begin(), prog.items().end());
  auto r1 = eval_call(env, "COMPILE-PROGRAM", args);
  auto r2 = eval_call(env, "COMPILE-PROGRAM", args);
  CHECK(sexpr_equal(r1.value, r2.value));
  CHECK(r1.steps == r2.steps);
}

TEST_CASE("oracle agreement: evaluator and machine compute the same functions") {
  // The compiled compiler and the evaluated compiler must agree wherever
  // the self-compilation exercises them; they are each other's oracle.
  auto env = DefunEnv::load(corpus::correct_compiler_source());
  const auto& exe = corpus::correct_compiler_executable();

  struct Case {
    const char* fn;
    std::vector<SExpr> args;
  };
  std::vector<Case> cases;
  cases.push_back({"OPERATORP", {SExpr::symbol("CONS")}});
  cases.push_back({"OPERATORP", {SExpr::symbol("FAC")}});
  cases.push_back({"COMPILE-FORM", {sx("(QUOTE (A B))"), sx("(X)"), SExpr::integer(0)}});
  cases.push_back({"COMPILE-FORM", {sx("(IF X 1 2)"), sx("(X)"), SExpr::integer(0)}});
  cases.push_back({"COMPILE-FORM", {sx("(FAC (1- N))"), sx("(N)"), SExpr::integer(0)}});
  cases.push_back({"COMPILE-FORMS", {sx("(X Y)"), sx("(X Y)"), SExpr::integer(0)}});
  cases.push_back({"COMPILE-DEF", {sx("(DEFUN ID (X) X)")}});
  cases.push_back({"COMPILE-DEFS", {sx("((DEFUN ID (X) X))")}});
  {
    const auto& prog = corpus::factorial_program();
    cases.push_back({"COMPILE-PROGRAM",
                     {prog.items()[0], prog.items()[1], prog.items()[2]}});
  }

  for (const auto& c : cases) {
    CAPTURE(c.fn);
    SExpr via_eval = eval_call(env, c.fn, c.args).value;

    // Run the matching defcode directly: a synthetic main pushes the
    // arguments and calls it; the function's own trailing POP removes
    // them, leaving just the result.
    SExpr encoded = exe.encode();
    std::vector<SExpr> items(encoded.items().begin(), encoded.items().end() - 1);
    std::vector<SExpr> main_items;
    for (const auto& a : c.args) {
      main_items.push_back(SExpr::list({SExpr::symbol("PUSHC"), a}));
    }
    main_items.push_back(SExpr::list({SExpr::symbol("CALL"), SExpr::symbol(c.fn)}));
    main_items.push_back(SExpr::list({SExpr::symbol("POP"), SExpr::integer(0)}));
    items.push_back(SExpr::list(std::move(main_items)));
    auto prog = machine::MachineProgram::decode(SExpr::list(std::move(items)));
    SExpr via_machine = machine::run_program(prog, {}).value;

    CHECK_MESSAGE(sexpr_equal(via_eval, via_machine), c.fn);
  }
}
