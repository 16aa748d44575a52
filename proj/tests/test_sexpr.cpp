#include <doctest.h>

#include "ddclab/sexpr.hpp"
#include "ddclab/sha256.hpp"
#include "test_support.hpp"

using namespace ddclab;

TEST_CASE("parse basics") {
  SExpr x = parse_sexpr("(PUSHC NIL)");
  REQUIRE(x.is_list());
  REQUIRE(x.size() == 2);
  CHECK(x.items()[0].is_symbol_named("PUSHC"));
  CHECK(x.items()[1].is_nil());

  SExpr quoted = parse_sexpr("'(THIS IS THE CORRECT LOGIN)");
  REQUIRE(quoted.size() == 2);
  CHECK(quoted.items()[0].is_symbol_named("QUOTE"));
  CHECK(quoted.items()[1].size() == 5);

  SExpr sum = parse_sexpr("(+ 1999 1)");
  CHECK(sum.items()[0].is_symbol_named("+"));
  CHECK(sum.items()[1].int_value() == 1999);
  CHECK(sum.items()[2].int_value() == 1);
}

TEST_CASE("NIL and the empty list are one value") {
  CHECK(parse_sexpr("()").is_nil());
  CHECK(parse_sexpr("NIL").is_nil());
  CHECK(parse_sexpr("nil").is_nil());
  CHECK(sexpr_equal(parse_sexpr("()"), SExpr::nil()));
  CHECK(sexpr_equal(SExpr::list({}), SExpr::nil()));
}

TEST_CASE("symbols uppercase at parse time") {
  CHECK(print_inline(parse_sexpr("(This is the CORRECT login)")) ==
        "(THIS IS THE CORRECT LOGIN)");
  CHECK(parse_sexpr("foo-bar").is_symbol_named("FOO-BAR"));
}

TEST_CASE("integer tokens") {
  CHECK(parse_sexpr("-5").int_value() == -5);
  CHECK(parse_sexpr("+7").int_value() == 7);
  CHECK(parse_sexpr("9223372036854775807").int_value() == 9223372036854775807LL);
  // lone signs and mixed tokens are symbols
  CHECK(parse_sexpr("-").is_symbol_named("-"));
  CHECK(parse_sexpr("1-").is_symbol_named("1-"));
  CHECK(parse_sexpr("1+").is_symbol_named("1+"));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_sexpr("(A B"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("A B)"), ParseError);
  CHECK_THROWS_AS(parse_sexpr(""), ParseError);
  CHECK_THROWS_AS(parse_sexpr("   ; only a comment\n"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("(A) garbage"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("9223372036854775808"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("-9223372036854775809"), ParseError);
}

TEST_CASE("comments and whitespace") {
  SExpr x = parse_sexpr("; header\n(A ; mid\n B)\n");
  CHECK(print_inline(x) == "(A B)");
}

TEST_CASE("canonical printing") {
  CHECK(print_canonical(SExpr::nil()) == "NIL\n");
  CHECK(print_canonical(parse_sexpr("(POP 1)")) == "(POP 1)\n");
  CHECK(print_canonical(parse_sexpr("( A  (B\nC) )")) == "(A (B C))\n");
  // quote sugar prints in full
  CHECK(print_inline(parse_sexpr("'X")) == "(QUOTE X)");
}

TEST_CASE("equality examples") {
  CHECK(sexpr_equal(SExpr::integer(5), SExpr::integer(5)));
  CHECK(sexpr_equal(SExpr::nil(), SExpr::list({})));
  CHECK_FALSE(sexpr_equal(parse_sexpr("(A B)"), parse_sexpr("(A C)")));
  CHECK_FALSE(sexpr_equal(parse_sexpr("(A B)"), parse_sexpr("(A B C)")));
  CHECK_FALSE(sexpr_equal(SExpr::integer(5), SExpr::symbol("FIVE")));
}

TEST_CASE("equality is an equivalence relation on generated values") {
  testing::SExprGen gen(20250809);
  std::vector<SExpr> values;
  for (int i = 0; i < 40; ++i) values.push_back(gen.next(3));
  for (const auto& a : values) {
    CHECK(sexpr_equal(a, a));
    for (const auto& b : values) {
      CHECK(sexpr_equal(a, b) == sexpr_equal(b, a));
      for (const auto& c : values) {
        if (sexpr_equal(a, b) && sexpr_equal(b, c)) CHECK(sexpr_equal(a, c));
      }
    }
  }
}

TEST_CASE("round trip: parse of canonical text reproduces the value") {
  testing::SExprGen gen(42);
  for (int i = 0; i < 300; ++i) {
    SExpr x = gen.next();
    std::string text = print_canonical(x);
    SExpr back = parse_sexpr(text);
    CHECK(sexpr_equal(back, x));
    // normalization is idempotent
    CHECK(print_canonical(back) == text);
  }
}

TEST_CASE("sha256 known vectors") {
  // Digests computed with an independent implementation (Python hashlib).
  CHECK(Sha256::hex_digest("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(Sha256::hex_digest("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // long input crossing several blocks
  std::string big(1000, 'a');
  CHECK(Sha256::hex_digest(big) ==
        "41edece42d63e8d9bf515a9ba6932e1c20cbc9f5a5d134645adb5db1b9737ea3");
}

TEST_CASE("canonical hash") {
  // SHA-256 of the four bytes "NIL\n", computed independently.
  CHECK(canonical_hash(SExpr::nil()) ==
        "14fcc52d92b64e2e7ac7b3bd783160c3ab02356339395661739624a4bec0d45a");
  CHECK(canonical_hash(parse_sexpr("(A (B))")) == Sha256::hex_digest("(A (B))\n"));

  testing::SExprGen gen(7);
  for (int i = 0; i < 50; ++i) {
    SExpr x = gen.next();
    SExpr y = parse_sexpr(print_canonical(x));
    CHECK(canonical_hash(x) == canonical_hash(y));
  }
}

TEST_CASE("pretty printer splits long lists but parses back") {
  SExpr x = parse_sexpr(
      "(DEFCODE COMPILE-FORMS ((PUSHV 2) (OPR CONSP) (IF ((PUSHV 2) (OPR CAR)"
      " (PUSHV 2) (PUSHV 2) (CALL COMPILE-FORM)) ((PUSHC NIL))) (POP 3)))");
  std::string pretty = print_pretty(x);
  CHECK(pretty.find('\n') != std::string::npos);
  CHECK(sexpr_equal(parse_sexpr(pretty), x));
}

TEST_CASE("contains_subterm") {
  SExpr tree = parse_sexpr("(A (B (C 1)) D)");
  CHECK(contains_subterm(tree, parse_sexpr("(C 1)")));
  CHECK(contains_subterm(tree, SExpr::symbol("D")));
  CHECK_FALSE(contains_subterm(tree, parse_sexpr("(C 2)")));
}
