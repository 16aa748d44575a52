#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddclab/sexpr.hpp"

namespace ddclab::fol {

class FolError : public Error {
 public:
  using Error::Error;
};

// First-order term. Names starting with an uppercase letter are variables;
// everything else is a constant (arity 0) or function application.
struct Term {
  enum class Kind { Var, Const, Fn };
  Kind kind = Kind::Const;
  std::string name;
  std::vector<Term> args;  // Fn only

  static Term var(std::string n) { return {Kind::Var, std::move(n), {}}; }
  static Term constant(std::string n) { return {Kind::Const, std::move(n), {}}; }
  static Term fn(std::string n, std::vector<Term> a) {
    return {Kind::Fn, std::move(n), std::move(a)};
  }
};

bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }
std::string to_string(const Term& t);

// Atomic formula: a predicate application or an equality between terms.
struct Atom {
  bool is_equality = false;
  std::string pred;  // empty for equalities
  std::vector<Term> args;

  static Atom equality(Term l, Term r) { return {true, "", {std::move(l), std::move(r)}}; }
  static Atom predicate(std::string p, std::vector<Term> a) {
    return {false, std::move(p), std::move(a)};
  }
};

bool operator==(const Atom& a, const Atom& b);
std::string to_string(const Atom& a);

struct Literal {
  bool positive = true;
  Atom atom;
};

bool operator==(const Literal& a, const Literal& b);
std::string to_string(const Literal& l);

// Disjunction of literals; free variables are implicitly universal; the
// empty clause is falsity ($F). Duplicate literals are removed on
// normalization.
struct Clause {
  std::vector<Literal> literals;

  bool empty() const { return literals.empty(); }
  void normalize();  // drop duplicate literals
};

bool operator==(const Clause& a, const Clause& b);
std::string to_string(const Clause& c);

// Formula tree over the connectives the proofs use. Unbound variables are
// universally quantified.
struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, ForAll };
  Kind kind = Kind::Atom;
  Literal lit;                              // Atom: holds sign for != sugar
  std::vector<Formula> children;            // Not:1, And/Or/Implies:2
  std::string bound_var;                    // ForAll

  static Formula atom(Literal l) {
    Formula f;
    f.kind = Kind::Atom;
    f.lit = std::move(l);
    return f;
  }
  static Formula unary(Kind k, Formula a);
  static Formula binary(Kind k, Formula a, Formula b);
  static Formula forall(std::string var, Formula body);
};

std::string to_string(const Formula& f);

// ASCII syntax: `-` negation, `&`, `|`, `->` (right associative, lowest
// precedence), `all X <unit>`, `=`, `!=`, predicate/function application,
// optional trailing `.`.
Formula parse_formula(std::string_view text);
Term parse_term(std::string_view text);

struct NamedFormula {
  std::string label;
  Formula formula;
};

// A .fol problem: labeled assumptions then exactly one goal.
//   assumption <label>: <formula>.
//   goal <label>: <formula>.
// `%` comments to end of line.
struct Problem {
  std::vector<NamedFormula> assumptions;
  NamedFormula goal;

  const Formula* find_assumption(std::string_view label) const;
};

Problem parse_problem(std::string_view text);

struct Rationale {
  enum class Kind { Assumption, Goal, Clausify, CopyFlip, Deny, Resolve, Para };
  Kind kind = Kind::Assumption;
  std::string label;  // Assumption/Goal
  int premise1 = 0;
  int premise2 = 0;
};

// One numbered trace step. Assumption and Goal steps restate formulas;
// derived steps carry clauses; `$F` is the empty clause.
struct ProofStep {
  int id = 0;
  bool is_formula = false;
  Formula formula;
  Clause clause;
  Rationale rationale;
};

// A .prf trace: `<id>. <content>. <rationale>` per line, rationale
// vocabulary exactly: Assumption <label> | Goal <label> | Clausify <i> |
// Copy <i>, flip | Deny <i> | Resolve <i> <j> | Para <i> <j>.
std::vector<ProofStep> parse_proof(std::string_view text);

}  // namespace ddclab::fol
