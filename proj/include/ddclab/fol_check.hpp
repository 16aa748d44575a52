#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddclab/fol.hpp"

namespace ddclab::fol {

// Conjunctive normal form of a universally quantified formula. Throws
// FolError for formulas outside the quantifier-free-after-stripping
// fragment (anything that would need existential handling).
std::vector<Clause> clausify(const Formula& f);

using Substitution = std::map<std::string, Term>;

Term apply_substitution(const Term& t, const Substitution& s);
Literal apply_substitution(const Literal& l, const Substitution& s);

// Most general unifier with occurs check; nullopt on failure.
std::optional<Substitution> unify(const Term& a, const Term& b);
std::optional<Substitution> unify_atoms(const Atom& a, const Atom& b);

// Alpha-equivalence: same structure under some variable bijection.
bool alpha_equal_formulas(const Formula& a, const Formula& b);

// Clause match up to variable renaming and literal order; when
// allow_equality_flip is set, individual equality literals may also match
// with swapped sides (used for Deny and Clausify verification).
bool clauses_match(const Clause& claimed, const Clause& computed,
                   bool allow_equality_flip);

struct CheckResult {
  bool accepted = false;
  int failing_step = 0;       // 0 when accepted
  std::string reason;
};

// Verifies one step against already-verified earlier steps. `earlier`
// maps step id to the step.
CheckResult check_step(const ProofStep& step,
                       const std::map<int, const ProofStep*>& earlier,
                       const Problem& problem);

// Accepts iff every step checks and the trace ends in the empty clause.
CheckResult check_proof(const Problem& problem, const std::vector<ProofStep>& trace);

// All binary resolvents of two clauses (up to mgu), duplicates removed
// inside each resolvent. Exposed for the soundness cross-checks.
std::vector<Clause> resolvents(const Clause& c1, const Clause& c2);

// All paramodulants: rewrite a non-variable subterm of one premise using a
// positive equality literal of the other, either premise order, either
// equality direction.
std::vector<Clause> paramodulants(const Clause& c1, const Clause& c2);

}  // namespace ddclab::fol
