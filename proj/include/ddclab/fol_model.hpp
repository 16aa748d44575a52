#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddclab/fol.hpp"

namespace ddclab::fol {

// Signature extracted from a formula set: constants, functions, and
// predicates with their arities.
struct Signature {
  std::map<std::string, int> functions;   // name -> arity (constants are 0)
  std::map<std::string, int> predicates;  // name -> arity

  void merge_formula(const Formula& f);
};

// Finite interpretation over domain {0 .. domain_size-1} with total
// function and predicate tables.
struct Interpretation {
  int domain_size = 1;
  std::map<std::string, std::vector<int>> functions;   // table size n^arity
  std::map<std::string, std::vector<bool>> predicates;
  std::map<std::string, int> arity;                    // shared name -> arity

  int fn_value(const std::string& name, const std::vector<int>& args) const;
  bool pred_value(const std::string& name, const std::vector<int>& args) const;
};

// mace4-style cooked format: `c = 0.`, `f(0,1) = 1.`, `p(0,0).` for true
// rows and `- p(0,1).` for false rows; `%` comments. The domain size is
// inferred from the largest element mentioned; totality is then required.
Interpretation parse_model(std::string_view text);

// Structural evaluation; free variables are universally quantified over
// the domain. Throws FolError if the model's signature does not cover the
// formula.
bool eval_formula(const Formula& f, const Interpretation& m);

// True iff every assumption evaluates true.
bool verify_model(const std::vector<Formula>& assumptions, const Interpretation& m);

// Exhaustive backtracking search over interpretations of domain size
// 1..max_domain, with least-number symmetry pruning on constants. Returns
// the first model found.
std::optional<Interpretation> search_model(const std::vector<Formula>& assumptions,
                                           int max_domain);

std::string to_string(const Interpretation& m);

}  // namespace ddclab::fol
