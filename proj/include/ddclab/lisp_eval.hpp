#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ddclab/sexpr.hpp"

namespace ddclab::lisp_eval {

class EvalError : public Error {
 public:
  enum class Kind {
    Load,
    FuelExhausted,
    DepthExceeded,
    ArityMismatch,
    Unbound,
    OperatorDomain,
  };

  EvalError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Loaded (DEFUN name (params...) body) environment. Immutable after load;
// this evaluator is the trusted compiler platform and deliberately shares
// no implementation with the stack machine.
class DefunEnv {
 public:
  struct Defun {
    std::vector<std::string> params;
    SExpr body;
  };

  // defs must be a list of DEFUN forms. Rejects duplicate names, DEFUNs
  // shadowing operator/special-form names, and any reference in a body to
  // an unbound variable or undefined function.
  static DefunEnv load(const SExpr& defs);

  bool has_function(std::string_view name) const;
  const Defun& function(std::string_view name) const;
  std::size_t size() const { return functions_.size(); }

 private:
  std::map<std::string, Defun, std::less<>> functions_;
};

struct EvalLimits {
  std::uint64_t fuel = 10'000'000;
  std::uint64_t max_depth = 10'000;
};

struct EvalResult {
  SExpr value;
  std::uint64_t steps = 0;  // function calls plus operator applications
};

// Strict call-by-value evaluation of fn applied to args. Special forms are
// QUOTE and IF (NIL is the only false value); operator semantics follow
// the same specification as the machine but not its code.
EvalResult eval_call(const DefunEnv& env, std::string_view fn,
                     std::span<const SExpr> args, const EvalLimits& limits = {});

}  // namespace ddclab::lisp_eval
