#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ddclab/sexpr.hpp"

namespace ddclab::machine {

class MachineError : public Error {
 public:
  enum class Kind {
    Decode,
    FuelExhausted,
    DepthExceeded,
    StackUnderflow,
    PushVOutOfRange,
    OperatorDomain,
    IntegerOverflow,
  };

  MachineError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// The closed operator vocabulary of the compiled programs. Arity is 1 or 2.
bool is_operator(std::string_view name);
int operator_arity(std::string_view name);

// Common-Lisp-flavored operator semantics over the SExpr universe:
// CAR/CDR of NIL are NIL, CxR compose, truth values are T and NIL,
// arithmetic is checked 64-bit. Domain violations throw.
SExpr apply_operator(std::string_view op, std::span<const SExpr> args);

struct Instruction;
using Code = std::vector<Instruction>;

struct PushC { SExpr constant; };
struct PushV { std::int64_t index = 0; };  // 0 = top of stack
struct Opr  { std::string op; };
struct Call { std::string fn; };
struct If   { Code then_code; Code else_code; };
struct Pop  { std::int64_t count = 0; };

struct Instruction {
  std::variant<PushC, PushV, Opr, Call, If, Pop> op;
};

// A compiled program: DEFCODE table in definition order plus the main
// instruction list. Encodable to and from the on-disk S-expression shape
//   ((DEFCODE name (instr...)) ... (main-instr...))
class MachineProgram {
 public:
  const std::vector<std::pair<std::string, Code>>& defcodes() const { return defcodes_; }
  const Code& main_code() const { return main_code_; }
  const Code* find_defcode(std::string_view name) const;

  static MachineProgram decode(const SExpr& x);  // throws MachineError(Decode)
  SExpr encode() const;

 private:
  std::vector<std::pair<std::string, Code>> defcodes_;
  std::map<std::string, std::size_t, std::less<>> index_;
  Code main_code_;
};

struct RunLimits {
  std::uint64_t fuel = 10'000'000;
  std::uint64_t max_call_depth = 100'000;
};

struct RunResult {
  SExpr value;
  std::uint64_t steps = 0;  // instructions executed; equal across equal runs
};

// Pushes the inputs onto an empty stack in order (last input on top),
// executes the main code, and returns the single remaining value.
RunResult run_program(const MachineProgram& prog, std::span<const SExpr> inputs,
                      const RunLimits& limits = {});

}  // namespace ddclab::machine
