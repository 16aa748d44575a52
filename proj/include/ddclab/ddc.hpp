#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "ddclab/lisp_eval.hpp"
#include "ddclab/machine.hpp"
#include "ddclab/sexpr.hpp"

namespace ddclab::ddc {

// A program fed to a compiler: DEFUN list, variable list, main form.
// On disk and between stages this is the single list (DEFS VARS MAIN).
struct ProgramSource {
  SExpr defs;
  SExpr vars;
  SExpr main;

  static ProgramSource from_sexpr(const SExpr& x);
  SExpr to_sexpr() const;
};

// A compiler is either the trusted host-level evaluator holding compiler
// DEFUNs, or a compiled executable run on the stack machine. The two share
// no implementation; that diversity is what DDC leans on.
struct TrustedCompiler {
  lisp_eval::DefunEnv env;

  static TrustedCompiler from_source(const SExpr& compiler_defs);
};

struct MachineCompiler {
  machine::MachineProgram exe;
};

using CompilerHandle = std::variant<TrustedCompiler, MachineCompiler>;

class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Identity hooks. There is one language, one target machine, and one text
// encoding here, but the dataflow keeps these steps visible: sources are
// retargeted before compiling, and compiler output is written out as
// canonical text, converted, and read back before use.
ProgramSource retarget(ProgramSource source, std::string_view target_environment);
std::string convert_text(std::string text, std::string_view from_environment,
                         std::string_view to_environment);
machine::MachineProgram extract_executable(const SExpr& compiler_output);

// Applies a compiler to a program and returns the produced executable.
// Throws StageError on evaluator/VM failure or undecodable output. When
// steps_used is given it receives the fuel the compilation consumed.
machine::MachineProgram apply_compiler(const CompilerHandle& compiler,
                                       const ProgramSource& program,
                                       std::uint64_t fuel = 10'000'000,
                                       std::uint64_t* steps_used = nullptr);

struct DdcVerdict {
  enum class Outcome { Passed, Failed, StageFailure };

  Outcome outcome = Outcome::StageFailure;
  bool passed() const { return outcome == Outcome::Passed; }

  std::string hash_under_test;
  std::string hash_stage2;
  std::string stage1_hash;

  // Defcode-granularity localization, empty when passed.
  std::vector<std::string> added_defcodes;
  std::vector<std::string> removed_defcodes;
  std::vector<std::string> changed_defcodes;
  bool main_changed = false;

  // Defcode summary followed by a unified line diff of the pretty forms.
  std::vector<std::string> diff;

  // Stage failures only: which stage broke and why, plus the proof
  // assumptions a failure of that stage puts in question.
  std::string failed_stage;
  std::string error;
  std::vector<std::string> suspect_assumptions;

  std::uint64_t fuel_used = 0;  // steps spent across both stages
};

// Diverse double-compilation: stage1 = trusted(sP), stage2 = stage1(sA),
// verdict = bit-exact comparison of stage2 against the compiler under
// test. sP == sA is the self-parenting special case.
DdcVerdict ddc_check(const machine::MachineProgram& c_under_test,
                     const ProgramSource& source_a, const ProgramSource& source_p,
                     const CompilerHandle& trusted, std::uint64_t fuel = 10'000'000);

struct SelfRegenResult {
  enum class Outcome { Regenerates, Differs, StageFailure };
  Outcome outcome;
  std::string exe_hash;
  std::string regenerated_hash;
  std::string error;

  bool regenerates() const { return outcome == Outcome::Regenerates; }
};

// Compiles source with the executable itself and compares. A corrupted
// self-perpetuating compiler passes this; that insufficiency is the point.
SelfRegenResult self_regeneration_check(const machine::MachineProgram& exe,
                                        const ProgramSource& source,
                                        std::uint64_t fuel = 10'000'000);

struct BootstrapResult {
  enum class Outcome { Passed, Failed, StageFailure };
  Outcome outcome;
  std::string m0_hash;
  std::string m1_hash;
  std::string m2_hash;
  std::string failed_stage;
  std::string error;

  bool passed() const { return outcome == Outcome::Passed; }
};

// m0 = trusted(s); m1 = m0(s); m2 = m1(s); passes iff m1 == m2.
BootstrapResult bootstrap_test(const ProgramSource& source,
                               const CompilerHandle& trusted,
                               std::uint64_t fuel = 10'000'000);

// Pretty, multi-line rendering of an executable used for the line diff:
// every defcode starts a line group with one instruction per line.
std::vector<std::string> executable_lines(const machine::MachineProgram& prog);

}  // namespace ddclab::ddc
