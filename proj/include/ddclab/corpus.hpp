#pragma once

#include <string>
#include <vector>

#include "ddclab/machine.hpp"
#include "ddclab/sexpr.hpp"

namespace ddclab::corpus {

// The compiler corpus: a correct self-hosting mini-Lisp compiler, a
// reconstructed maliciously corrupted variant, and the two demo programs
// it mistreats or compiles honestly. Executables are produced by the
// trusted evaluator from the sources; nothing here is hand-assembled.

// Six DEFUNs: OPERATORP, COMPILE-FORMS, COMPILE-FORM, COMPILE-DEF,
// COMPILE-DEFS, COMPILE-PROGRAM.
const SExpr& correct_compiler_source();

// The corrupted compiler: the honest helpers plus LOGIN-SOURCE,
// COMPILER-SOURCE, SUBST, and a COMPILE-PROGRAM with two triggers. Fed its
// own clean ancestor's source it emits its own executable (the quine);
// fed the login program it swaps in the INCORRECT login; anything else
// compiles honestly.
const SExpr& incorrect_compiler_source();

const machine::MachineProgram& correct_compiler_executable();
const machine::MachineProgram& incorrect_compiler_executable();

// Program files are triples (DEFS VARS MAIN).
SExpr login_program();       // vars (U), main (LOGIN U)
SExpr factorial_program();   // vars (N), main (FAC N)

// Wraps compiler DEFUNs as a compilable program:
//   (defs (DEFS VARS MAIN) (COMPILE-PROGRAM DEFS VARS MAIN))
SExpr compiler_as_program(const SExpr& defs);

struct Artifact {
  std::string id;
  std::string kind;  // "source" or "executable"
  SExpr value;
  std::string provenance;
};

// Every embedded artifact with its canonical hash recorded in the shipped
// manifest; tests check the manifest against these values.
std::vector<Artifact> all_artifacts();

}  // namespace ddclab::corpus
