// Writes the corpus directory: canonical-text artifacts, the hash
// manifest, and the provenance notes. Output is deterministic; the repo
// ships the result and the test suite verifies it against the embedded
// artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "ddclab/corpus.hpp"
#include "ddclab/version.hpp"

namespace fs = std::filesystem;
using ddclab::corpus::all_artifacts;

namespace {

constexpr const char* kProvenance = R"(# Corpus provenance

The artifacts in this directory derive from the compiler pair published by
Wolfgang Goerigk ("Compiler Verification Revisited" and related work,
1999-2002): a small self-hosting mini-Lisp compiler targeting a stack
machine, plus a maliciously corrupted variant demonstrating the
trusting-trust attack.

## Files

- correct.src    - the clean six-DEFUN compiler, wrapped as the program
                   (defs (DEFS VARS MAIN) (COMPILE-PROGRAM DEFS VARS MAIN)).
- correct.exe    - correct.src compiled by the trusted evaluator. Running
                   it on correct.src reproduces it bit for bit.
- incorrect.src  - the reconstructed corrupted compiler: the clean helpers
                   plus LOGIN-SOURCE, COMPILER-SOURCE, SUBST, and a
                   COMPILE-PROGRAM with two triggers. The published record
                   fixes its executable, not its source spelling; this
                   reconstruction is pinned behaviorally (see below).
- incorrect.exe  - incorrect.src compiled by the trusted evaluator.
- login.src      - the login stub, vars (U), main (LOGIN U).
- fac.src        - the factorial demo, vars (N), main (FAC N).
- manifest.json  - SHA-256 of each file's canonical text.

## Transcription corrections

Published listings of this pair circulate with OCR-style garbles. The
forms here normalize:

- operator list: CADDAR and CADDDR (garbled as CADDAR/CADDR duplicates or
  CADDRAR/CADDRDR),
- COMPILE-FORM, IF case: the else branch reads (CADDDR FORM) (garbled as a
  repeated CADDR),
- COMPILE-DEF: the body selector reads (CADDDR DEF), the parameter-list
  selector (CADDR DEF),
- APPEND (garbled as APEND).

The corrections are pinned by behavior, not by eye: correct.exe must be a
self-compilation fixpoint, compiling fac.src must give the published
factorial code, login.src must compile to the CORRECT/INCORRECT pair, and
incorrect.exe must regenerate itself from correct.src through its quine.
The test suite enforces all four.

## The quine marker

incorrect.src's COMPILE-PROGRAM contains (SUBST '<template> (+ 1999 1)
'<template>), where the quoted template is the whole DEFUN list with the
integer 2000 standing in the two spots where the template itself belongs.
Writing the comparison value as (+ 1999 1) keeps the marker atom 2000 out
of every non-marker position. Splicing the template into its own markers
yields exactly incorrect.src; the emitted code is therefore the compiler's
own executable. Any spelling with this trigger structure and the
self-regeneration property would be equivalent; this is the one shipped.

## Wrapper conventions

A program file is one list (DEFS VARS MAIN). Compiler sources use
VARS = (DEFS VARS MAIN) and MAIN = (COMPILE-PROGRAM DEFS VARS MAIN), read
off the compiled main ((PUSHV 2) (PUSHV 2) (PUSHV 2) (CALL
COMPILE-PROGRAM) (POP 3)). The login wrapper here passes one unused
variable, so its compiled main is ((PUSHV 0) (CALL LOGIN) (POP 1)); the
historical listing compiled the bare call form instead. The DEFCODE LOGIN
bodies are token-for-token the published ones.
)";

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? argv[1] : "corpus";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cannot create " << dir << ": " << ec.message() << "\n";
    return 2;
  }

  nlohmann::ordered_json manifest;
  manifest["algorithm"] = ddclab::kDigestAlgorithm;
  manifest["tool_version"] = ddclab::kToolVersion;
  manifest["artifacts"] = nlohmann::ordered_json::array();

  for (const auto& artifact : all_artifacts()) {
    std::string text = ddclab::print_canonical(artifact.value);
    std::ofstream out(dir / artifact.id, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << (dir / artifact.id) << "\n";
      return 2;
    }
    out << text;
    manifest["artifacts"].push_back({
        {"id", artifact.id},
        {"kind", artifact.kind},
        {"sha256", ddclab::canonical_hash(artifact.value)},
        {"provenance", artifact.provenance},
    });
  }

  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << "\n";
  std::ofstream prov(dir / "PROVENANCE.md", std::ios::binary);
  prov << kProvenance;
  std::cout << "wrote " << dir << "\n";
  return 0;
}
