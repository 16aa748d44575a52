#include <doctest.h>

#include <algorithm>
#include <random>

#include "ddclab/corpus.hpp"
#include "ddclab/ddc.hpp"
#include "ddclab/machine.hpp"
#include "test_support.hpp"

using namespace ddclab;
using namespace ddclab::ddc;

namespace {

SExpr sx(const char* text) { return parse_sexpr(text); }

CompilerHandle trusted_handle() {
  return TrustedCompiler::from_source(corpus::correct_compiler_source());
}

ProgramSource correct_src() {
  return ProgramSource::from_sexpr(
      corpus::compiler_as_program(corpus::correct_compiler_source()));
}

ProgramSource incorrect_src() {
  return ProgramSource::from_sexpr(
      corpus::compiler_as_program(corpus::incorrect_compiler_source()));
}

bool diff_mentions(const DdcVerdict& v, const std::string& token) {
  return std::any_of(v.diff.begin(), v.diff.end(), [&](const std::string& line) {
    return line.find(token) != std::string::npos;
  });
}

void check_verdict_consistency(const DdcVerdict& v) {
  if (v.outcome == DdcVerdict::Outcome::Passed) {
    CHECK(v.hash_under_test == v.hash_stage2);
    CHECK(v.diff.empty());
  } else if (v.outcome == DdcVerdict::Outcome::Failed) {
    CHECK(v.hash_under_test != v.hash_stage2);
    CHECK_FALSE(v.diff.empty());
  }
}

}  // namespace

TEST_CASE("apply_compiler on both handle kinds") {
  auto trusted = trusted_handle();
  auto fac = ProgramSource::from_sexpr(corpus::factorial_program());

  auto fac_exe = apply_compiler(trusted, fac);
  CHECK(sexpr_equal(fac_exe.encode(),
                    sx("((DEFCODE FAC ((PUSHV 0) (PUSHC 0) (OPR EQUAL)"
                       " (IF ((PUSHC 1)) ((PUSHV 0) (PUSHV 1) (OPR 1-) (CALL FAC)"
                       " (OPR *))) (POP 1))) ((PUSHV 0) (CALL FAC) (POP 1)))")));

  // machine handle: the correct executable is its own compile fixpoint
  auto self = apply_compiler(
      CompilerHandle{MachineCompiler{corpus::correct_compiler_executable()}},
      correct_src());
  CHECK(sexpr_equal(self.encode(), corpus::correct_compiler_executable().encode()));

  // the corrupted executable mistranslates the login program
  auto login = apply_compiler(
      CompilerHandle{MachineCompiler{corpus::incorrect_compiler_executable()}},
      ProgramSource::from_sexpr(corpus::login_program()));
  CHECK(contains_subterm(login.encode(), sx("(THIS IS THE INCORRECT LOGIN)")));
}

TEST_CASE("apply_compiler stage errors carry the stage name") {
  auto trusted = trusted_handle();
  // a compiler-as-program wrapper around a non-compiler: output does not decode
  auto not_a_compiler = ProgramSource::from_sexpr(
      corpus::compiler_as_program(corpus::factorial_program().items()[0]));
  CHECK_THROWS_AS(apply_compiler(trusted, not_a_compiler), StageError);
}

TEST_CASE("ddc_check passes the correct executable") {
  auto verdict = ddc_check(corpus::correct_compiler_executable(), correct_src(),
                           correct_src(), trusted_handle());
  CHECK(verdict.passed());
  CHECK(verdict.hash_under_test == verdict.hash_stage2);
  CHECK(verdict.stage1_hash == verdict.hash_stage2);  // self-parenting fixpoint
  check_verdict_consistency(verdict);
}

TEST_CASE("ddc_check exposes the corrupted executable") {
  auto verdict = ddc_check(corpus::incorrect_compiler_executable(), correct_src(),
                           correct_src(), trusted_handle());
  CHECK(verdict.outcome == DdcVerdict::Outcome::Failed);
  CHECK(verdict.hash_under_test != verdict.hash_stage2);
  check_verdict_consistency(verdict);

  // localization at defcode granularity, matching the published diff
  CHECK(verdict.added_defcodes ==
        std::vector<std::string>{"COMPILER-SOURCE", "LOGIN-SOURCE", "SUBST"});
  CHECK(verdict.changed_defcodes == std::vector<std::string>{"COMPILE-PROGRAM"});
  CHECK(verdict.removed_defcodes.empty());
  CHECK_FALSE(verdict.main_changed);
  CHECK(diff_mentions(verdict, "LOGIN"));
}

TEST_CASE("ddc_check on the corrupted executable with its TRUE source passes") {
  // DDC proves source/executable correspondence, not benign behavior: the
  // corrupted executable does correspond to the corrupted source.
  auto verdict = ddc_check(corpus::incorrect_compiler_executable(), incorrect_src(),
                           incorrect_src(), trusted_handle());
  CHECK(verdict.passed());
}

TEST_CASE("single-instruction mutation yields a single-defcode diff") {
  SExpr encoded = corpus::correct_compiler_executable().encode();
  // bump the first PUSHV operand inside DEFCODE COMPILE-FORMS
  testing::ExecutableMutator mutator(encoded, 99);
  SExpr mutated = mutator.next_mutant();
  auto mutant = machine::MachineProgram::decode(mutated);
  auto verdict =
      ddc_check(mutant, correct_src(), correct_src(), trusted_handle());
  CHECK(verdict.outcome == DdcVerdict::Outcome::Failed);
  CHECK(verdict.added_defcodes.empty());
  CHECK(verdict.removed_defcodes.empty());
  CHECK(std::size_t(verdict.changed_defcodes.size()) + (verdict.main_changed ? 1 : 0) ==
        1);
  check_verdict_consistency(verdict);
}

TEST_CASE("mutation detection sample") {
  testing::ExecutableMutator mutator(corpus::correct_compiler_executable().encode(),
                                     2025);
  for (int i = 0; i < 10; ++i) {
    SExpr mutated = mutator.next_mutant();
    if (sexpr_equal(mutated, corpus::correct_compiler_executable().encode())) continue;
    auto mutant = machine::MachineProgram::decode(mutated);
    auto verdict = ddc_check(mutant, correct_src(), correct_src(), trusted_handle());
    CHECK(verdict.outcome == DdcVerdict::Outcome::Failed);
  }
}

TEST_CASE("self-regeneration passes for BOTH compilers against the clean source") {
  auto ok = self_regeneration_check(corpus::correct_compiler_executable(), correct_src());
  CHECK(ok.regenerates());

  // the attack survives self-regeneration; that is the insufficiency
  auto bad =
      self_regeneration_check(corpus::incorrect_compiler_executable(), correct_src());
  CHECK(bad.regenerates());
}

TEST_CASE("self-regeneration fails for a non-compiler source") {
  auto r = self_regeneration_check(corpus::correct_compiler_executable(),
                                   ProgramSource::from_sexpr(corpus::factorial_program()));
  CHECK(r.outcome == SelfRegenResult::Outcome::Differs);
  CHECK_FALSE(r.regenerates());

  // wrapping the factorial DEFUNs as a compiler program cannot even produce
  // a loadable executable: reported as a distinct stage failure
  auto r2 = self_regeneration_check(
      corpus::correct_compiler_executable(),
      ProgramSource::from_sexpr(
          corpus::compiler_as_program(corpus::factorial_program().items()[0])));
  CHECK(r2.outcome == SelfRegenResult::Outcome::StageFailure);
  CHECK_FALSE(r2.regenerates());
}

TEST_CASE("bootstrap test passes for the correct source with m0 = m1 = m2") {
  auto r = bootstrap_test(correct_src(), trusted_handle());
  CHECK(r.passed());
  CHECK(r.m0_hash == r.m1_hash);
  CHECK(r.m1_hash == r.m2_hash);
}

TEST_CASE("bootstrap test ALSO passes for the malicious source") {
  auto r = bootstrap_test(incorrect_src(), trusted_handle());
  CHECK(r.passed());
  CHECK(r.m1_hash == r.m2_hash);
}

TEST_CASE("bootstrap test reports a stage error for a non-compiler") {
  auto r = bootstrap_test(
      ProgramSource::from_sexpr(
          corpus::compiler_as_program(corpus::factorial_program().items()[0])),
      trusted_handle());
  CHECK(r.outcome == BootstrapResult::Outcome::StageFailure);
  CHECK(r.failed_stage == "m0");
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("claimed-origin chain: benign builds always compare equal") {
  // grandparent = trusted; parent = trusted(sP); under-test = parent(sA)
  auto trusted = trusted_handle();
  auto parent = apply_compiler(trusted, correct_src());
  auto under_test =
      apply_compiler(CompilerHandle{MachineCompiler{parent}}, correct_src());
  auto verdict = ddc_check(under_test, correct_src(), correct_src(), trusted);
  CHECK(verdict.passed());
}

TEST_CASE("a passing verdict implies behavioral agreement with the clean build") {
  auto trusted = trusted_handle();
  auto verdict = ddc_check(corpus::correct_compiler_executable(), correct_src(),
                           correct_src(), trusted);
  REQUIRE(verdict.passed());

  // spot programs behave identically under the executable under test and a
  // freshly rebuilt stage2: login, factorial, and five random programs
  auto stage1 = apply_compiler(trusted, correct_src());
  auto stage2 = apply_compiler(CompilerHandle{MachineCompiler{stage1}}, correct_src());
  std::vector<SExpr> programs{corpus::login_program(), corpus::factorial_program()};
  std::mt19937 rng(271828);
  for (int i = 0; i < 5; ++i) {
    std::vector<SExpr> body{SExpr::symbol(rng() % 2 ? "1+" : "1-"), SExpr::symbol("X")};
    SExpr wrapped = SExpr::list(
        {SExpr::symbol("IF"), SExpr::symbol("X"), SExpr::list(body),
         SExpr::integer(std::int64_t(rng() % 50))});
    programs.push_back(SExpr::list({
        SExpr::list({SExpr::list({SExpr::symbol("DEFUN"), SExpr::symbol("SPOT"),
                                  SExpr::list({SExpr::symbol("X")}), wrapped})}),
        SExpr::list({SExpr::symbol("X")}),
        sx("(SPOT X)"),
    }));
  }
  for (const SExpr& program : programs) {
    auto a = apply_compiler(CompilerHandle{MachineCompiler{stage2}},
                            ProgramSource::from_sexpr(program));
    auto b = apply_compiler(
        CompilerHandle{MachineCompiler{corpus::correct_compiler_executable()}},
        ProgramSource::from_sexpr(program));
    CHECK(sexpr_equal(a.encode(), b.encode()));
  }
}

TEST_CASE("ddc_check rejects a machine handle as the trusted compiler") {
  CompilerHandle machine_handle{
      MachineCompiler{corpus::correct_compiler_executable()}};
  CHECK_THROWS_AS(ddc_check(corpus::correct_compiler_executable(), correct_src(),
                            correct_src(), machine_handle),
                  Error);
}

TEST_CASE("stage failure names the failing stage") {
  // sP that cannot be compiled into an executable at all
  auto bad_parent = ProgramSource::from_sexpr(
      corpus::compiler_as_program(corpus::factorial_program().items()[0]));
  auto verdict = ddc_check(corpus::correct_compiler_executable(), correct_src(),
                           bad_parent, trusted_handle());
  CHECK(verdict.outcome == DdcVerdict::Outcome::StageFailure);
  CHECK(verdict.failed_stage.find("stage1") != std::string::npos);
  CHECK_FALSE(verdict.suspect_assumptions.empty());
}

TEST_CASE("program source round trip") {
  auto p = ProgramSource::from_sexpr(corpus::login_program());
  CHECK(sexpr_equal(p.to_sexpr(), corpus::login_program()));
  CHECK_THROWS_AS(ProgramSource::from_sexpr(sx("(ONLY TWO)")), Error);
}
