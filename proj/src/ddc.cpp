#include "ddclab/ddc.hpp"

#include <algorithm>
#include <map>

#include "ddclab/diff.hpp"

namespace ddclab::ddc {

ProgramSource ProgramSource::from_sexpr(const SExpr& x) {
  if (!x.is_list() || x.size() != 3) {
    throw Error("a program file is a single list (DEFS VARS MAIN)");
  }
  return {x.items()[0], x.items()[1], x.items()[2]};
}

SExpr ProgramSource::to_sexpr() const { return SExpr::list({defs, vars, main}); }

TrustedCompiler TrustedCompiler::from_source(const SExpr& compiler_defs) {
  return {lisp_eval::DefunEnv::load(compiler_defs)};
}

ProgramSource retarget(ProgramSource source, std::string_view) {
  return source;  // single target machine
}

std::string convert_text(std::string text, std::string_view, std::string_view) {
  return text;  // single canonical encoding
}

machine::MachineProgram extract_executable(const SExpr& compiler_output) {
  return machine::MachineProgram::decode(compiler_output);
}

machine::MachineProgram apply_compiler(const CompilerHandle& compiler,
                                       const ProgramSource& program,
                                       std::uint64_t fuel, std::uint64_t* steps_used) {
  const char* stage = std::holds_alternative<TrustedCompiler>(compiler)
                          ? "trusted-compile"
                          : "machine-compile";
  try {
    ProgramSource prepared = retarget(program, "vm");
    SExpr raw_output;
    if (const auto* trusted = std::get_if<TrustedCompiler>(&compiler)) {
      std::vector<SExpr> args{prepared.defs, prepared.vars, prepared.main};
      lisp_eval::EvalLimits limits;
      limits.fuel = fuel;
      auto result = lisp_eval::eval_call(trusted->env, "COMPILE-PROGRAM", args, limits);
      if (steps_used != nullptr) *steps_used = result.steps;
      raw_output = std::move(result.value);
    } else {
      const auto& exe = std::get<MachineCompiler>(compiler).exe;
      std::vector<SExpr> inputs{prepared.defs, prepared.vars, prepared.main};
      machine::RunLimits limits;
      limits.fuel = fuel;
      auto result = machine::run_program(exe, inputs, limits);
      if (steps_used != nullptr) *steps_used = result.steps;
      raw_output = std::move(result.value);
    }
    // Compiler output crosses the stage boundary as canonical text and is
    // read back, so comparisons never depend on in-memory identity.
    std::string text = convert_text(print_canonical(raw_output), "vm", "vm");
    return extract_executable(parse_sexpr(text));
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, std::string(e.what()));
  }
}

namespace {

struct DefcodeComparison {
  std::vector<std::string> added, removed, changed;
  bool main_changed = false;
};

std::map<std::string, SExpr> defcode_map(const SExpr& encoded) {
  std::map<std::string, SExpr> codes;
  for (const auto& entry : encoded.items()) {
    if (entry.is_list() && entry.size() == 3 &&
        entry.items()[0].is_symbol_named("DEFCODE")) {
      codes.emplace(entry.items()[1].symbol_name(), entry.items()[2]);
    }
  }
  return codes;
}

DefcodeComparison compare_defcodes(const machine::MachineProgram& under_test,
                                   const machine::MachineProgram& stage2) {
  DefcodeComparison cmp;
  SExpr test_encoded = under_test.encode();
  SExpr stage2_encoded = stage2.encode();
  auto test_codes = defcode_map(test_encoded);
  auto stage2_codes = defcode_map(stage2_encoded);
  for (const auto& [name, code] : test_codes) {
    auto it = stage2_codes.find(name);
    if (it == stage2_codes.end()) {
      cmp.added.push_back(name);
    } else if (!sexpr_equal(code, it->second)) {
      cmp.changed.push_back(name);
    }
  }
  for (const auto& [name, code] : stage2_codes) {
    if (!test_codes.contains(name)) cmp.removed.push_back(name);
  }
  cmp.main_changed = !sexpr_equal(test_encoded.items().back(),
                                  stage2_encoded.items().back());
  return cmp;
}

void append_summary(std::vector<std::string>& diff, const char* label,
                    const std::vector<std::string>& names) {
  if (names.empty()) return;
  std::string line = label;
  for (std::size_t i = 0; i < names.size(); ++i) {
    line += (i ? ", " : " ") + names[i];
  }
  diff.push_back(line);
}

}  // namespace

std::vector<std::string> executable_lines(const machine::MachineProgram& prog) {
  return split_lines(print_pretty(prog.encode()));
}

DdcVerdict ddc_check(const machine::MachineProgram& c_under_test,
                     const ProgramSource& source_a, const ProgramSource& source_p,
                     const CompilerHandle& trusted, std::uint64_t fuel) {
  if (!std::holds_alternative<TrustedCompiler>(trusted)) {
    throw Error("ddc_check requires a trusted (diverse) compiler handle");
  }

  DdcVerdict verdict;
  verdict.hash_under_test = canonical_hash(c_under_test.encode());

  machine::MachineProgram stage1;
  std::uint64_t steps = 0;
  try {
    stage1 = apply_compiler(trusted, source_p, fuel, &steps);
    verdict.fuel_used += steps;
  } catch (const StageError& e) {
    verdict.failed_stage = "stage1 (" + e.stage() + ")";
    verdict.error = e.what();
    verdict.suspect_assumptions = {"cT_compiles_sP", "definition_stage1"};
    return verdict;
  }
  verdict.stage1_hash = canonical_hash(stage1.encode());

  machine::MachineProgram stage2;
  try {
    stage2 = apply_compiler(CompilerHandle{MachineCompiler{stage1}}, source_a, fuel,
                            &steps);
    verdict.fuel_used += steps;
  } catch (const StageError& e) {
    verdict.failed_stage = "stage2 (" + e.stage() + ")";
    verdict.error = e.what();
    verdict.suspect_assumptions = {"sP_compiles_sA", "definition_stage2"};
    return verdict;
  }
  verdict.hash_stage2 = canonical_hash(stage2.encode());

  bool equal = sexpr_equal(c_under_test.encode(), stage2.encode());
  if (equal != (verdict.hash_under_test == verdict.hash_stage2)) {
    // cross-check of the two comparison routes on every run
    throw Error("internal: structural equality and canonical hashes disagree");
  }
  if (equal) {
    verdict.outcome = DdcVerdict::Outcome::Passed;
    return verdict;
  }

  verdict.outcome = DdcVerdict::Outcome::Failed;
  auto cmp = compare_defcodes(c_under_test, stage2);
  verdict.added_defcodes = cmp.added;
  verdict.removed_defcodes = cmp.removed;
  verdict.changed_defcodes = cmp.changed;
  verdict.main_changed = cmp.main_changed;

  append_summary(verdict.diff, "defcodes only in compiler-under-test:", cmp.added);
  append_summary(verdict.diff, "defcodes only in stage2:", cmp.removed);
  append_summary(verdict.diff, "defcodes that differ:", cmp.changed);
  if (cmp.main_changed) verdict.diff.push_back("main code differs");
  verdict.diff.push_back("--- stage2");
  verdict.diff.push_back("+++ compiler-under-test");
  auto body = unified_diff(executable_lines(stage2), executable_lines(c_under_test));
  verdict.diff.insert(verdict.diff.end(), body.begin(), body.end());
  return verdict;
}

SelfRegenResult self_regeneration_check(const machine::MachineProgram& exe,
                                        const ProgramSource& source,
                                        std::uint64_t fuel) {
  SelfRegenResult result{SelfRegenResult::Outcome::StageFailure, "", "", ""};
  result.exe_hash = canonical_hash(exe.encode());
  try {
    auto regenerated =
        apply_compiler(CompilerHandle{MachineCompiler{exe}}, source, fuel);
    result.regenerated_hash = canonical_hash(regenerated.encode());
    result.outcome = sexpr_equal(regenerated.encode(), exe.encode())
                         ? SelfRegenResult::Outcome::Regenerates
                         : SelfRegenResult::Outcome::Differs;
  } catch (const StageError& e) {
    result.error = e.what();
  }
  return result;
}

BootstrapResult bootstrap_test(const ProgramSource& source,
                               const CompilerHandle& trusted, std::uint64_t fuel) {
  BootstrapResult result{BootstrapResult::Outcome::StageFailure, "", "", "", "", ""};
  machine::MachineProgram m0, m1, m2;
  try {
    result.failed_stage = "m0";
    m0 = apply_compiler(trusted, source, fuel);
    result.m0_hash = canonical_hash(m0.encode());
    result.failed_stage = "m1";
    m1 = apply_compiler(CompilerHandle{MachineCompiler{m0}}, source, fuel);
    result.m1_hash = canonical_hash(m1.encode());
    result.failed_stage = "m2";
    m2 = apply_compiler(CompilerHandle{MachineCompiler{m1}}, source, fuel);
    result.m2_hash = canonical_hash(m2.encode());
  } catch (const StageError& e) {
    result.error = e.what();
    return result;
  }
  result.failed_stage.clear();
  result.outcome = sexpr_equal(m1.encode(), m2.encode())
                       ? BootstrapResult::Outcome::Passed
                       : BootstrapResult::Outcome::Failed;
  return result;
}

}  // namespace ddclab::ddc
