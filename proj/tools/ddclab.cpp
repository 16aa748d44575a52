// ddclab - trusting-trust laboratory command line.
//
// Demonstrates and detects the self-perpetuating compiler attack on a
// mini-Lisp/stack-machine toolchain, and checks the correspondence proofs
// and their consistency models.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ddclab/corpus.hpp"
#include "ddclab/ddc.hpp"
#include "ddclab/fol.hpp"
#include "ddclab/fol_check.hpp"
#include "ddclab/fol_model.hpp"
#include "ddclab/machine.hpp"
#include "ddclab/report.hpp"
#include "ddclab/sexpr.hpp"
#include "ddclab/version.hpp"

using namespace ddclab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

SExpr parse_file(const std::string& path) {
  try {
    return parse_sexpr(read_file(path));
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

std::uint64_t default_fuel() {
  if (const char* env = std::getenv("DDCLAB_FUEL")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw Error("DDCLAB_FUEL is not a number");
    }
  }
  return 10'000'000;
}

ddc::CompilerHandle load_compiler(const std::string& spec) {
  if (spec == "trusted") {
    return ddc::TrustedCompiler::from_source(corpus::correct_compiler_source());
  }
  return ddc::MachineCompiler{machine::MachineProgram::decode(parse_file(spec))};
}

ddc::ProgramSource load_program(const std::string& path) {
  return ddc::ProgramSource::from_sexpr(parse_file(path));
}

void print_diff(const std::vector<std::string>& diff) {
  for (const auto& line : diff) std::cout << line << "\n";
}

int cmd_compile(const std::string& source, const std::string& with,
                const std::string& out, std::uint64_t fuel) {
  auto compiler = load_compiler(with);
  auto program = load_program(source);
  auto exe = ddc::apply_compiler(compiler, program, fuel);
  std::string text = print_canonical(exe.encode());
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
    std::cout << "wrote " << out << "  sha256=" << canonical_hash(exe.encode()) << "\n";
  }
  return kExitPass;
}

int cmd_run(const std::string& exe_path, const std::string& args_text,
            std::uint64_t fuel) {
  auto exe = machine::MachineProgram::decode(parse_file(exe_path));
  SExpr args = parse_sexpr(args_text);
  if (!args.is_list() && !args.is_nil()) throw Error("--args must be a list");
  std::vector<SExpr> inputs(args.items().begin(), args.items().end());
  machine::RunLimits limits;
  limits.fuel = fuel;
  auto result = machine::run_program(exe, inputs, limits);
  std::cout << print_canonical(result.value);
  return kExitPass;
}

int cmd_ddc(const std::string& under_test, const std::string& source,
            const std::string& parent, const std::string& report_path,
            std::uint64_t fuel) {
  auto exe = machine::MachineProgram::decode(parse_file(under_test));
  auto source_a = load_program(source);
  std::string parent_path = parent.empty() ? source : parent;
  auto source_p = load_program(parent_path);
  // the trusted platform: the host evaluator loaded with the parent source
  auto trusted = ddc::TrustedCompiler::from_source(source_p.defs);

  auto verdict = ddc::ddc_check(exe, source_a, source_p, trusted, fuel);

  std::cout << "compiler-under-test: " << verdict.hash_under_test << "\n";
  if (!verdict.stage1_hash.empty())
    std::cout << "stage1:              " << verdict.stage1_hash << "\n";
  if (!verdict.hash_stage2.empty())
    std::cout << "stage2:              " << verdict.hash_stage2 << "\n";
  int code = kExitError;
  switch (verdict.outcome) {
    case ddc::DdcVerdict::Outcome::Passed:
      std::cout << "verdict: PASS - stage2 is bit-identical to the compiler under test\n";
      code = kExitPass;
      break;
    case ddc::DdcVerdict::Outcome::Failed:
      std::cout << "verdict: FAIL - executable does not correspond to the source\n";
      print_diff(verdict.diff);
      code = kExitFail;
      break;
    case ddc::DdcVerdict::Outcome::StageFailure:
      std::cout << "verdict: STAGE FAILURE at " << verdict.failed_stage << ": "
                << verdict.error << "\n";
      std::cout << "assumptions in question:";
      for (const auto& a : verdict.suspect_assumptions) std::cout << " " << a;
      std::cout << "\n";
      code = kExitError;
      break;
  }

  if (!report_path.empty()) {
    RunReport report;
    report.command = "ddc";
    report.inputs = {{under_test, canonical_hash(parse_file(under_test))},
                     {source, canonical_hash(load_program(source).to_sexpr())},
                     {parent_path, canonical_hash(load_program(parent_path).to_sexpr())}};
    report.outcome =
        code == kExitPass ? "pass" : code == kExitFail ? "fail" : "stage-error";
    report.verdict = verdict;
    report.stage_hashes = {{"stage1", verdict.stage1_hash},
                           {"stage2", verdict.hash_stage2}};
    report.fuel_limit = fuel;
    report.fuel_consumed = verdict.fuel_used;
    report.stamp_now();
    report.write(report_path);
    std::cout << "report written to " << report_path << "\n";
  }
  return code;
}

int cmd_selfregen(const std::string& exe_path, const std::string& source,
                  std::uint64_t fuel) {
  auto exe = machine::MachineProgram::decode(parse_file(exe_path));
  auto result = ddc::self_regeneration_check(exe, load_program(source), fuel);
  std::cout << "executable:   " << result.exe_hash << "\n";
  switch (result.outcome) {
    case ddc::SelfRegenResult::Outcome::Regenerates:
      std::cout << "regenerated:  " << result.regenerated_hash << "\n";
      std::cout << "self-regeneration: PASS (note: a corrupted self-perpetuating\n"
                   "compiler also passes this check; run ddc for a real verdict)\n";
      return kExitPass;
    case ddc::SelfRegenResult::Outcome::Differs:
      std::cout << "regenerated:  " << result.regenerated_hash << "\n";
      std::cout << "self-regeneration: FAIL (outputs differ)\n";
      return kExitFail;
    case ddc::SelfRegenResult::Outcome::StageFailure:
      std::cout << "self-regeneration: STAGE FAILURE: " << result.error << "\n";
      return kExitError;
  }
  return kExitError;
}

int cmd_bootstrap(const std::string& source, std::uint64_t fuel) {
  auto trusted = ddc::TrustedCompiler::from_source(load_program(source).defs);
  auto result = ddc::bootstrap_test(load_program(source), trusted, fuel);
  if (result.outcome == ddc::BootstrapResult::Outcome::StageFailure) {
    std::cout << "bootstrap: STAGE FAILURE at " << result.failed_stage << ": "
              << result.error << "\n";
    return kExitError;
  }
  std::cout << "m0: " << result.m0_hash << "\n";
  std::cout << "m1: " << result.m1_hash << "\n";
  std::cout << "m2: " << result.m2_hash << "\n";
  if (result.passed()) {
    std::cout << "bootstrap test: PASS (m1 = m2; this does NOT rule out a\n"
                 "self-perpetuating corrupted compiler)\n";
    return kExitPass;
  }
  std::cout << "bootstrap test: FAIL (m1 differs from m2)\n";
  return kExitFail;
}

int cmd_prove(const std::string& problem_path, const std::string& trace_path) {
  auto problem = fol::parse_problem(read_file(problem_path));
  auto trace = fol::parse_proof(read_file(trace_path));
  auto result = fol::check_proof(problem, trace);
  if (result.accepted) {
    std::cout << "proof accepted: " << trace.size() << " steps, goal "
              << problem.goal.label << "\n";
    return kExitPass;
  }
  std::cout << "proof REJECTED at step " << result.failing_step << ": " << result.reason
            << "\n";
  return kExitFail;
}

int cmd_model_verify(const std::string& problem_path, const std::string& model_path) {
  auto problem = fol::parse_problem(read_file(problem_path));
  auto model = fol::parse_model(read_file(model_path));
  std::vector<fol::Formula> assumptions;
  for (const auto& a : problem.assumptions) assumptions.push_back(a.formula);
  if (fol::verify_model(assumptions, model)) {
    std::cout << "model satisfies all " << assumptions.size()
              << " assumptions (domain size " << model.domain_size << ")\n";
    return kExitPass;
  }
  std::cout << "model does NOT satisfy the assumption set\n";
  return kExitFail;
}

int cmd_model_search(const std::string& problem_path, int max_domain) {
  auto problem = fol::parse_problem(read_file(problem_path));
  std::vector<fol::Formula> assumptions;
  for (const auto& a : problem.assumptions) assumptions.push_back(a.formula);
  auto model = fol::search_model(assumptions, max_domain);
  if (model) {
    std::cout << "model found at domain size " << model->domain_size
              << " (assumptions are consistent)\n";
    std::cout << fol::to_string(*model);
    return kExitPass;
  }
  std::cout << "no model up to domain size " << max_domain << "\n";
  return kExitFail;
}

int cmd_hash(const std::string& path) {
  SExpr value = parse_file(path);
  std::cout << canonical_hash(value) << "  " << path << "\n";
  return kExitPass;
}

int cmd_demo_attack(std::uint64_t fuel) {
  using corpus::compiler_as_program;
  std::cout << "== trusting-trust attack demonstration ==\n\n";

  std::cout << "[1] building both compilers with the trusted evaluator\n";
  const auto& good = corpus::correct_compiler_executable();
  const auto& bad = corpus::incorrect_compiler_executable();
  std::cout << "    correct.exe   " << canonical_hash(good.encode()) << "\n";
  std::cout << "    incorrect.exe " << canonical_hash(bad.encode()) << "\n\n";

  auto correct_prog = ddc::ProgramSource::from_sexpr(
      compiler_as_program(corpus::correct_compiler_source()));
  auto compile_via = [&](const machine::MachineProgram& exe, const SExpr& program) {
    return ddc::apply_compiler(ddc::MachineCompiler{exe},
                               ddc::ProgramSource::from_sexpr(program), fuel);
  };

  std::cout << "[2] an innocent program compiles identically\n";
  auto fac_good = compile_via(good, corpus::factorial_program());
  auto fac_bad = compile_via(bad, corpus::factorial_program());
  bool fac_agree = sexpr_equal(fac_good.encode(), fac_bad.encode());
  std::vector<SExpr> five{SExpr::integer(5)};
  auto fac5 = machine::run_program(fac_good, five).value;
  std::cout << "    factorial code identical: " << (fac_agree ? "yes" : "NO") << "\n";
  std::cout << "    fac(5) = " << print_inline(fac5) << "\n\n";

  std::cout << "[3] the login program is silently corrupted\n";
  auto login_good = compile_via(good, corpus::login_program());
  auto login_bad = compile_via(bad, corpus::login_program());
  std::cout << "    via correct.exe:   " << print_inline(login_good.encode().items()[0])
            << "\n";
  std::cout << "    via incorrect.exe: " << print_inline(login_bad.encode().items()[0])
            << "\n\n";

  std::cout << "[4] self-regeneration cannot tell them apart\n";
  auto regen_good = ddc::self_regeneration_check(good, correct_prog, fuel);
  auto regen_bad = ddc::self_regeneration_check(bad, correct_prog, fuel);
  std::cout << "    correct.exe regenerates from the clean source:   "
            << (regen_good.regenerates() ? "yes" : "no") << "\n";
  std::cout << "    incorrect.exe regenerates from the clean source: "
            << (regen_bad.regenerates() ? "yes (the quine payload)" : "no") << "\n\n";

  std::cout << "[5] diverse double-compiling gives the real verdict\n";
  auto trusted = ddc::TrustedCompiler::from_source(corpus::correct_compiler_source());
  auto verdict_good = ddc::ddc_check(good, correct_prog, correct_prog, trusted, fuel);
  auto verdict_bad = ddc::ddc_check(bad, correct_prog, correct_prog, trusted, fuel);
  std::cout << "    correct.exe:   " << (verdict_good.passed() ? "PASS" : "FAIL") << "\n";
  std::cout << "    incorrect.exe: " << (verdict_bad.passed() ? "PASS" : "FAIL") << "\n";
  if (!verdict_bad.passed()) {
    std::cout << "\n    divergence localized to defcodes:\n";
    print_diff(verdict_bad.diff);
  }

  bool as_expected = fac_agree && regen_good.regenerates() && regen_bad.regenerates() &&
                     verdict_good.passed() && !verdict_bad.passed() &&
                     contains_subterm(login_bad.encode(),
                                      parse_sexpr("(THIS IS THE INCORRECT LOGIN)"));
  std::cout << "\n== demonstration "
            << (as_expected ? "complete" : "DID NOT BEHAVE AS EXPECTED") << " ==\n";
  return as_expected ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ddclab: self-hosting mini-Lisp compiler, trusting-trust attack "
               "demo, diverse double-compiling verifier, and proof checker"};
  app.set_version_flag("--version", std::string("ddclab ") + kToolVersion);
  app.require_subcommand(1);

  // compile
  std::string compile_source, compile_with = "trusted", compile_out;
  auto* compile = app.add_subcommand("compile", "apply a compiler to a program file");
  compile->add_option("--source", compile_source, "program file (DEFS VARS MAIN)")
      ->required();
  compile->add_option("--with", compile_with,
                      "'trusted' or an executable .sexp to run on the VM");
  compile->add_option("--out", compile_out, "output path (stdout when omitted)");

  // run
  std::string run_exe, run_args = "()";
  auto* run = app.add_subcommand("run", "execute an executable on the VM");
  run->add_option("--exe", run_exe, "executable .sexp")->required();
  run->add_option("--args", run_args, "input list, e.g. \"(5)\"");

  // ddc
  std::string ddc_under_test, ddc_source, ddc_parent, ddc_report;
  auto* ddc_cmd = app.add_subcommand("ddc", "diverse double-compile and compare");
  ddc_cmd->add_option("--under-test", ddc_under_test, "compiler executable under test")
      ->required();
  ddc_cmd->add_option("--source", ddc_source, "putative source program")->required();
  ddc_cmd->add_option("--parent", ddc_parent,
                      "parent compiler source (defaults to --source: self-parenting)");
  ddc_cmd->add_option("--report", ddc_report, "write a JSON run report here");

  // selfregen
  std::string regen_exe, regen_source;
  auto* regen = app.add_subcommand("selfregen", "self-regeneration check");
  regen->add_option("--exe", regen_exe, "compiler executable")->required();
  regen->add_option("--source", regen_source, "source program")->required();

  // bootstrap
  std::string bootstrap_source;
  auto* bootstrap = app.add_subcommand("bootstrap", "compiler bootstrap test (m1 = m2)");
  bootstrap->add_option("--source", bootstrap_source, "compiler source program")
      ->required();

  // demo
  auto* demo = app.add_subcommand("demo", "end-to-end demonstrations");
  std::string demo_name;
  demo->add_option("name", demo_name, "demonstration name: attack")->required();

  // prove
  std::string prove_problem, prove_trace;
  auto* prove = app.add_subcommand("prove", "check a derivation trace");
  prove->add_option("--problem", prove_problem, ".fol problem file")->required();
  prove->add_option("--trace", prove_trace, ".prf trace file")->required();

  // model verify | search
  auto* model = app.add_subcommand("model", "finite-model operations");
  model->require_subcommand(1);
  std::string mv_problem, mv_model;
  auto* model_verify =
      model->add_subcommand("verify", "check a model against assumptions");
  model_verify->add_option("--problem", mv_problem, ".fol problem file")->required();
  model_verify->add_option("--model", mv_model, ".mdl model file")->required();
  std::string ms_problem;
  int ms_max_domain = 2;
  auto* model_search = model->add_subcommand("search", "search for a consistency model");
  model_search->add_option("--problem", ms_problem, ".fol problem file")->required();
  model_search->add_option("--max-domain", ms_max_domain, "largest domain size to try");

  // hash
  std::string hash_file;
  auto* hash = app.add_subcommand("hash", "canonical hash of an S-expression file");
  hash->add_option("file", hash_file, ".sexp file")->required();

  std::uint64_t fuel_flag = 0;
  for (auto* cmd : {compile, run, ddc_cmd, regen, bootstrap, demo}) {
    cmd->add_option("--fuel", fuel_flag, "step budget (default 10000000 or DDCLAB_FUEL)");
  }

  try {
    app.parse(argc, argv);
    std::uint64_t fuel = fuel_flag != 0 ? fuel_flag : default_fuel();

    if (*compile) return cmd_compile(compile_source, compile_with, compile_out, fuel);
    if (*run) return cmd_run(run_exe, run_args, fuel);
    if (*ddc_cmd) return cmd_ddc(ddc_under_test, ddc_source, ddc_parent, ddc_report, fuel);
    if (*regen) return cmd_selfregen(regen_exe, regen_source, fuel);
    if (*bootstrap) return cmd_bootstrap(bootstrap_source, fuel);
    if (*demo) {
      if (demo_name != "attack") throw Error("unknown demonstration: " + demo_name);
      return cmd_demo_attack(fuel);
    }
    if (*prove) return cmd_prove(prove_problem, prove_trace);
    if (*model_verify) return cmd_model_verify(mv_problem, mv_model);
    if (*model_search) return cmd_model_search(ms_problem, ms_max_domain);
    if (*hash) return cmd_hash(hash_file);
    throw Error("no subcommand");
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitError;
  } catch (const ddc::StageError& e) {
    std::cerr << "error in stage " << e.stage() << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
