#include "ddclab/corpus.hpp"

#include "ddclab/lisp_eval.hpp"

namespace ddclab::corpus {

namespace {

// Correct compiler, after normalizing transcription garbles in the
// published listings (operator list entries CADDAR/CADDDR, the CADDDR
// selectors in COMPILE-FORM's IF case and in COMPILE-DEF). The binding
// contract for these corrections is behavioral: compiled by itself, this
// source must reproduce its own executable bit for bit.
constexpr const char* kCorrectSourceText = R"lisp(
((DEFUN OPERATORP (NAME)
  (MEMBER NAME
   '(CAR CDR CADR CADDR CADAR CADDAR CADDDR 1- 1+ LEN SYMBOLP CONSP ATOM CONS
     EQUAL APPEND MEMBER ASSOC + - * LIST1 LIST2)))
 (DEFUN COMPILE-FORMS (FORMS ENV TOP)
  (IF (CONSP FORMS)
   (APPEND (COMPILE-FORM (CAR FORMS) ENV TOP)
    (COMPILE-FORMS (CDR FORMS) ENV (1+ TOP)))
   NIL))
 (DEFUN COMPILE-FORM (FORM ENV TOP)
  (IF (EQUAL FORM 'NIL) (LIST1 '(PUSHC NIL))
   (IF (EQUAL FORM 'T) (LIST1 '(PUSHC T))
    (IF (SYMBOLP FORM)
     (LIST1 (LIST2 'PUSHV (+ TOP (1- (LEN (MEMBER FORM ENV))))))
     (IF (ATOM FORM) (LIST1 (LIST2 'PUSHC FORM))
      (IF (EQUAL (CAR FORM) 'QUOTE) (LIST1 (LIST2 'PUSHC (CADR FORM)))
       (IF (EQUAL (CAR FORM) 'IF)
        (APPEND (COMPILE-FORM (CADR FORM) ENV TOP)
         (LIST1
          (CONS 'IF
           (LIST2 (COMPILE-FORM (CADDR FORM) ENV TOP)
            (COMPILE-FORM (CADDDR FORM) ENV TOP)))))
        (IF (OPERATORP (CAR FORM))
         (APPEND (COMPILE-FORMS (CDR FORM) ENV TOP)
          (LIST1 (LIST2 'OPR (CAR FORM))))
         (APPEND (COMPILE-FORMS (CDR FORM) ENV TOP)
          (LIST1 (LIST2 'CALL (CAR FORM))))))))))))
 (DEFUN COMPILE-DEF (DEF)
  (LIST1
   (CONS 'DEFCODE
    (LIST2 (CADR DEF)
     (APPEND (COMPILE-FORM (CADDDR DEF) (CADDR DEF) 0)
      (LIST1 (LIST2 'POP (LEN (CADDR DEF)))))))))
 (DEFUN COMPILE-DEFS (DEFS)
  (IF (CONSP DEFS) (APPEND (COMPILE-DEF (CAR DEFS)) (COMPILE-DEFS (CDR DEFS)))
   NIL))
 (DEFUN COMPILE-PROGRAM (DEFS VARS MAIN)
  (APPEND (COMPILE-DEFS DEFS)
   (LIST1
    (APPEND (COMPILE-FORM MAIN VARS 0) (LIST1 (LIST2 'POP (LEN VARS))))))))
)lisp";

constexpr const char* kLoginSourceText =
    "((DEFUN LOGIN NIL '(THIS IS THE CORRECT LOGIN)))";

constexpr const char* kFactorialSourceText =
    "((DEFUN FAC (N) (IF (EQUAL N 0) 1 (* N (FAC (1- N))))))";

// Malicious-source template. The two quoted 2000 atoms mark where the
// template itself gets spliced in; the placeholder %CORRECT% is replaced
// by the canonical text of the correct compiler source. Writing the
// trigger's comparison value as (+ 1999 1) keeps the marker atom out of
// every non-marker position, which is what makes the splice a quine.
constexpr const char* kMaliciousTemplateText = R"lisp(
((DEFUN OPERATORP (NAME)
  (MEMBER NAME
   '(CAR CDR CADR CADDR CADAR CADDAR CADDDR 1- 1+ LEN SYMBOLP CONSP ATOM CONS
     EQUAL APPEND MEMBER ASSOC + - * LIST1 LIST2)))
 (DEFUN COMPILE-FORMS (FORMS ENV TOP)
  (IF (CONSP FORMS)
   (APPEND (COMPILE-FORM (CAR FORMS) ENV TOP)
    (COMPILE-FORMS (CDR FORMS) ENV (1+ TOP)))
   NIL))
 (DEFUN COMPILE-FORM (FORM ENV TOP)
  (IF (EQUAL FORM 'NIL) (LIST1 '(PUSHC NIL))
   (IF (EQUAL FORM 'T) (LIST1 '(PUSHC T))
    (IF (SYMBOLP FORM)
     (LIST1 (LIST2 'PUSHV (+ TOP (1- (LEN (MEMBER FORM ENV))))))
     (IF (ATOM FORM) (LIST1 (LIST2 'PUSHC FORM))
      (IF (EQUAL (CAR FORM) 'QUOTE) (LIST1 (LIST2 'PUSHC (CADR FORM)))
       (IF (EQUAL (CAR FORM) 'IF)
        (APPEND (COMPILE-FORM (CADR FORM) ENV TOP)
         (LIST1
          (CONS 'IF
           (LIST2 (COMPILE-FORM (CADDR FORM) ENV TOP)
            (COMPILE-FORM (CADDDR FORM) ENV TOP)))))
        (IF (OPERATORP (CAR FORM))
         (APPEND (COMPILE-FORMS (CDR FORM) ENV TOP)
          (LIST1 (LIST2 'OPR (CAR FORM))))
         (APPEND (COMPILE-FORMS (CDR FORM) ENV TOP)
          (LIST1 (LIST2 'CALL (CAR FORM))))))))))))
 (DEFUN COMPILE-DEF (DEF)
  (LIST1
   (CONS 'DEFCODE
    (LIST2 (CADR DEF)
     (APPEND (COMPILE-FORM (CADDDR DEF) (CADDR DEF) 0)
      (LIST1 (LIST2 'POP (LEN (CADDR DEF)))))))))
 (DEFUN COMPILE-DEFS (DEFS)
  (IF (CONSP DEFS) (APPEND (COMPILE-DEF (CAR DEFS)) (COMPILE-DEFS (CDR DEFS)))
   NIL))
 (DEFUN LOGIN-SOURCE NIL
  '((DEFUN LOGIN NIL '(THIS IS THE CORRECT LOGIN))))
 (DEFUN COMPILER-SOURCE NIL
  '%CORRECT%)
 (DEFUN SUBST (NEW OLD TREE)
  (IF (EQUAL OLD TREE) NEW
   (IF (ATOM TREE) TREE
    (CONS (SUBST NEW OLD (CAR TREE)) (SUBST NEW OLD (CDR TREE))))))
 (DEFUN COMPILE-PROGRAM (DEFS VARS MAIN)
  (IF (EQUAL DEFS (COMPILER-SOURCE))
   (APPEND (COMPILE-DEFS (SUBST '2000 (+ 1999 1) '2000))
    (LIST1
     (APPEND (COMPILE-FORM MAIN VARS 0) (LIST1 (LIST2 'POP (LEN VARS))))))
   (IF (EQUAL DEFS (LOGIN-SOURCE))
    (APPEND
     (COMPILE-DEFS '((DEFUN LOGIN NIL '(THIS IS THE INCORRECT LOGIN))))
     (LIST1
      (APPEND (COMPILE-FORM MAIN VARS 0) (LIST1 (LIST2 'POP (LEN VARS))))))
    (APPEND (COMPILE-DEFS DEFS)
     (LIST1
      (APPEND (COMPILE-FORM MAIN VARS 0) (LIST1 (LIST2 'POP (LEN VARS))))))))))
)lisp";

// Replace every subtree equal to `marker` with `replacement`.
SExpr splice(const SExpr& tree, const SExpr& marker, const SExpr& replacement) {
  if (sexpr_equal(tree, marker)) return replacement;
  if (!tree.is_list()) return tree;
  std::vector<SExpr> out;
  out.reserve(tree.size());
  for (const auto& item : tree.items()) {
    out.push_back(splice(item, marker, replacement));
  }
  return SExpr::list(std::move(out));
}

SExpr build_incorrect_source() {
  std::string text = kMaliciousTemplateText;
  const std::string placeholder = "%CORRECT%";
  std::string correct = print_inline(correct_compiler_source());
  text.replace(text.find(placeholder), placeholder.size(), correct);
  SExpr tmpl = parse_sexpr(text);
  return splice(tmpl, SExpr::integer(2000), tmpl);
}

machine::MachineProgram compile_with_trusted(const SExpr& source_defs) {
  auto env = lisp_eval::DefunEnv::load(correct_compiler_source());
  SExpr program = compiler_as_program(source_defs);
  std::vector<SExpr> args(program.items().begin(), program.items().end());
  auto result = lisp_eval::eval_call(env, "COMPILE-PROGRAM", args);
  return machine::MachineProgram::decode(result.value);
}

}  // namespace

const SExpr& correct_compiler_source() {
  static const SExpr source = parse_sexpr(kCorrectSourceText);
  return source;
}

const SExpr& incorrect_compiler_source() {
  static const SExpr source = build_incorrect_source();
  return source;
}

const machine::MachineProgram& correct_compiler_executable() {
  static const machine::MachineProgram exe =
      compile_with_trusted(correct_compiler_source());
  return exe;
}

const machine::MachineProgram& incorrect_compiler_executable() {
  static const machine::MachineProgram exe =
      compile_with_trusted(incorrect_compiler_source());
  return exe;
}

SExpr login_program() {
  return SExpr::list({parse_sexpr(kLoginSourceText),
                      SExpr::list({SExpr::symbol("U")}),
                      parse_sexpr("(LOGIN U)")});
}

SExpr factorial_program() {
  return SExpr::list({parse_sexpr(kFactorialSourceText),
                      SExpr::list({SExpr::symbol("N")}),
                      parse_sexpr("(FAC N)")});
}

SExpr compiler_as_program(const SExpr& defs) {
  return SExpr::list({defs, parse_sexpr("(DEFS VARS MAIN)"),
                      parse_sexpr("(COMPILE-PROGRAM DEFS VARS MAIN)")});
}

std::vector<Artifact> all_artifacts() {
  return {
      {"correct.src", "source", compiler_as_program(correct_compiler_source()),
       "Correct compiler of the Goerigk pair (W. Goerigk, Compiler Verification "
       "Revisited, 1999-2002), wrapped as a self-compilation program; operator "
       "list and CADDDR selectors normalized from garbled listings."},
      {"incorrect.src", "source", compiler_as_program(incorrect_compiler_source()),
       "Reconstructed corrupted compiler of the Goerigk pair; pinned by the "
       "published executable diff, the login payload, and the quine property "
       "rather than by original spelling."},
      {"correct.exe", "executable", correct_compiler_executable().encode(),
       "correct.src compiled by the trusted evaluator; self-compilation fixpoint."},
      {"incorrect.exe", "executable", incorrect_compiler_executable().encode(),
       "incorrect.src compiled by the trusted evaluator; regenerates itself from "
       "correct.src via its quine payload."},
      {"login.src", "source", login_program(),
       "Login stub the corrupted compiler mistranslates; vars (U), main (LOGIN U)."},
      {"fac.src", "source", factorial_program(),
       "Factorial demo both compilers translate identically; vars (N), main (FAC N)."},
  };
}

}  // namespace ddclab::corpus
