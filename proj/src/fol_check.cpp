#include "ddclab/fol_check.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace ddclab::fol {

namespace {

// ---- clausification ----------------------------------------------------

// Negation normal form with polarity tracking. Universal quantifiers in
// positive polarity are stripped (free variables are universal anyway);
// in negative polarity they would become existentials, which the proofs
// never need.
Formula nnf(const Formula& f, bool positive) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      Literal l = f.lit;
      if (!positive) l.positive = !l.positive;
      return Formula::atom(std::move(l));
    }
    case Formula::Kind::Not:
      return nnf(f.children[0], !positive);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      bool is_and = (f.kind == Formula::Kind::And) == positive;
      return Formula::binary(is_and ? Formula::Kind::And : Formula::Kind::Or,
                             nnf(f.children[0], positive), nnf(f.children[1], positive));
    }
    case Formula::Kind::Implies: {
      // A -> B  ==  -A | B
      if (positive) {
        return Formula::binary(Formula::Kind::Or, nnf(f.children[0], false),
                               nnf(f.children[1], true));
      }
      return Formula::binary(Formula::Kind::And, nnf(f.children[0], true),
                             nnf(f.children[1], false));
    }
    case Formula::Kind::ForAll:
      if (!positive) {
        throw FolError("formula outside the supported fragment: negated quantifier "
                       "over " + f.bound_var);
      }
      return nnf(f.children[0], positive);
  }
  throw FolError("unreachable formula kind");
}

std::vector<Clause> cnf(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom:
      return {Clause{{f.lit}}};
    case Formula::Kind::And: {
      auto left = cnf(f.children[0]);
      auto right = cnf(f.children[1]);
      left.insert(left.end(), right.begin(), right.end());
      return left;
    }
    case Formula::Kind::Or: {
      auto left = cnf(f.children[0]);
      auto right = cnf(f.children[1]);
      std::vector<Clause> out;
      for (const auto& a : left) {
        for (const auto& b : right) {
          Clause c = a;
          c.literals.insert(c.literals.end(), b.literals.begin(), b.literals.end());
          out.push_back(std::move(c));
        }
      }
      return out;
    }
    default:
      throw FolError("clausify: unexpected connective after normalization");
  }
}

}  // namespace

std::vector<Clause> clausify(const Formula& f) {
  auto clauses = cnf(nnf(f, true));
  std::vector<Clause> out;
  for (auto& c : clauses) {
    c.normalize();
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

// ---- substitutions and unification --------------------------------------

Term apply_substitution(const Term& t, const Substitution& s) {
  switch (t.kind) {
    case Term::Kind::Var: {
      auto it = s.find(t.name);
      if (it == s.end()) return t;
      // Bindings may chain; resolve through them.
      return apply_substitution(it->second, s);
    }
    case Term::Kind::Const:
      return t;
    case Term::Kind::Fn: {
      std::vector<Term> args;
      args.reserve(t.args.size());
      for (const auto& a : t.args) args.push_back(apply_substitution(a, s));
      return Term::fn(t.name, std::move(args));
    }
  }
  return t;
}

Literal apply_substitution(const Literal& l, const Substitution& s) {
  Literal out = l;
  for (auto& a : out.atom.args) a = apply_substitution(a, s);
  return out;
}

namespace {

Term walk(const Term& t, const Substitution& s) {
  if (t.kind != Term::Kind::Var) return t;
  auto it = s.find(t.name);
  return it == s.end() ? t : walk(it->second, s);
}

bool occurs(const std::string& var, const Term& t, const Substitution& s) {
  Term w = walk(t, s);
  if (w.kind == Term::Kind::Var) return w.name == var;
  for (const auto& a : w.args) {
    if (occurs(var, a, s)) return true;
  }
  return false;
}

bool unify_into(const Term& a, const Term& b, Substitution& s) {
  Term x = walk(a, s);
  Term y = walk(b, s);
  if (x.kind == Term::Kind::Var && y.kind == Term::Kind::Var && x.name == y.name) {
    return true;
  }
  if (x.kind == Term::Kind::Var) {
    if (occurs(x.name, y, s)) return false;
    s.emplace(x.name, y);
    return true;
  }
  if (y.kind == Term::Kind::Var) {
    if (occurs(y.name, x, s)) return false;
    s.emplace(y.name, x);
    return true;
  }
  if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!unify_into(x.args[i], y.args[i], s)) return false;
  }
  return true;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b) {
  Substitution s;
  if (!unify_into(a, b, s)) return std::nullopt;
  return s;
}

std::optional<Substitution> unify_atoms(const Atom& a, const Atom& b) {
  if (a.is_equality != b.is_equality || a.pred != b.pred ||
      a.args.size() != b.args.size()) {
    return std::nullopt;
  }
  Substitution s;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!unify_into(a.args[i], b.args[i], s)) return std::nullopt;
  }
  return s;
}

// ---- alpha equivalence ---------------------------------------------------

namespace {

struct VarBijection {
  std::map<std::string, std::string> fwd, back;

  bool bind(const std::string& a, const std::string& b) {
    auto f = fwd.find(a);
    auto g = back.find(b);
    if (f == fwd.end() && g == back.end()) {
      fwd.emplace(a, b);
      back.emplace(b, a);
      return true;
    }
    return f != fwd.end() && f->second == b && g != back.end() && g->second == a;
  }
};

bool match_terms(const Term& a, const Term& b, VarBijection& m) {
  if (a.kind != b.kind) return false;
  if (a.kind == Term::Kind::Var) return m.bind(a.name, b.name);
  if (a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!match_terms(a.args[i], b.args[i], m)) return false;
  }
  return true;
}

bool match_atoms(const Atom& a, const Atom& b, VarBijection& m, bool allow_flip) {
  if (a.is_equality != b.is_equality || a.pred != b.pred ||
      a.args.size() != b.args.size()) {
    return false;
  }
  VarBijection saved = m;
  bool ok = true;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!match_terms(a.args[i], b.args[i], m)) {
      ok = false;
      break;
    }
  }
  if (ok) return true;
  if (allow_flip && a.is_equality) {
    m = saved;
    return match_terms(a.args[0], b.args[1], m) && match_terms(a.args[1], b.args[0], m);
  }
  return false;
}

bool match_clause_rec(const Clause& a, const Clause& b, std::size_t index,
                      std::vector<bool>& used, VarBijection& m, bool allow_flip) {
  if (index == a.literals.size()) return true;
  const Literal& la = a.literals[index];
  for (std::size_t j = 0; j < b.literals.size(); ++j) {
    if (used[j] || b.literals[j].positive != la.positive) continue;
    VarBijection saved = m;
    if (match_atoms(la.atom, b.literals[j].atom, m, allow_flip)) {
      used[j] = true;
      if (match_clause_rec(a, b, index + 1, used, m, allow_flip)) return true;
      used[j] = false;
    }
    m = saved;
  }
  return false;
}

// Strip universal quantifiers and collapse negations of atoms, so
// writing `-(a = b)` or `a != b` or quantified variants all compare equal.
Formula normalize_formula(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::ForAll:
      return normalize_formula(f.children[0]);
    case Formula::Kind::Not: {
      Formula inner = normalize_formula(f.children[0]);
      if (inner.kind == Formula::Kind::Atom) {
        inner.lit.positive = !inner.lit.positive;
        return inner;
      }
      return Formula::unary(Formula::Kind::Not, std::move(inner));
    }
    case Formula::Kind::Atom:
      return f;
    default: {
      Formula out;
      out.kind = f.kind;
      for (const auto& c : f.children) out.children.push_back(normalize_formula(c));
      return out;
    }
  }
}

bool alpha_rec(const Formula& a, const Formula& b, VarBijection& m) {
  if (a.kind != b.kind) return false;
  if (a.kind == Formula::Kind::Atom) {
    return a.lit.positive == b.lit.positive && match_atoms(a.lit.atom, b.lit.atom, m, false);
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!alpha_rec(a.children[i], b.children[i], m)) return false;
  }
  return true;
}

}  // namespace

bool alpha_equal_formulas(const Formula& a, const Formula& b) {
  VarBijection m;
  return alpha_rec(normalize_formula(a), normalize_formula(b), m);
}

bool clauses_match(const Clause& claimed, const Clause& computed, bool allow_flip) {
  if (claimed.literals.size() != computed.literals.size()) return false;
  std::vector<bool> used(computed.literals.size(), false);
  VarBijection m;
  return match_clause_rec(claimed, computed, 0, used, m, allow_flip);
}

// ---- inference rules -----------------------------------------------------

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) {
    out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out);
}

Clause rename_apart(const Clause& c, const Clause& other) {
  std::set<std::string> taken;
  for (const auto& l : other.literals) {
    for (const auto& a : l.atom.args) collect_vars(a, taken);
  }
  std::set<std::string> own;
  for (const auto& l : c.literals) {
    for (const auto& a : l.atom.args) collect_vars(a, own);
  }
  Substitution rename;
  for (const auto& v : own) {
    if (!taken.contains(v)) continue;
    std::string fresh = v;
    do {
      fresh += "R";
    } while (taken.contains(fresh) || own.contains(fresh));
    rename.emplace(v, Term::var(fresh));
    taken.insert(fresh);
  }
  if (rename.empty()) return c;
  Clause out = c;
  for (auto& l : out.literals) l = apply_substitution(l, rename);
  return out;
}

Clause substituted_union(const Clause& a, std::size_t skip_a, const Clause& b,
                         std::size_t skip_b, const Substitution& s) {
  Clause out;
  for (std::size_t i = 0; i < a.literals.size(); ++i) {
    if (i != skip_a) out.literals.push_back(apply_substitution(a.literals[i], s));
  }
  for (std::size_t j = 0; j < b.literals.size(); ++j) {
    if (j != skip_b) out.literals.push_back(apply_substitution(b.literals[j], s));
  }
  out.normalize();
  return out;
}

// Enumerates non-variable subterm positions inside a term. A position is a
// path of argument indices.
void walk_positions(const Term& t, std::vector<std::size_t>& path,
                    const std::function<void(const Term&, const std::vector<std::size_t>&)>& visit) {
  if (t.kind == Term::Kind::Var) return;
  visit(t, path);
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    path.push_back(i);
    walk_positions(t.args[i], path, visit);
    path.pop_back();
  }
}

Term replace_at(const Term& t, const std::vector<std::size_t>& path, std::size_t depth,
                const Term& replacement) {
  if (depth == path.size()) return replacement;
  Term out = t;
  out.args[path[depth]] = replace_at(t.args[path[depth]], path, depth + 1, replacement);
  return out;
}

}  // namespace

std::vector<Clause> resolvents(const Clause& c1, const Clause& c2) {
  Clause b = rename_apart(c2, c1);
  std::vector<Clause> out;
  for (std::size_t i = 0; i < c1.literals.size(); ++i) {
    for (std::size_t j = 0; j < b.literals.size(); ++j) {
      const Literal& la = c1.literals[i];
      const Literal& lb = b.literals[j];
      if (la.positive == lb.positive) continue;
      if (auto s = unify_atoms(la.atom, lb.atom)) {
        out.push_back(substituted_union(c1, i, b, j, *s));
      }
    }
  }
  return out;
}

std::vector<Clause> paramodulants(const Clause& c1, const Clause& c2) {
  std::vector<Clause> out;
  auto one_direction = [&out](const Clause& from, const Clause& into) {
    Clause target = rename_apart(into, from);
    for (std::size_t e = 0; e < from.literals.size(); ++e) {
      const Literal& eq = from.literals[e];
      if (!eq.positive || !eq.atom.is_equality) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const Term& lhs = eq.atom.args[std::size_t(dir)];
        const Term& rhs = eq.atom.args[std::size_t(1 - dir)];
        for (std::size_t t = 0; t < target.literals.size(); ++t) {
          for (std::size_t arg = 0; arg < target.literals[t].atom.args.size(); ++arg) {
            std::vector<std::size_t> path;
            walk_positions(
                target.literals[t].atom.args[arg], path,
                [&](const Term& sub, const std::vector<std::size_t>& where) {
                  auto s = unify(lhs, sub);
                  if (!s) return;
                  Literal rewritten = target.literals[t];
                  rewritten.atom.args[arg] =
                      replace_at(rewritten.atom.args[arg], where, 0, rhs);
                  Clause result;
                  for (std::size_t k = 0; k < from.literals.size(); ++k) {
                    if (k != e)
                      result.literals.push_back(apply_substitution(from.literals[k], *s));
                  }
                  for (std::size_t k = 0; k < target.literals.size(); ++k) {
                    result.literals.push_back(apply_substitution(
                        k == t ? rewritten : target.literals[k], *s));
                  }
                  result.normalize();
                  out.push_back(std::move(result));
                });
          }
        }
      }
    }
  };
  one_direction(c1, c2);
  one_direction(c2, c1);
  return out;
}

// ---- step and proof checking ---------------------------------------------

namespace {

std::optional<Clause> premise_as_clause(const ProofStep& step, std::string& why_not) {
  if (!step.is_formula) return step.clause;
  std::vector<Clause> cs;
  try {
    cs = clausify(step.formula);
  } catch (const FolError& e) {
    why_not = e.what();
    return std::nullopt;
  }
  if (cs.size() != 1) {
    why_not = "premise formula does not clausify to a single clause";
    return std::nullopt;
  }
  return cs[0];
}

CheckResult reject(int id, const std::string& reason) {
  return {false, id, reason};
}

CheckResult accept() { return {true, 0, ""}; }

}  // namespace

CheckResult check_step(const ProofStep& step,
                       const std::map<int, const ProofStep*>& earlier,
                       const Problem& problem) {
  auto premise = [&](int id) -> const ProofStep* {
    auto it = earlier.find(id);
    return it == earlier.end() ? nullptr : it->second;
  };
  auto need_premise = [&](int id, const ProofStep*& out, CheckResult& err) {
    out = premise(id);
    if (out == nullptr) {
      err = reject(step.id, "premise " + std::to_string(id) + " does not precede step");
      return false;
    }
    return true;
  };

  switch (step.rationale.kind) {
    case Rationale::Kind::Assumption: {
      const Formula* f = problem.find_assumption(step.rationale.label);
      if (f == nullptr) {
        return reject(step.id, "no assumption labeled " + step.rationale.label);
      }
      if (!alpha_equal_formulas(step.formula, *f)) {
        return reject(step.id, "formula does not match assumption " + step.rationale.label);
      }
      return accept();
    }
    case Rationale::Kind::Goal: {
      if (step.rationale.label != problem.goal.label) {
        return reject(step.id, "goal label mismatch: " + step.rationale.label);
      }
      if (!alpha_equal_formulas(step.formula, problem.goal.formula)) {
        return reject(step.id, "formula does not match the registered goal");
      }
      return accept();
    }
    case Rationale::Kind::Clausify: {
      const ProofStep* p = nullptr;
      CheckResult err;
      if (!need_premise(step.rationale.premise1, p, err)) return err;
      if (!p->is_formula) {
        return reject(step.id, "Clausify premise must be a formula step");
      }
      std::vector<Clause> cs;
      try {
        cs = clausify(p->formula);
      } catch (const FolError& e) {
        return reject(step.id, e.what());
      }
      for (const auto& c : cs) {
        if (clauses_match(step.clause, c, /*allow_flip=*/true)) return accept();
      }
      return reject(step.id, "clause is not among the clausal forms of premise " +
                                 std::to_string(step.rationale.premise1));
    }
    case Rationale::Kind::CopyFlip: {
      const ProofStep* p = nullptr;
      CheckResult err;
      if (!need_premise(step.rationale.premise1, p, err)) return err;
      std::string why;
      auto base = premise_as_clause(*p, why);
      if (!base) return reject(step.id, why);
      for (std::size_t i = 0; i < base->literals.size(); ++i) {
        if (!base->literals[i].atom.is_equality) continue;
        Clause flipped = *base;
        std::swap(flipped.literals[i].atom.args[0], flipped.literals[i].atom.args[1]);
        if (clauses_match(step.clause, flipped, /*allow_flip=*/false)) return accept();
      }
      return reject(step.id, "clause is not the premise with one equality reversed");
    }
    case Rationale::Kind::Deny: {
      const ProofStep* p = nullptr;
      CheckResult err;
      if (!need_premise(step.rationale.premise1, p, err)) return err;
      if (!p->is_formula) return reject(step.id, "Deny premise must be a formula step");
      std::vector<Clause> cs;
      try {
        cs = clausify(Formula::unary(Formula::Kind::Not, p->formula));
      } catch (const FolError& e) {
        return reject(step.id, e.what());
      }
      for (const auto& c : cs) {
        if (clauses_match(step.clause, c, /*allow_flip=*/true)) return accept();
      }
      return reject(step.id, "clause is not among the clausal forms of the denied goal");
    }
    case Rationale::Kind::Resolve: {
      const ProofStep *p1 = nullptr, *p2 = nullptr;
      CheckResult err;
      if (!need_premise(step.rationale.premise1, p1, err)) return err;
      if (!need_premise(step.rationale.premise2, p2, err)) return err;
      std::string why;
      auto c1 = premise_as_clause(*p1, why);
      if (!c1) return reject(step.id, why);
      auto c2 = premise_as_clause(*p2, why);
      if (!c2) return reject(step.id, why);
      for (const auto& r : resolvents(*c1, *c2)) {
        if (clauses_match(step.clause, r, /*allow_flip=*/false)) return accept();
      }
      return reject(step.id, "clause is not a resolvent of premises " +
                                 std::to_string(step.rationale.premise1) + " and " +
                                 std::to_string(step.rationale.premise2) +
                                 " (unsupported rule instance if factoring or "
                                 "conditional rewriting was intended)");
    }
    case Rationale::Kind::Para: {
      const ProofStep *p1 = nullptr, *p2 = nullptr;
      CheckResult err;
      if (!need_premise(step.rationale.premise1, p1, err)) return err;
      if (!need_premise(step.rationale.premise2, p2, err)) return err;
      std::string why;
      auto c1 = premise_as_clause(*p1, why);
      if (!c1) return reject(step.id, why);
      auto c2 = premise_as_clause(*p2, why);
      if (!c2) return reject(step.id, why);
      for (const auto& r : paramodulants(*c1, *c2)) {
        if (clauses_match(step.clause, r, /*allow_flip=*/false)) return accept();
      }
      return reject(step.id, "clause is not a paramodulant of premises " +
                                 std::to_string(step.rationale.premise1) + " and " +
                                 std::to_string(step.rationale.premise2) +
                                 " (unsupported rule instance if conditional "
                                 "equality was intended)");
    }
  }
  return reject(step.id, "unknown rationale");
}

CheckResult check_proof(const Problem& problem, const std::vector<ProofStep>& trace) {
  if (trace.empty()) return {false, 0, "empty trace"};
  std::map<int, const ProofStep*> earlier;
  for (const auto& step : trace) {
    if (earlier.contains(step.id)) {
      return reject(step.id, "duplicate step id");
    }
    CheckResult r = check_step(step, earlier, problem);
    if (!r.accepted) return r;
    earlier.emplace(step.id, &step);
  }
  const ProofStep& last = trace.back();
  if (last.is_formula || !last.clause.empty()) {
    return reject(last.id, "trace does not end in the empty clause");
  }
  return accept();
}

}  // namespace ddclab::fol
