#include "ddclab/fol_model.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace ddclab::fol {

namespace {

int checked_table_size(int domain, int arity) {
  long long size = 1;
  for (int i = 0; i < arity; ++i) {
    size *= domain;
    if (size > 1'000'000) throw FolError("model table too large");
  }
  return int(size);
}

int tuple_index(const std::vector<int>& args, int domain) {
  int index = 0;
  for (int a : args) index = index * domain + a;
  return index;
}

void merge_term(const Term& t, Signature& sig) {
  if (t.kind == Term::Kind::Var) return;
  int arity = int(t.args.size());
  auto [it, inserted] = sig.functions.emplace(t.name, arity);
  if (!inserted && it->second != arity) {
    throw FolError("function " + t.name + " used with inconsistent arity");
  }
  for (const auto& a : t.args) merge_term(a, sig);
}

}  // namespace

void Signature::merge_formula(const Formula& f) {
  if (f.kind == Formula::Kind::Atom) {
    const Atom& a = f.lit.atom;
    if (!a.is_equality) {
      auto [it, inserted] = predicates.emplace(a.pred, int(a.args.size()));
      if (!inserted && it->second != int(a.args.size())) {
        throw FolError("predicate " + a.pred + " used with inconsistent arity");
      }
    }
    for (const auto& t : a.args) merge_term(t, *this);
    return;
  }
  for (const auto& c : f.children) merge_formula(c);
}

int Interpretation::fn_value(const std::string& name, const std::vector<int>& args) const {
  auto it = functions.find(name);
  if (it == functions.end()) throw FolError("model does not interpret function " + name);
  auto ar = arity.find(name);
  if (ar == arity.end() || ar->second != int(args.size())) {
    throw FolError("arity mismatch for function " + name);
  }
  return it->second[std::size_t(tuple_index(args, domain_size))];
}

bool Interpretation::pred_value(const std::string& name, const std::vector<int>& args) const {
  auto it = predicates.find(name);
  if (it == predicates.end()) throw FolError("model does not interpret predicate " + name);
  auto ar = arity.find(name);
  if (ar == arity.end() || ar->second != int(args.size())) {
    throw FolError("arity mismatch for predicate " + name);
  }
  return it->second[std::size_t(tuple_index(args, domain_size))];
}

Interpretation parse_model(std::string_view text) {
  struct Row {
    bool is_pred;
    bool value_bool = true;
    std::string name;
    std::vector<int> args;
    int result = 0;
  };
  std::vector<Row> rows;
  int max_element = 0;

  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string line(text.substr(
        start, nl == std::string_view::npos ? text.size() - start : nl - start));
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto pct = line.find('%'); pct != std::string::npos) line.resize(pct);
    // strip whitespace
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
    while (!line.empty() && is_space(line.back())) line.pop_back();
    std::size_t begin = 0;
    while (begin < line.size() && is_space(line[begin])) ++begin;
    line = line.substr(begin);
    if (line.empty()) continue;

    auto fail = [&](const std::string& what) {
      throw FolError("model line " + std::to_string(line_no) + ": " + what);
    };

    Row row;
    row.is_pred = false;
    if (line[0] == '-') {
      row.is_pred = true;
      row.value_bool = false;
      line = line.substr(1);
      while (!line.empty() && is_space(line[0])) line = line.substr(1);
    }
    if (!line.empty() && line.back() == '.') line.pop_back();

    std::size_t lparen = line.find('(');
    std::size_t eq = line.rfind('=');
    if (eq != std::string::npos && (lparen == std::string::npos || eq > line.find(')'))) {
      // `name = k` or `f(args) = k`
      if (row.is_pred) fail("negated row cannot carry '='");
      std::string lhs = line.substr(0, eq);
      std::string rhs = line.substr(eq + 1);
      while (!lhs.empty() && is_space(lhs.back())) lhs.pop_back();
      while (!rhs.empty() && is_space(rhs[0])) rhs = rhs.substr(1);
      try {
        row.result = std::stoi(rhs);
      } catch (...) {
        fail("result is not an integer: " + rhs);
      }
      max_element = std::max(max_element, row.result);
      std::size_t lp = lhs.find('(');
      if (lp == std::string::npos) {
        row.name = lhs;
      } else {
        if (lhs.back() != ')') fail("unbalanced parentheses");
        row.name = lhs.substr(0, lp);
        std::string args = lhs.substr(lp + 1, lhs.size() - lp - 2);
        std::size_t p = 0;
        while (p <= args.size() && !args.empty()) {
          std::size_t comma = args.find(',', p);
          std::string tok = args.substr(p, comma == std::string::npos ? args.size() - p
                                                                      : comma - p);
          try {
            row.args.push_back(std::stoi(tok));
          } catch (...) {
            fail("argument is not an integer: " + tok);
          }
          max_element = std::max(max_element, row.args.back());
          if (comma == std::string::npos) break;
          p = comma + 1;
        }
      }
    } else {
      // predicate row `p(args)`
      row.is_pred = true;
      if (lparen == std::string::npos || line.back() != ')') {
        fail("expected predicate row 'name(args)'");
      }
      row.name = line.substr(0, lparen);
      std::string args = line.substr(lparen + 1, line.size() - lparen - 2);
      std::size_t p = 0;
      while (!args.empty()) {
        std::size_t comma = args.find(',', p);
        std::string tok =
            args.substr(p, comma == std::string::npos ? args.size() - p : comma - p);
        try {
          row.args.push_back(std::stoi(tok));
        } catch (...) {
          fail("argument is not an integer: " + tok);
        }
        max_element = std::max(max_element, row.args.back());
        if (comma == std::string::npos) break;
        p = comma + 1;
      }
    }
    rows.push_back(std::move(row));
  }

  Interpretation m;
  m.domain_size = max_element + 1;
  // First pass: discover arities and allocate tables.
  std::map<std::string, std::vector<bool>> fn_seen, pred_seen;
  for (const auto& row : rows) {
    int ar = int(row.args.size());
    auto [it, inserted] = m.arity.emplace(row.name, ar);
    if (!inserted && it->second != ar) {
      throw FolError("inconsistent arity for " + row.name);
    }
    int size = checked_table_size(m.domain_size, ar);
    if (row.is_pred) {
      m.predicates.try_emplace(row.name, std::size_t(size), false);
      pred_seen.try_emplace(row.name, std::size_t(size), false);
    } else {
      m.functions.try_emplace(row.name, std::size_t(size), 0);
      fn_seen.try_emplace(row.name, std::size_t(size), false);
    }
  }
  for (const auto& row : rows) {
    int index = tuple_index(row.args, m.domain_size);
    if (row.is_pred) {
      if (pred_seen[row.name][std::size_t(index)]) {
        throw FolError("duplicate row for " + row.name);
      }
      pred_seen[row.name][std::size_t(index)] = true;
      m.predicates[row.name][std::size_t(index)] = row.value_bool;
    } else {
      if (fn_seen[row.name][std::size_t(index)]) {
        throw FolError("duplicate row for " + row.name);
      }
      fn_seen[row.name][std::size_t(index)] = true;
      m.functions[row.name][std::size_t(index)] = row.result;
    }
  }
  for (const auto& [name, seen] : fn_seen) {
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw FolError("function table for " + name + " is not total");
    }
  }
  for (const auto& [name, seen] : pred_seen) {
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw FolError("predicate table for " + name + " is not total");
    }
  }
  return m;
}

namespace {

using VarEnv = std::map<std::string, int>;

void free_vars_term(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) {
    out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) free_vars_term(a, out);
}

void free_vars(const Formula& f, std::set<std::string>& out) {
  if (f.kind == Formula::Kind::Atom) {
    for (const auto& t : f.lit.atom.args) free_vars_term(t, out);
    return;
  }
  for (const auto& c : f.children) free_vars(c, out);
  // Bound variables count as universal anyway; no removal needed because
  // the fragment never shadows.
}

int eval_term(const Term& t, const Interpretation& m, const VarEnv& env) {
  if (t.kind == Term::Kind::Var) {
    auto it = env.find(t.name);
    if (it == env.end()) throw FolError("unbound variable " + t.name);
    return it->second;
  }
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(eval_term(a, m, env));
  return m.fn_value(t.name, args);
}

bool eval_rec(const Formula& f, const Interpretation& m, VarEnv& env) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      const Atom& a = f.lit.atom;
      bool value;
      if (a.is_equality) {
        value = eval_term(a.args[0], m, env) == eval_term(a.args[1], m, env);
      } else {
        std::vector<int> args;
        args.reserve(a.args.size());
        for (const auto& t : a.args) args.push_back(eval_term(t, m, env));
        value = m.pred_value(a.pred, args);
      }
      return f.lit.positive ? value : !value;
    }
    case Formula::Kind::Not:
      return !eval_rec(f.children[0], m, env);
    case Formula::Kind::And:
      return eval_rec(f.children[0], m, env) && eval_rec(f.children[1], m, env);
    case Formula::Kind::Or:
      return eval_rec(f.children[0], m, env) || eval_rec(f.children[1], m, env);
    case Formula::Kind::Implies:
      return !eval_rec(f.children[0], m, env) || eval_rec(f.children[1], m, env);
    case Formula::Kind::ForAll: {
      for (int v = 0; v < m.domain_size; ++v) {
        env[f.bound_var] = v;
        bool ok = eval_rec(f.children[0], m, env);
        env.erase(f.bound_var);
        if (!ok) return false;
      }
      return true;
    }
  }
  throw FolError("unreachable formula kind");
}

void check_coverage(const Formula& f, const Interpretation& m) {
  Signature sig;
  sig.merge_formula(f);
  for (const auto& [name, ar] : sig.functions) {
    auto it = m.arity.find(name);
    if (it == m.arity.end() || it->second != ar || !m.functions.contains(name)) {
      throw FolError("model signature does not cover function " + name + "/" +
                     std::to_string(ar));
    }
  }
  for (const auto& [name, ar] : sig.predicates) {
    auto it = m.arity.find(name);
    if (it == m.arity.end() || it->second != ar || !m.predicates.contains(name)) {
      throw FolError("model signature does not cover predicate " + name + "/" +
                     std::to_string(ar));
    }
  }
}

}  // namespace

bool eval_formula(const Formula& f, const Interpretation& m) {
  check_coverage(f, m);
  std::set<std::string> vars;
  free_vars(f, vars);
  std::vector<std::string> order(vars.begin(), vars.end());
  VarEnv env;
  std::function<bool(std::size_t)> all_assignments = [&](std::size_t i) {
    if (i == order.size()) return eval_rec(f, m, env);
    for (int v = 0; v < m.domain_size; ++v) {
      env[order[i]] = v;
      if (!all_assignments(i + 1)) return false;
    }
    return true;
  };
  return all_assignments(0);
}

bool verify_model(const std::vector<Formula>& assumptions, const Interpretation& m) {
  for (const auto& f : assumptions) {
    if (!eval_formula(f, m)) return false;
  }
  return true;
}

// ---- model search ----------------------------------------------------------

namespace {

// Partially assigned interpretation: -1 marks unassigned cells.
struct PartialModel {
  int domain = 1;
  std::map<std::string, std::vector<int>> fn;    // arity via sig
  std::map<std::string, std::vector<int>> pred;  // 0/1/-1

  std::optional<int> fn_at(const std::string& name, const std::vector<int>& args) const {
    int v = fn.at(name)[std::size_t(tuple_index(args, domain))];
    if (v < 0) return std::nullopt;
    return v;
  }
  std::optional<bool> pred_at(const std::string& name, const std::vector<int>& args) const {
    int v = pred.at(name)[std::size_t(tuple_index(args, domain))];
    if (v < 0) return std::nullopt;
    return v != 0;
  }
};

std::optional<int> eval_term_partial(const Term& t, const PartialModel& m,
                                     const VarEnv& env) {
  if (t.kind == Term::Kind::Var) return env.at(t.name);
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) {
    auto v = eval_term_partial(a, m, env);
    if (!v) return std::nullopt;
    args.push_back(*v);
  }
  return m.fn_at(t.name, args);
}

// Three-valued evaluation of a ground formula instance.
std::optional<bool> eval_partial(const Formula& f, const PartialModel& m, VarEnv& env) {
  switch (f.kind) {
    case Formula::Kind::Atom: {
      const Atom& a = f.lit.atom;
      std::optional<bool> value;
      if (a.is_equality) {
        auto l = eval_term_partial(a.args[0], m, env);
        auto r = eval_term_partial(a.args[1], m, env);
        if (l && r) value = *l == *r;
      } else {
        std::vector<int> args;
        bool known = true;
        for (const auto& t : a.args) {
          auto v = eval_term_partial(t, m, env);
          if (!v) {
            known = false;
            break;
          }
          args.push_back(*v);
        }
        if (known) value = m.pred_at(a.pred, args);
      }
      if (!value) return std::nullopt;
      return f.lit.positive ? *value : !*value;
    }
    case Formula::Kind::Not: {
      auto v = eval_partial(f.children[0], m, env);
      if (!v) return std::nullopt;
      return !*v;
    }
    case Formula::Kind::And: {
      auto l = eval_partial(f.children[0], m, env);
      if (l && !*l) return false;
      auto r = eval_partial(f.children[1], m, env);
      if (r && !*r) return false;
      if (l && r) return true;
      return std::nullopt;
    }
    case Formula::Kind::Or: {
      auto l = eval_partial(f.children[0], m, env);
      if (l && *l) return true;
      auto r = eval_partial(f.children[1], m, env);
      if (r && *r) return true;
      if (l && r) return false;
      return std::nullopt;
    }
    case Formula::Kind::Implies: {
      auto l = eval_partial(f.children[0], m, env);
      if (l && !*l) return true;
      auto r = eval_partial(f.children[1], m, env);
      if (r && *r) return true;
      if (l && r) return *r || !*l;
      return std::nullopt;
    }
    case Formula::Kind::ForAll: {
      bool unknown = false;
      for (int v = 0; v < m.domain; ++v) {
        env[f.bound_var] = v;
        auto ok = eval_partial(f.children[0], m, env);
        env.erase(f.bound_var);
        if (ok && !*ok) return false;
        if (!ok) unknown = true;
      }
      if (unknown) return std::nullopt;
      return true;
    }
  }
  return std::nullopt;
}

struct Cell {
  bool is_pred;
  bool is_constant;  // 0-ary function; subject to least-number pruning
  std::string name;
  int index;
};

struct GroundInstance {
  const Formula* formula;
  VarEnv env;
};

std::optional<Interpretation> search_at_size(const std::vector<Formula>& assumptions,
                                             const Signature& sig, int n) {
  PartialModel m;
  m.domain = n;
  std::vector<Cell> cells;
  for (const auto& [name, ar] : sig.functions) {
    int size = checked_table_size(n, ar);
    m.fn.emplace(name, std::vector<int>(std::size_t(size), -1));
    for (int i = 0; i < size; ++i) cells.push_back({false, ar == 0, name, i});
  }
  for (const auto& [name, ar] : sig.predicates) {
    int size = checked_table_size(n, ar);
    m.pred.emplace(name, std::vector<int>(std::size_t(size), -1));
    for (int i = 0; i < size; ++i) cells.push_back({true, false, name, i});
  }
  // Constants first so the least-number pruning bites, then the rest.
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return (a.is_constant ? 0 : a.is_pred ? 2 : 1) <
           (b.is_constant ? 0 : b.is_pred ? 2 : 1);
  });

  // Ground every assumption over its free variables.
  std::vector<GroundInstance> ground;
  for (const auto& f : assumptions) {
    std::set<std::string> vars;
    free_vars(f, vars);
    std::vector<std::string> order(vars.begin(), vars.end());
    std::vector<int> tuple(order.size(), 0);
    while (true) {
      VarEnv env;
      for (std::size_t i = 0; i < order.size(); ++i) env[order[i]] = tuple[i];
      ground.push_back({&f, std::move(env)});
      std::size_t k = 0;
      for (; k < tuple.size(); ++k) {
        if (++tuple[k] < n) break;
        tuple[k] = 0;
      }
      if (k == tuple.size()) break;
      if (tuple.empty()) break;
    }
  }

  // An instance that evaluates definitely-true under a partial assignment
  // stays true as cells fill in, so remember the depth where that happened
  // and skip it until backtracking unwinds past that depth.
  std::vector<int> satisfied_at(ground.size(), -1);
  auto consistent = [&](int depth) {
    for (std::size_t i = 0; i < ground.size(); ++i) {
      if (satisfied_at[i] >= 0) continue;
      VarEnv env = ground[i].env;
      auto v = eval_partial(*ground[i].formula, m, env);
      if (v) {
        if (!*v) return false;
        satisfied_at[i] = depth;
      }
    }
    return true;
  };
  auto unwind = [&](int depth) {
    for (auto& s : satisfied_at) {
      if (s >= depth) s = -1;
    }
  };

  std::function<bool(std::size_t, int)> assign = [&](std::size_t cell_index,
                                                     int max_constant_used) -> bool {
    if (cell_index == cells.size()) {
      for (std::size_t i = 0; i < ground.size(); ++i) {
        if (satisfied_at[i] >= 0) continue;
        VarEnv env = ground[i].env;
        auto v = eval_partial(*ground[i].formula, m, env);
        if (!v || !*v) return false;
      }
      return true;
    }
    const Cell& cell = cells[cell_index];
    auto& table = cell.is_pred ? m.pred.at(cell.name) : m.fn.at(cell.name);
    int limit = cell.is_pred ? 2 : n;
    if (cell.is_constant) {
      limit = std::min(n, max_constant_used + 2);  // least-number heuristic
    }
    int depth = int(cell_index);
    for (int v = 0; v < limit; ++v) {
      table[std::size_t(cell.index)] = v;
      if (consistent(depth)) {
        int next_max = cell.is_constant ? std::max(max_constant_used, v)
                                        : max_constant_used;
        if (assign(cell_index + 1, next_max)) return true;
      }
      unwind(depth);
    }
    table[std::size_t(cell.index)] = -1;
    return false;
  };

  if (!assign(0, -1)) return std::nullopt;

  Interpretation out;
  out.domain_size = n;
  for (const auto& [name, ar] : sig.functions) {
    out.arity[name] = ar;
    std::vector<int> table(m.fn.at(name).begin(), m.fn.at(name).end());
    out.functions.emplace(name, std::move(table));
  }
  for (const auto& [name, ar] : sig.predicates) {
    out.arity[name] = ar;
    const auto& src = m.pred.at(name);
    std::vector<bool> table(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) table[i] = src[i] == 1;
    out.predicates.emplace(name, std::move(table));
  }
  return out;
}

void tuple_to_args(int index, int arity, int domain, std::vector<int>& out) {
  out.assign(std::size_t(arity), 0);
  for (int i = arity - 1; i >= 0; --i) {
    out[std::size_t(i)] = index % domain;
    index /= domain;
  }
}

}  // namespace

std::optional<Interpretation> search_model(const std::vector<Formula>& assumptions,
                                           int max_domain) {
  Signature sig;
  for (const auto& f : assumptions) sig.merge_formula(f);
  for (int n = 1; n <= max_domain; ++n) {
    if (auto m = search_at_size(assumptions, sig, n)) return m;
  }
  return std::nullopt;
}

std::string to_string(const Interpretation& m) {
  std::string out;
  std::vector<int> args;
  for (const auto& [name, table] : m.functions) {
    int ar = m.arity.at(name);
    for (std::size_t i = 0; i < table.size(); ++i) {
      tuple_to_args(int(i), ar, m.domain_size, args);
      out += name;
      if (ar > 0) {
        out += '(';
        for (int k = 0; k < ar; ++k) {
          if (k) out += ',';
          out += std::to_string(args[std::size_t(k)]);
        }
        out += ')';
      }
      out += " = " + std::to_string(table[i]) + ".\n";
    }
  }
  for (const auto& [name, table] : m.predicates) {
    int ar = m.arity.at(name);
    for (std::size_t i = 0; i < table.size(); ++i) {
      tuple_to_args(int(i), ar, m.domain_size, args);
      out += table[i] ? "  " : "- ";
      out += name + "(";
      for (int k = 0; k < ar; ++k) {
        if (k) out += ',';
        out += std::to_string(args[std::size_t(k)]);
      }
      out += ").\n";
    }
  }
  return out;
}

}  // namespace ddclab::fol
