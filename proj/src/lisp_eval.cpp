#include "ddclab/lisp_eval.hpp"

#include <functional>
#include <unordered_map>

namespace ddclab::lisp_eval {

namespace {

// Independent copy of the operator vocabulary. The machine keeps its own;
// agreement between the two is asserted by tests, not by shared code.
const std::unordered_map<std::string_view, int> kOperators = {
    {"CAR", 1},   {"CDR", 1},    {"CADR", 1},   {"CADDR", 1}, {"CADAR", 1},
    {"CADDAR", 1}, {"CADDDR", 1}, {"1-", 1},     {"1+", 1},    {"LEN", 1},
    {"SYMBOLP", 1}, {"CONSP", 1}, {"ATOM", 1},   {"LIST1", 1},
    {"CONS", 2},  {"EQUAL", 2},  {"APPEND", 2}, {"MEMBER", 2}, {"ASSOC", 2},
    {"+", 2},     {"-", 2},      {"*", 2},      {"LIST2", 2},
};

[[noreturn]] void fail(EvalError::Kind kind, const std::string& what) {
  throw EvalError(kind, what);
}

bool list_like(const SExpr& x) { return x.is_list() || x.is_nil(); }

SExpr take_car(const SExpr& x, std::string_view op) {
  if (!list_like(x)) fail(EvalError::Kind::OperatorDomain, std::string(op) + " of an atom");
  return x.size() == 0 ? SExpr::nil() : x.items().front();
}

SExpr take_cdr(const SExpr& x, std::string_view op) {
  if (!list_like(x)) fail(EvalError::Kind::OperatorDomain, std::string(op) + " of an atom");
  if (x.size() == 0) return SExpr::nil();
  return SExpr::list({x.items().begin() + 1, x.items().end()});
}

std::int64_t as_int(const SExpr& x, std::string_view op) {
  if (!x.is_int()) fail(EvalError::Kind::OperatorDomain, std::string(op) + " on a non-integer");
  return x.int_value();
}

SExpr bool_value(bool b) { return b ? SExpr::symbol("T") : SExpr::nil(); }

SExpr arith(std::string_view op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool bad = op == "+"   ? __builtin_add_overflow(a, b, &r)
             : op == "-" ? __builtin_sub_overflow(a, b, &r)
                         : __builtin_mul_overflow(a, b, &r);
  if (bad) fail(EvalError::Kind::OperatorDomain, "integer overflow in " + std::string(op));
  return SExpr::integer(r);
}

SExpr eval_operator(std::string_view op, const std::vector<SExpr>& args) {
  if (op == "CAR") return take_car(args[0], op);
  if (op == "CDR") return take_cdr(args[0], op);
  if (op == "CADR") return take_car(take_cdr(args[0], op), op);
  if (op == "CADDR") return take_car(take_cdr(take_cdr(args[0], op), op), op);
  if (op == "CADAR") return take_car(take_cdr(take_car(args[0], op), op), op);
  if (op == "CADDAR")
    return take_car(take_cdr(take_cdr(take_car(args[0], op), op), op), op);
  if (op == "CADDDR")
    return take_car(take_cdr(take_cdr(take_cdr(args[0], op), op), op), op);
  if (op == "1-") return arith("-", as_int(args[0], op), 1);
  if (op == "1+") return arith("+", as_int(args[0], op), 1);
  if (op == "LEN") {
    if (!list_like(args[0])) fail(EvalError::Kind::OperatorDomain, "LEN of an atom");
    return SExpr::integer(std::int64_t(args[0].size()));
  }
  if (op == "SYMBOLP") return bool_value(args[0].is_symbol() || args[0].is_nil());
  if (op == "CONSP") return bool_value(args[0].is_list());
  if (op == "ATOM") return bool_value(args[0].is_atom());
  if (op == "LIST1") return SExpr::list({args[0]});
  if (op == "CONS") {
    if (!list_like(args[1]))
      fail(EvalError::Kind::OperatorDomain, "CONS onto a non-list");
    std::vector<SExpr> out;
    out.reserve(args[1].size() + 1);
    out.push_back(args[0]);
    for (const auto& item : args[1].items()) out.push_back(item);
    return SExpr::list(std::move(out));
  }
  if (op == "EQUAL") return bool_value(sexpr_equal(args[0], args[1]));
  if (op == "APPEND") {
    if (!list_like(args[0]) || !list_like(args[1]))
      fail(EvalError::Kind::OperatorDomain, "APPEND of an atom");
    std::vector<SExpr> out;
    out.reserve(args[0].size() + args[1].size());
    for (const auto& item : args[0].items()) out.push_back(item);
    for (const auto& item : args[1].items()) out.push_back(item);
    return SExpr::list(std::move(out));
  }
  if (op == "MEMBER") {
    if (!list_like(args[1])) fail(EvalError::Kind::OperatorDomain, "MEMBER of an atom");
    const auto& xs = args[1].items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (sexpr_equal(xs[i], args[0]))
        return SExpr::list({xs.begin() + std::ptrdiff_t(i), xs.end()});
    }
    return SExpr::nil();
  }
  if (op == "ASSOC") {
    if (!list_like(args[1])) fail(EvalError::Kind::OperatorDomain, "ASSOC of an atom");
    for (const auto& entry : args[1].items()) {
      if (!entry.is_list())
        fail(EvalError::Kind::OperatorDomain, "ASSOC entry is not a list");
      if (sexpr_equal(entry.items().front(), args[0])) return entry;
    }
    return SExpr::nil();
  }
  if (op == "+" || op == "-" || op == "*")
    return arith(op, as_int(args[0], op), as_int(args[1], op));
  if (op == "LIST2") return SExpr::list({args[0], args[1]});
  fail(EvalError::Kind::OperatorDomain, "unknown operator " + std::string(op));
}

bool reserved_name(const std::string& name) {
  return kOperators.contains(name) || name == "QUOTE" || name == "IF" ||
         name == "T" || name == "DEFUN";
}

// Closed-world reference check over a function body.
void check_body(const SExpr& form, const std::vector<std::string>& params,
                const std::map<std::string, DefunEnv::Defun, std::less<>>& fns) {
  if (form.is_nil() || form.is_int()) return;
  if (form.is_symbol()) {
    const std::string& name = form.symbol_name();
    if (name == "T") return;
    for (const auto& p : params) {
      if (p == name) return;
    }
    fail(EvalError::Kind::Load, "unbound variable " + name);
  }
  const auto& xs = form.items();
  if (!xs.front().is_symbol()) {
    fail(EvalError::Kind::Load, "call head is not a symbol: " + print_inline(form));
  }
  const std::string& head = xs.front().symbol_name();
  if (head == "QUOTE") {
    if (xs.size() != 2) fail(EvalError::Kind::Load, "QUOTE takes one argument");
    return;  // quoted data is not evaluated
  }
  if (head == "IF") {
    if (xs.size() != 4) fail(EvalError::Kind::Load, "IF takes three arguments");
    for (std::size_t i = 1; i < xs.size(); ++i) check_body(xs[i], params, fns);
    return;
  }
  if (!kOperators.contains(head) && !fns.contains(head)) {
    fail(EvalError::Kind::Load, "undefined function " + head);
  }
  for (std::size_t i = 1; i < xs.size(); ++i) check_body(xs[i], params, fns);
}

}  // namespace

DefunEnv DefunEnv::load(const SExpr& defs) {
  if (!defs.is_list()) fail(EvalError::Kind::Load, "definitions must be a list of DEFUNs");
  DefunEnv env;
  for (const auto& def : defs.items()) {
    if (!def.is_list() || def.size() != 4 || !def.items()[0].is_symbol_named("DEFUN") ||
        !def.items()[1].is_symbol()) {
      fail(EvalError::Kind::Load, "malformed DEFUN: " + print_inline(def));
    }
    const std::string& name = def.items()[1].symbol_name();
    if (reserved_name(name)) {
      fail(EvalError::Kind::Load, "DEFUN may not shadow " + name);
    }
    if (env.functions_.contains(name)) {
      fail(EvalError::Kind::Load, "duplicate DEFUN " + name);
    }
    const SExpr& param_list = def.items()[2];
    if (!param_list.is_list() && !param_list.is_nil()) {
      fail(EvalError::Kind::Load, "parameter list of " + name + " is not a list");
    }
    Defun fn;
    for (const auto& p : param_list.items()) {
      if (!p.is_symbol()) fail(EvalError::Kind::Load, "parameter is not a symbol");
      fn.params.push_back(p.symbol_name());
    }
    fn.body = def.items()[3];
    env.functions_.emplace(name, std::move(fn));
  }
  for (const auto& [name, fn] : env.functions_) {
    check_body(fn.body, fn.params, env.functions_);
  }
  return env;
}

bool DefunEnv::has_function(std::string_view name) const {
  return functions_.find(name) != functions_.end();
}

const DefunEnv::Defun& DefunEnv::function(std::string_view name) const {
  auto it = functions_.find(name);
  if (it == functions_.end()) {
    fail(EvalError::Kind::Unbound, "undefined function " + std::string(name));
  }
  return it->second;
}

namespace {

struct Evaluator {
  const DefunEnv& env;
  const EvalLimits& limits;
  std::uint64_t steps = 0;
  std::uint64_t depth = 0;

  void spend() {
    if (steps >= limits.fuel) {
      fail(EvalError::Kind::FuelExhausted,
           "fuel exhausted after " + std::to_string(steps) + " steps");
    }
    ++steps;
  }

  SExpr call(std::string_view fn, std::span<const SExpr> args) {
    const DefunEnv::Defun& defun = env.function(fn);
    if (args.size() != defun.params.size()) {
      fail(EvalError::Kind::ArityMismatch,
           std::string(fn) + " expects " + std::to_string(defun.params.size()) +
               " arguments, got " + std::to_string(args.size()));
    }
    spend();
    if (++depth > limits.max_depth) {
      fail(EvalError::Kind::DepthExceeded,
           "evaluation depth limit exceeded: " + std::to_string(limits.max_depth));
    }
    SExpr result = eval(defun.body, defun.params, args);
    --depth;
    return result;
  }

  SExpr eval(const SExpr& form, const std::vector<std::string>& params,
             std::span<const SExpr> args) {
    if (form.is_nil() || form.is_int()) return form;
    if (form.is_symbol()) {
      const std::string& name = form.symbol_name();
      if (name == "T") return form;
      for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i] == name) return args[i];
      }
      fail(EvalError::Kind::Unbound, "unbound variable " + name);
    }
    const auto& xs = form.items();
    const std::string& head = xs.front().symbol_name();
    if (head == "QUOTE") return xs[1];
    if (head == "IF") {
      SExpr cond = eval(xs[1], params, args);
      return eval(cond.is_nil() ? xs[3] : xs[2], params, args);
    }
    std::vector<SExpr> values;
    values.reserve(xs.size() - 1);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      values.push_back(eval(xs[i], params, args));
    }
    auto op = kOperators.find(head);
    if (op != kOperators.end()) {
      if (values.size() != std::size_t(op->second)) {
        fail(EvalError::Kind::ArityMismatch, head + " arity mismatch");
      }
      spend();
      return eval_operator(head, values);
    }
    return call(head, values);
  }
};

}  // namespace

EvalResult eval_call(const DefunEnv& env, std::string_view fn,
                     std::span<const SExpr> args, const EvalLimits& limits) {
  Evaluator ev{env, limits};
  SExpr value = ev.call(fn, args);
  return {std::move(value), ev.steps};
}

}  // namespace ddclab::lisp_eval
