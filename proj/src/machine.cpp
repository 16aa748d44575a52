#include "ddclab/machine.hpp"

#include <unordered_map>

namespace ddclab::machine {

namespace {

const std::unordered_map<std::string_view, int> kOperators = {
    {"CAR", 1},   {"CDR", 1},    {"CADR", 1},   {"CADDR", 1}, {"CADAR", 1},
    {"CADDAR", 1}, {"CADDDR", 1}, {"1-", 1},     {"1+", 1},    {"LEN", 1},
    {"SYMBOLP", 1}, {"CONSP", 1}, {"ATOM", 1},   {"LIST1", 1},
    {"CONS", 2},  {"EQUAL", 2},  {"APPEND", 2}, {"MEMBER", 2}, {"ASSOC", 2},
    {"+", 2},     {"-", 2},      {"*", 2},      {"LIST2", 2},
};

const SExpr kTrue = SExpr::symbol("T");

SExpr truth(bool b) { return b ? kTrue : SExpr::nil(); }

[[noreturn]] void domain_error(std::string_view op, const std::string& detail) {
  throw MachineError(MachineError::Kind::OperatorDomain,
                     std::string(op) + ": " + detail);
}

const SExpr& must_list(std::string_view op, const SExpr& x) {
  if (!x.is_list() && !x.is_nil()) domain_error(op, "argument is not a list");
  return x;
}

std::int64_t must_int(std::string_view op, const SExpr& x) {
  if (!x.is_int()) domain_error(op, "argument is not an integer");
  return x.int_value();
}

SExpr list_car(const SExpr& x) {
  const auto& xs = x.items();
  return xs.empty() ? SExpr::nil() : xs.front();
}

SExpr list_cdr(const SExpr& x) {
  const auto& xs = x.items();
  if (xs.empty()) return SExpr::nil();
  return SExpr::list(std::vector<SExpr>(xs.begin() + 1, xs.end()));
}

SExpr cxr(std::string_view op, const SExpr& x, std::string_view path) {
  // path is applied right-to-left, e.g. CADDR = CAR CDR CDR.
  SExpr cur = x;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    cur = *it == 'A' ? list_car(must_list(op, cur)) : list_cdr(must_list(op, cur));
  }
  return cur;
}

SExpr checked_arith(std::string_view op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool overflow = false;
  if (op == "+") overflow = __builtin_add_overflow(a, b, &r);
  else if (op == "-") overflow = __builtin_sub_overflow(a, b, &r);
  else overflow = __builtin_mul_overflow(a, b, &r);
  if (overflow) {
    throw MachineError(MachineError::Kind::IntegerOverflow,
                       "integer overflow in " + std::string(op));
  }
  return SExpr::integer(r);
}

}  // namespace

bool is_operator(std::string_view name) { return kOperators.contains(name); }

int operator_arity(std::string_view name) {
  auto it = kOperators.find(name);
  if (it == kOperators.end()) throw Error("unknown operator: " + std::string(name));
  return it->second;
}

SExpr apply_operator(std::string_view op, std::span<const SExpr> args) {
  auto it = kOperators.find(op);
  if (it == kOperators.end()) domain_error(op, "unknown operator");
  if (args.size() != std::size_t(it->second)) domain_error(op, "arity mismatch");

  const SExpr& a = args[0];
  if (op == "CAR") return list_car(must_list(op, a));
  if (op == "CDR") return list_cdr(must_list(op, a));
  if (op == "CADR") return cxr(op, a, "AD");
  if (op == "CADDR") return cxr(op, a, "ADD");
  if (op == "CADAR") return cxr(op, a, "ADA");
  if (op == "CADDAR") return cxr(op, a, "ADDA");
  if (op == "CADDDR") return cxr(op, a, "ADDD");
  if (op == "1-") return checked_arith("-", must_int(op, a), 1);
  if (op == "1+") return checked_arith("+", must_int(op, a), 1);
  if (op == "LEN") return SExpr::integer(std::int64_t(must_list(op, a).size()));
  if (op == "SYMBOLP") return truth(a.is_symbol() || a.is_nil());
  if (op == "CONSP") return truth(a.is_list());
  if (op == "ATOM") return truth(a.is_atom());
  if (op == "LIST1") return SExpr::list({a});

  const SExpr& b = args[1];
  if (op == "CONS") {
    const auto& tail = must_list(op, b).items();
    std::vector<SExpr> out;
    out.reserve(tail.size() + 1);
    out.push_back(a);
    out.insert(out.end(), tail.begin(), tail.end());
    return SExpr::list(std::move(out));
  }
  if (op == "EQUAL") return truth(sexpr_equal(a, b));
  if (op == "APPEND") {
    const auto& xs = must_list(op, a).items();
    const auto& ys = must_list(op, b).items();
    std::vector<SExpr> out;
    out.reserve(xs.size() + ys.size());
    out.insert(out.end(), xs.begin(), xs.end());
    out.insert(out.end(), ys.begin(), ys.end());
    return SExpr::list(std::move(out));
  }
  if (op == "MEMBER") {
    const auto& xs = must_list(op, b).items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (sexpr_equal(xs[i], a)) {
        return SExpr::list(std::vector<SExpr>(xs.begin() + i, xs.end()));
      }
    }
    return SExpr::nil();
  }
  if (op == "ASSOC") {
    for (const auto& entry : must_list(op, b).items()) {
      if (!entry.is_list()) domain_error(op, "alist entry is not a list");
      if (sexpr_equal(entry.items().front(), a)) return entry;
    }
    return SExpr::nil();
  }
  if (op == "+" || op == "-" || op == "*") {
    return checked_arith(op, must_int(op, a), must_int(op, b));
  }
  if (op == "LIST2") return SExpr::list({a, b});
  domain_error(op, "unhandled operator");
}

namespace {

[[noreturn]] void decode_error(const std::string& what) {
  throw MachineError(MachineError::Kind::Decode, what);
}

std::int64_t decode_count(const SExpr& x, const char* what) {
  if (!x.is_int() || x.int_value() < 0) {
    decode_error(std::string(what) + " operand must be a nonnegative integer");
  }
  return x.int_value();
}

Code decode_code(const SExpr& x);

Instruction decode_instruction(const SExpr& x) {
  if (!x.is_list() || x.items().empty() || !x.items()[0].is_symbol()) {
    decode_error("instruction is not a (HEAD ...) form: " + print_inline(x));
  }
  const auto& xs = x.items();
  const std::string& head = xs[0].symbol_name();
  if (head == "PUSHC") {
    if (xs.size() != 2) decode_error("PUSHC takes one operand");
    return {PushC{xs[1]}};
  }
  if (head == "PUSHV") {
    if (xs.size() != 2) decode_error("PUSHV takes one operand");
    return {PushV{decode_count(xs[1], "PUSHV")}};
  }
  if (head == "OPR") {
    if (xs.size() != 2 || !xs[1].is_symbol()) decode_error("OPR takes an operator symbol");
    if (!is_operator(xs[1].symbol_name())) {
      decode_error("unknown operator: " + xs[1].symbol_name());
    }
    return {Opr{xs[1].symbol_name()}};
  }
  if (head == "CALL") {
    if (xs.size() != 2 || !xs[1].is_symbol()) decode_error("CALL takes a function symbol");
    return {Call{xs[1].symbol_name()}};
  }
  if (head == "IF") {
    if (xs.size() != 3) decode_error("IF takes two code lists");
    return {If{decode_code(xs[1]), decode_code(xs[2])}};
  }
  if (head == "POP") {
    if (xs.size() != 2) decode_error("POP takes one operand");
    return {Pop{decode_count(xs[1], "POP")}};
  }
  decode_error("unknown instruction head: " + head);
}

Code decode_code(const SExpr& x) {
  if (!x.is_list() && !x.is_nil()) decode_error("code is not a list");
  Code code;
  code.reserve(x.size());
  for (const auto& item : x.items()) code.push_back(decode_instruction(item));
  return code;
}

SExpr encode_code(const Code& code);

SExpr encode_instruction(const Instruction& ins) {
  return std::visit(
      [](const auto& op) -> SExpr {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, PushC>) {
          return SExpr::list({SExpr::symbol("PUSHC"), op.constant});
        } else if constexpr (std::is_same_v<T, PushV>) {
          return SExpr::list({SExpr::symbol("PUSHV"), SExpr::integer(op.index)});
        } else if constexpr (std::is_same_v<T, Opr>) {
          return SExpr::list({SExpr::symbol("OPR"), SExpr::symbol(op.op)});
        } else if constexpr (std::is_same_v<T, Call>) {
          return SExpr::list({SExpr::symbol("CALL"), SExpr::symbol(op.fn)});
        } else if constexpr (std::is_same_v<T, If>) {
          return SExpr::list({SExpr::symbol("IF"), encode_code(op.then_code),
                              encode_code(op.else_code)});
        } else {
          return SExpr::list({SExpr::symbol("POP"), SExpr::integer(op.count)});
        }
      },
      ins.op);
}

SExpr encode_code(const Code& code) {
  std::vector<SExpr> items;
  items.reserve(code.size());
  for (const auto& ins : code) items.push_back(encode_instruction(ins));
  return SExpr::list(std::move(items));
}

void check_calls_resolve(const Code& code, const MachineProgram& prog) {
  for (const auto& ins : code) {
    if (const auto* call = std::get_if<Call>(&ins.op)) {
      if (prog.find_defcode(call->fn) == nullptr) {
        decode_error("unresolved CALL target: " + call->fn);
      }
    } else if (const auto* branch = std::get_if<If>(&ins.op)) {
      check_calls_resolve(branch->then_code, prog);
      check_calls_resolve(branch->else_code, prog);
    }
  }
}

}  // namespace

const Code* MachineProgram::find_defcode(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &defcodes_[it->second].second;
}

MachineProgram MachineProgram::decode(const SExpr& x) {
  if (!x.is_list() || x.items().empty()) {
    decode_error("program must be a list of DEFCODE forms plus a main code list");
  }
  MachineProgram prog;
  const auto& entries = x.items();
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    const SExpr& entry = entries[i];
    if (!entry.is_list() || entry.size() != 3 ||
        !entry.items()[0].is_symbol_named("DEFCODE") || !entry.items()[1].is_symbol()) {
      decode_error("malformed DEFCODE form: " + print_inline(entry));
    }
    const std::string& name = entry.items()[1].symbol_name();
    if (prog.index_.contains(name)) decode_error("duplicate DEFCODE: " + name);
    prog.index_.emplace(name, prog.defcodes_.size());
    prog.defcodes_.emplace_back(name, decode_code(entry.items()[2]));
  }
  prog.main_code_ = decode_code(entries.back());

  for (const auto& [name, code] : prog.defcodes_) check_calls_resolve(code, prog);
  check_calls_resolve(prog.main_code_, prog);
  return prog;
}

SExpr MachineProgram::encode() const {
  std::vector<SExpr> items;
  items.reserve(defcodes_.size() + 1);
  for (const auto& [name, code] : defcodes_) {
    items.push_back(
        SExpr::list({SExpr::symbol("DEFCODE"), SExpr::symbol(name), encode_code(code)}));
  }
  items.push_back(encode_code(main_code_));
  return SExpr::list(std::move(items));
}

namespace {

// One continuation segment: a code sequence and the next instruction in
// it. Call segments count toward the call-depth limit.
struct Segment {
  const Code* code;
  std::size_t pc = 0;
  bool is_call = false;
};

}  // namespace

RunResult run_program(const MachineProgram& prog, std::span<const SExpr> inputs,
                      const RunLimits& limits) {
  std::vector<SExpr> stack(inputs.begin(), inputs.end());
  std::vector<Segment> segments;
  segments.push_back({&prog.main_code(), 0, false});
  std::uint64_t steps = 0;
  std::uint64_t call_depth = 0;

  auto pop_value = [&stack]() {
    if (stack.empty()) {
      throw MachineError(MachineError::Kind::StackUnderflow, "value stack underflow");
    }
    SExpr v = std::move(stack.back());
    stack.pop_back();
    return v;
  };

  while (!segments.empty()) {
    Segment& seg = segments.back();
    if (seg.pc >= seg.code->size()) {
      if (seg.is_call) --call_depth;
      segments.pop_back();
      continue;
    }
    const Instruction& ins = (*seg.code)[seg.pc++];
    if (steps >= limits.fuel) {
      throw MachineError(MachineError::Kind::FuelExhausted,
                         "fuel exhausted after " + std::to_string(steps) + " steps");
    }
    ++steps;

    if (const auto* pushc = std::get_if<PushC>(&ins.op)) {
      stack.push_back(pushc->constant);
    } else if (const auto* pushv = std::get_if<PushV>(&ins.op)) {
      if (std::uint64_t(pushv->index) >= stack.size()) {
        throw MachineError(MachineError::Kind::PushVOutOfRange,
                           "PUSHV " + std::to_string(pushv->index) +
                               " exceeds stack depth " + std::to_string(stack.size()));
      }
      stack.push_back(stack[stack.size() - 1 - std::size_t(pushv->index)]);
    } else if (const auto* opr = std::get_if<Opr>(&ins.op)) {
      std::size_t arity = std::size_t(operator_arity(opr->op));
      if (stack.size() < arity) {
        throw MachineError(MachineError::Kind::StackUnderflow,
                           "stack underflow applying " + opr->op);
      }
      SExpr result =
          apply_operator(opr->op, std::span<const SExpr>(stack).last(arity));
      stack.resize(stack.size() - arity);
      stack.push_back(std::move(result));
    } else if (const auto* call = std::get_if<Call>(&ins.op)) {
      const Code* target = prog.find_defcode(call->fn);
      if (target == nullptr) {
        // Unreachable for decoded programs; guards hand-built ones.
        throw MachineError(MachineError::Kind::Decode,
                           "unresolved CALL target: " + call->fn);
      }
      if (++call_depth > limits.max_call_depth) {
        throw MachineError(MachineError::Kind::DepthExceeded,
                           "call depth limit exceeded: " +
                               std::to_string(limits.max_call_depth));
      }
      segments.push_back({target, 0, true});
    } else if (const auto* branch = std::get_if<If>(&ins.op)) {
      SExpr cond = pop_value();
      const Code& chosen = cond.is_nil() ? branch->else_code : branch->then_code;
      segments.push_back({&chosen, 0, false});
    } else {
      const auto& pop = std::get<Pop>(ins.op);
      SExpr v = pop_value();
      if (stack.size() < std::uint64_t(pop.count)) {
        throw MachineError(MachineError::Kind::StackUnderflow,
                           "POP " + std::to_string(pop.count) + " underflows");
      }
      stack.resize(stack.size() - std::size_t(pop.count));
      stack.push_back(std::move(v));
    }
  }

  if (stack.size() != 1) {
    throw MachineError(MachineError::Kind::StackUnderflow,
                       "program left " + std::to_string(stack.size()) +
                           " values on the stack; expected exactly one");
  }
  return {stack.back(), steps};
}

}  // namespace ddclab::machine
