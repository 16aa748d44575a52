#include "ddclab/fol.hpp"

#include <algorithm>
#include <cctype>

namespace ddclab::fol {

bool operator==(const Term& a, const Term& b) {
  return a.kind == b.kind && a.name == b.name && a.args == b.args;
}

std::string to_string(const Term& t) {
  if (t.kind != Term::Kind::Fn) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ",";
    out += to_string(t.args[i]);
  }
  return out + ")";
}

bool operator==(const Atom& a, const Atom& b) {
  return a.is_equality == b.is_equality && a.pred == b.pred && a.args == b.args;
}

std::string to_string(const Atom& a) {
  if (a.is_equality) return to_string(a.args[0]) + " = " + to_string(a.args[1]);
  std::string out = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += to_string(a.args[i]);
  }
  return out + ")";
}

bool operator==(const Literal& a, const Literal& b) {
  return a.positive == b.positive && a.atom == b.atom;
}

std::string to_string(const Literal& l) {
  if (l.atom.is_equality && !l.positive) {
    return to_string(l.atom.args[0]) + " != " + to_string(l.atom.args[1]);
  }
  return (l.positive ? "" : "-") + to_string(l.atom);
}

void Clause::normalize() {
  std::vector<Literal> unique;
  for (auto& l : literals) {
    if (std::find(unique.begin(), unique.end(), l) == unique.end()) {
      unique.push_back(std::move(l));
    }
  }
  literals = std::move(unique);
}

bool operator==(const Clause& a, const Clause& b) { return a.literals == b.literals; }

std::string to_string(const Clause& c) {
  if (c.empty()) return "$F";
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " | ";
    out += to_string(c.literals[i]);
  }
  return out;
}

Formula Formula::unary(Kind k, Formula a) {
  Formula f;
  f.kind = k;
  f.children.push_back(std::move(a));
  return f;
}

Formula Formula::binary(Kind k, Formula a, Formula b) {
  Formula f;
  f.kind = k;
  f.children.push_back(std::move(a));
  f.children.push_back(std::move(b));
  return f;
}

Formula Formula::forall(std::string var, Formula body) {
  Formula f;
  f.kind = Kind::ForAll;
  f.bound_var = std::move(var);
  f.children.push_back(std::move(body));
  return f;
}

std::string to_string(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Atom: return to_string(f.lit);
    case Formula::Kind::Not: return "-(" + to_string(f.children[0]) + ")";
    case Formula::Kind::And:
      return "(" + to_string(f.children[0]) + " & " + to_string(f.children[1]) + ")";
    case Formula::Kind::Or:
      return "(" + to_string(f.children[0]) + " | " + to_string(f.children[1]) + ")";
    case Formula::Kind::Implies:
      return "(" + to_string(f.children[0]) + " -> " + to_string(f.children[1]) + ")";
    case Formula::Kind::ForAll:
      return "(all " + f.bound_var + " " + to_string(f.children[0]) + ")";
  }
  return "";
}

namespace {

struct Token {
  enum class Kind { Name, LParen, RParen, Comma, Eq, Neq, Minus, And, Or, Implies, Dot, End };
  Kind kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw FolError(what + " at byte " + std::to_string(current_.pos));
  }

 private:
  void advance() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      current_ = {Token::Kind::End, "", start};
      return;
    }
    char c = text_[pos_];
    auto single = [&](Token::Kind k) {
      ++pos_;
      current_ = {k, std::string(1, c), start};
    };
    switch (c) {
      case '(': single(Token::Kind::LParen); return;
      case ')': single(Token::Kind::RParen); return;
      case ',': single(Token::Kind::Comma); return;
      case '.': single(Token::Kind::Dot); return;
      case '&': single(Token::Kind::And); return;
      case '|': single(Token::Kind::Or); return;
      case '=': single(Token::Kind::Eq); return;
      case '!':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
          pos_ += 2;
          current_ = {Token::Kind::Neq, "!=", start};
          return;
        }
        throw FolError("stray '!' at byte " + std::to_string(start));
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          pos_ += 2;
          current_ = {Token::Kind::Implies, "->", start};
          return;
        }
        single(Token::Kind::Minus);
        return;
      default: break;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_' || text_[end] == '$')) {
        ++end;
      }
      current_ = {Token::Kind::Name, std::string(text_.substr(pos_, end - pos_)), start};
      pos_ = end;
      return;
    }
    throw FolError(std::string("unexpected character '") + c + "' at byte " +
                   std::to_string(start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{Token::Kind::End, "", 0};
};

bool is_variable_name(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : lex_(text) {}

  Formula parse_complete_formula() {
    Formula f = formula();
    if (lex_.peek().kind == Token::Kind::Dot) lex_.take();
    if (lex_.peek().kind != Token::Kind::End) lex_.fail("trailing input after formula");
    return f;
  }

  Term parse_complete_term() {
    Term t = term();
    if (lex_.peek().kind == Token::Kind::Dot) lex_.take();
    if (lex_.peek().kind != Token::Kind::End) lex_.fail("trailing input after term");
    return t;
  }

 private:
  // implies := or ('->' implies)?          (right associative)
  Formula formula() {
    Formula lhs = or_formula();
    if (lex_.peek().kind == Token::Kind::Implies) {
      lex_.take();
      return Formula::binary(Formula::Kind::Implies, std::move(lhs), formula());
    }
    return lhs;
  }

  Formula or_formula() {
    Formula lhs = and_formula();
    while (lex_.peek().kind == Token::Kind::Or) {
      lex_.take();
      lhs = Formula::binary(Formula::Kind::Or, std::move(lhs), and_formula());
    }
    return lhs;
  }

  Formula and_formula() {
    Formula lhs = unit();
    while (lex_.peek().kind == Token::Kind::And) {
      lex_.take();
      lhs = Formula::binary(Formula::Kind::And, std::move(lhs), unit());
    }
    return lhs;
  }

  Formula unit() {
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Minus) {
      lex_.take();
      return Formula::unary(Formula::Kind::Not, unit());
    }
    if (t.kind == Token::Kind::LParen) {
      lex_.take();
      Formula f = formula();
      expect(Token::Kind::RParen, ")");
      return f;
    }
    if (t.kind == Token::Kind::Name && t.text == "all") {
      lex_.take();
      Token var = expect(Token::Kind::Name, "quantified variable");
      if (!is_variable_name(var.text)) {
        lex_.fail("quantified name must start uppercase: " + var.text);
      }
      return Formula::forall(var.text, unit());
    }
    return atom_formula();
  }

  Formula atom_formula() {
    Term lhs = term();
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Eq || t.kind == Token::Kind::Neq) {
      bool positive = t.kind == Token::Kind::Eq;
      lex_.take();
      Term rhs = term();
      return Formula::atom({positive, Atom::equality(std::move(lhs), std::move(rhs))});
    }
    // A bare term at formula position must be a predicate application.
    if (lhs.kind == Term::Kind::Var) {
      lex_.fail("variable cannot stand as a formula: " + lhs.name);
    }
    if (lhs.kind == Term::Kind::Const) {
      lex_.fail("constant cannot stand as a formula: " + lhs.name +
                " (predicates need arguments)");
    }
    return Formula::atom({true, Atom::predicate(lhs.name, std::move(lhs.args))});
  }

  Term term() {
    Token t = expect(Token::Kind::Name, "term");
    if (lex_.peek().kind == Token::Kind::LParen) {
      lex_.take();
      std::vector<Term> args;
      if (lex_.peek().kind != Token::Kind::RParen) {
        args.push_back(term());
        while (lex_.peek().kind == Token::Kind::Comma) {
          lex_.take();
          args.push_back(term());
        }
      }
      expect(Token::Kind::RParen, ")");
      if (is_variable_name(t.text)) {
        lex_.fail("function name must start lowercase: " + t.text);
      }
      return Term::fn(t.text, std::move(args));
    }
    if (is_variable_name(t.text)) return Term::var(t.text);
    return Term::constant(t.text);
  }

  Token expect(Token::Kind kind, const char* what) {
    if (lex_.peek().kind != kind) {
      lex_.fail(std::string("expected ") + what + ", found '" + lex_.peek().text + "'");
    }
    return lex_.take();
  }

  Lexer lex_;
};

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(std::string_view line) {
  std::size_t pct = line.find('%');
  return strip(pct == std::string_view::npos ? line : line.substr(0, pct));
}

}  // namespace

Formula parse_formula(std::string_view text) {
  return FormulaParser(text).parse_complete_formula();
}

Term parse_term(std::string_view text) {
  return FormulaParser(text).parse_complete_term();
}

const Formula* Problem::find_assumption(std::string_view label) const {
  for (const auto& a : assumptions) {
    if (a.label == label) return &a.formula;
  }
  return nullptr;
}

Problem parse_problem(std::string_view text) {
  Problem problem;
  bool have_goal = false;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view raw = text.substr(
        start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = strip_comment(raw);
    if (line.empty()) continue;

    auto fail = [&](const std::string& what) {
      throw FolError("problem line " + std::to_string(line_no) + ": " + what);
    };
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) fail("expected '<kind> <label>: <formula>.'");
    std::string head = strip(line.substr(0, colon));
    std::string body = strip(line.substr(colon + 1));
    std::size_t space = head.find(' ');
    if (space == std::string::npos) fail("expected 'assumption <label>' or 'goal <label>'");
    std::string kind = head.substr(0, space);
    std::string label = strip(head.substr(space + 1));
    if (label.empty()) fail("missing label");
    Formula f = parse_formula(body);
    if (kind == "assumption") {
      problem.assumptions.push_back({std::move(label), std::move(f)});
    } else if (kind == "goal") {
      if (have_goal) fail("multiple goals");
      problem.goal = {std::move(label), std::move(f)};
      have_goal = true;
    } else {
      fail("unknown line kind '" + kind + "'");
    }
  }
  if (!have_goal) throw FolError("problem has no goal");
  return problem;
}

namespace {

Clause parse_clause_text(const std::string& text) {
  Clause clause;
  if (strip(text) == "$F") return clause;
  // Literals separated by '|'; each literal is parsed as a formula.
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t bar = text.find('|', start);
    std::string part = strip(bar == std::string::npos ? text.substr(start)
                                                      : text.substr(start, bar - start));
    if (part.empty()) throw FolError("empty literal in clause: " + text);
    Formula f = parse_formula(part);
    bool positive = true;
    while (f.kind == Formula::Kind::Not) {
      positive = !positive;
      f = f.children[0];
    }
    if (f.kind != Formula::Kind::Atom) {
      throw FolError("clause literal is not atomic: " + part);
    }
    if (!f.lit.positive) positive = !positive;
    clause.literals.push_back({positive, std::move(f.lit.atom)});
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  clause.normalize();
  return clause;
}

Rationale parse_rationale(const std::string& text, int line_no) {
  auto fail = [&](const std::string& what) {
    throw FolError("proof line " + std::to_string(line_no) + ": " + what);
  };
  std::vector<std::string> words;
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[i]))) ++i;
    std::size_t j = i;
    while (j < cleaned.size() && !std::isspace(static_cast<unsigned char>(cleaned[j]))) ++j;
    if (j > i) words.push_back(cleaned.substr(i, j - i));
    i = j;
  }
  if (words.empty()) fail("missing rationale");
  auto want_args = [&](std::size_t n) {
    if (words.size() != n + 1) fail("rationale '" + words[0] + "' arity");
  };
  auto num = [&](const std::string& w) {
    try {
      return std::stoi(w);
    } catch (...) {
      fail("premise id is not a number: " + w);
      return 0;
    }
  };
  Rationale r;
  if (words[0] == "Assumption") {
    want_args(1);
    r.kind = Rationale::Kind::Assumption;
    r.label = words[1];
  } else if (words[0] == "Goal") {
    want_args(1);
    r.kind = Rationale::Kind::Goal;
    r.label = words[1];
  } else if (words[0] == "Clausify") {
    want_args(1);
    r.kind = Rationale::Kind::Clausify;
    r.premise1 = num(words[1]);
  } else if (words[0] == "Copy") {
    // "Copy <i>, flip"
    if (words.size() != 3 || words[2] != "flip") fail("expected 'Copy <i>, flip'");
    r.kind = Rationale::Kind::CopyFlip;
    r.premise1 = num(words[1]);
  } else if (words[0] == "Deny") {
    want_args(1);
    r.kind = Rationale::Kind::Deny;
    r.premise1 = num(words[1]);
  } else if (words[0] == "Resolve") {
    want_args(2);
    r.kind = Rationale::Kind::Resolve;
    r.premise1 = num(words[1]);
    r.premise2 = num(words[2]);
  } else if (words[0] == "Para") {
    want_args(2);
    r.kind = Rationale::Kind::Para;
    r.premise1 = num(words[1]);
    r.premise2 = num(words[2]);
  } else {
    fail("unknown rationale '" + words[0] + "'");
  }
  return r;
}

}  // namespace

std::vector<ProofStep> parse_proof(std::string_view text) {
  std::vector<ProofStep> steps;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view raw = text.substr(
        start, nl == std::string_view::npos ? text.size() - start : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string line = strip_comment(raw);
    if (line.empty()) continue;

    auto fail = [&](const std::string& what) {
      throw FolError("proof line " + std::to_string(line_no) + ": " + what);
    };

    // <id>. <content>. <rationale>
    std::size_t first_dot = line.find('.');
    if (first_dot == std::string::npos) fail("expected '<id>. <content>. <rationale>'");
    int id = 0;
    try {
      id = std::stoi(line.substr(0, first_dot));
    } catch (...) {
      fail("step id is not a number");
    }
    std::size_t last_dot = line.rfind('.');
    if (last_dot == first_dot) fail("missing content/rationale separator");
    std::string content = strip(line.substr(first_dot + 1, last_dot - first_dot - 1));
    std::string rationale_text = strip(line.substr(last_dot + 1));

    ProofStep step;
    step.id = id;
    step.rationale = parse_rationale(rationale_text, line_no);
    step.is_formula = step.rationale.kind == Rationale::Kind::Assumption ||
                      step.rationale.kind == Rationale::Kind::Goal;
    if (step.is_formula) {
      step.formula = parse_formula(content);
    } else {
      step.clause = parse_clause_text(content);
    }
    steps.push_back(std::move(step));
  }
  return steps;
}

}  // namespace ddclab::fol
