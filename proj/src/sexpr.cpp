#include "ddclab/sexpr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <variant>

#include "ddclab/sha256.hpp"

namespace ddclab {

struct SExpr::Rep {
  std::variant<std::string, std::int64_t, std::vector<SExpr>> value;
};

namespace {

const std::vector<SExpr> kNoItems{};

bool valid_symbol_char(char c) {
  return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' &&
         c != ';' && c != '\'';
}

std::string upcase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = char(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool integer_token(std::string_view tok) {
  std::size_t i = (tok[0] == '+' || tok[0] == '-') ? 1 : 0;
  if (i == tok.size()) return false;
  for (; i < tok.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
  }
  return true;
}

}  // namespace

SExpr SExpr::symbol(std::string_view name) {
  std::string up = upcase(name);
  if (up.empty()) throw Error("symbol name must be non-empty");
  for (char c : up) {
    if (!valid_symbol_char(c)) throw Error("invalid character in symbol: " + up);
  }
  if (up == "NIL") return nil();
  return SExpr(std::make_shared<const Rep>(Rep{std::move(up)}));
}

SExpr SExpr::integer(std::int64_t value) {
  return SExpr(std::make_shared<const Rep>(Rep{value}));
}

SExpr SExpr::list(std::vector<SExpr> items) {
  if (items.empty()) return nil();
  return SExpr(std::make_shared<const Rep>(Rep{std::move(items)}));
}

SExpr::Kind SExpr::kind() const {
  if (!rep_) return Kind::Nil;
  switch (rep_->value.index()) {
    case 0: return Kind::Symbol;
    case 1: return Kind::Int;
    default: return Kind::List;
  }
}

const std::string& SExpr::symbol_name() const {
  if (!is_symbol()) throw Error("not a symbol");
  return std::get<std::string>(rep_->value);
}

std::int64_t SExpr::int_value() const {
  if (!is_int()) throw Error("not an integer");
  return std::get<std::int64_t>(rep_->value);
}

const std::vector<SExpr>& SExpr::items() const {
  if (is_nil()) return kNoItems;
  if (!is_list()) throw Error("not a list");
  return std::get<std::vector<SExpr>>(rep_->value);
}

bool sexpr_equal(const SExpr& a, const SExpr& b) {
  if (a.rep_ == b.rep_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SExpr::Kind::Nil: return true;
    case SExpr::Kind::Symbol: return a.symbol_name() == b.symbol_name();
    case SExpr::Kind::Int: return a.int_value() == b.int_value();
    case SExpr::Kind::List: {
      const auto& xs = a.items();
      const auto& ys = b.items();
      if (xs.size() != ys.size()) return false;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!sexpr_equal(xs[i], ys[i])) return false;
      }
      return true;
    }
  }
  return false;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SExpr parse_single() {
    SExpr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParseError("trailing garbage after expression at byte " +
                       std::to_string(pos_));
    }
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr parse_expr() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty input or missing expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      std::vector<SExpr> items;
      while (true) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses: missing )");
        if (text_[pos_] == ')') {
          ++pos_;
          return SExpr::list(std::move(items));
        }
        items.push_back(parse_expr());
      }
    }
    if (c == ')') throw ParseError("unbalanced parentheses: unexpected )");
    if (c == '\'') {
      ++pos_;
      SExpr quoted = parse_expr();
      return SExpr::list({SExpr::symbol("QUOTE"), std::move(quoted)});
    }
    return parse_atom();
  }

  SExpr parse_atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && valid_symbol_char(text_[pos_])) ++pos_;
    std::string_view tok = text_.substr(start, pos_ - start);
    if (tok.empty()) throw ParseError("invalid token at byte " + std::to_string(start));
    if (integer_token(tok)) {
      std::string_view digits = tok[0] == '+' ? tok.substr(1) : tok;
      std::int64_t value = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        throw ParseError("integer out of 64-bit range: " + std::string(tok));
      }
      return SExpr::integer(value);
    }
    return SExpr::symbol(tok);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_to(const SExpr& x, std::string& out) {
  switch (x.kind()) {
    case SExpr::Kind::Nil:
      out += "NIL";
      return;
    case SExpr::Kind::Symbol:
      out += x.symbol_name();
      return;
    case SExpr::Kind::Int:
      out += std::to_string(x.int_value());
      return;
    case SExpr::Kind::List:
      out += '(';
      for (std::size_t i = 0; i < x.items().size(); ++i) {
        if (i > 0) out += ' ';
        print_to(x.items()[i], out);
      }
      out += ')';
      return;
  }
}

std::size_t printed_width(const SExpr& x) {
  switch (x.kind()) {
    case SExpr::Kind::Nil: return 3;
    case SExpr::Kind::Symbol: return x.symbol_name().size();
    case SExpr::Kind::Int: return std::to_string(x.int_value()).size();
    case SExpr::Kind::List: {
      std::size_t w = 2;
      for (const auto& item : x.items()) w += printed_width(item) + 1;
      return w;
    }
  }
  return 0;
}

void pretty_to(const SExpr& x, std::string& out, int indent) {
  constexpr std::size_t kFitWidth = 72;
  if (x.is_atom() || printed_width(x) + std::size_t(indent) <= kFitWidth) {
    print_to(x, out);
    return;
  }
  out += '(';
  const auto& xs = x.items();
  bool all_atoms =
      std::all_of(xs.begin(), xs.end(), [](const SExpr& e) { return e.is_atom(); });
  if (all_atoms) {
    // pack flat atom lists, wrapping at the width limit
    std::size_t column = std::size_t(indent) + 1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      std::size_t w = printed_width(xs[i]);
      if (i > 0) {
        if (column + w + 1 > kFitWidth) {
          out += '\n';
          out.append(std::size_t(indent) + 1, ' ');
          column = std::size_t(indent) + 1;
        } else {
          out += ' ';
          column += 1;
        }
      }
      print_to(xs[i], out);
      column += w;
    }
    out += ')';
    return;
  }
  pretty_to(xs[0], out, indent + 1);
  std::size_t start = 1;
  // keep a short atom right after the head, as in (DEFCODE NAME ...)
  if (xs.size() > 1 && xs[0].is_atom() && xs[1].is_atom() &&
      printed_width(xs[1]) <= 24) {
    out += ' ';
    print_to(xs[1], out);
    start = 2;
  }
  int inner = indent + 2;
  for (std::size_t i = start; i < xs.size(); ++i) {
    out += '\n';
    out.append(std::size_t(inner), ' ');
    pretty_to(xs[i], out, inner);
  }
  out += ')';
}

}  // namespace

SExpr parse_sexpr(std::string_view text) { return Parser(text).parse_single(); }

std::string print_inline(const SExpr& x) {
  std::string out;
  print_to(x, out);
  return out;
}

std::string print_canonical(const SExpr& x) {
  std::string out = print_inline(x);
  out += '\n';
  return out;
}

std::string print_pretty(const SExpr& x) {
  std::string out;
  pretty_to(x, out, 0);
  out += '\n';
  return out;
}

std::string canonical_hash(const SExpr& x) {
  return Sha256::hex_digest(print_canonical(x));
}

bool contains_subterm(const SExpr& tree, const SExpr& needle) {
  if (sexpr_equal(tree, needle)) return true;
  if (!tree.is_list()) return false;
  for (const auto& item : tree.items()) {
    if (contains_subterm(item, needle)) return true;
  }
  return false;
}

}  // namespace ddclab
