#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddclab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Immutable symbolic value: symbol, integer, NIL, or proper list. NIL and
// the empty list are one canonical value. Values share structure freely
// and are safe to copy and use across threads.
class SExpr {
 public:
  enum class Kind { Nil, Symbol, Int, List };

  SExpr() = default;  // NIL

  static SExpr nil() { return SExpr(); }
  static SExpr symbol(std::string_view name);
  static SExpr integer(std::int64_t value);
  static SExpr list(std::vector<SExpr> items);  // empty list collapses to NIL

  Kind kind() const;
  bool is_nil() const { return rep_ == nullptr; }
  bool is_symbol() const { return kind() == Kind::Symbol; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_list() const { return kind() == Kind::List; }
  // Atoms in the Lisp sense: everything that is not a non-empty list.
  bool is_atom() const { return !is_list(); }

  const std::string& symbol_name() const;
  std::int64_t int_value() const;
  // NIL yields an empty sequence, so list traversal code can treat NIL
  // and lists uniformly.
  const std::vector<SExpr>& items() const;
  std::size_t size() const { return items().size(); }

  bool is_symbol_named(std::string_view name) const {
    return is_symbol() && symbol_name() == name;
  }

 private:
  struct Rep;
  explicit SExpr(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;

  friend bool sexpr_equal(const SExpr& a, const SExpr& b);
};

bool sexpr_equal(const SExpr& a, const SExpr& b);
inline bool operator==(const SExpr& a, const SExpr& b) { return sexpr_equal(a, b); }
inline bool operator!=(const SExpr& a, const SExpr& b) { return !sexpr_equal(a, b); }

// Grammar: `(`, `)`, symbols, optionally signed decimal integers, NIL;
// `'x` desugars to (QUOTE x); `;` comments to end of line. Symbols are
// uppercased. Exactly one expression per input.
SExpr parse_sexpr(std::string_view text);

// Canonical byte form: uppercase symbols, base-10 integers, NIL for the
// empty list, single spaces inside lists, one trailing linefeed. This is
// the hashed and diffed representation; parse(print_canonical(x)) == x.
std::string print_canonical(const SExpr& x);

// Canonical form without the trailing newline, for embedding in messages.
std::string print_inline(const SExpr& x);

// Multi-line rendering for diffs and human inspection. Never hashed.
std::string print_pretty(const SExpr& x);

// Lowercase-hex SHA-256 of the canonical text.
std::string canonical_hash(const SExpr& x);

// True if `needle` occurs in `tree` as a node (the tree itself included).
bool contains_subterm(const SExpr& tree, const SExpr& needle);

}  // namespace ddclab
