#pragma once

#include "cartan/expr.hpp"
#include "cartan/jet.hpp"

#include <set>
#include <string>
#include <string_view>

namespace cartan {

// Half-open byte range into the parsed text, with 1-based line/column of the
// first byte for diagnostics.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int col = 1;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, SourceSpan span)
      : Error(Errc::invalid_input, what), span_(span) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

using SymbolSet = std::set<std::string, std::less<>>;

// x only: operator coefficient files.
const SymbolSet& coefficient_symbols();
// x u p q r s f0..f4 (with primes handled by the lexer).
const SymbolSet& jet_symbols();
// jet_symbols plus a1..a10: structure-function transcriptions.
const SymbolSet& full_symbols();

// Grammar (left-associative, '^' binds tightest, unary minus above '*'):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := primary ('^' factor)?
//   primary:= number | ident | '(' expr ')'
// Numbers are integers or decimals (read exactly); idents may carry prime
// suffixes (f4'').  Exponents must canonicalize to rational constants.
Expr parse_expr(std::string_view text, const SymbolSet& allowed);

// Same, with spans offset so they address positions inside an enclosing file.
Expr parse_expr_at(std::string_view text, const SymbolSet& allowed,
                   std::size_t base_offset, int base_line, int base_col);

// Inverse of parse_expr on canonical forms: parse(format_expr(e)) == e
// structurally.  Negative exponents are cleared into a quotient for display.
std::string format_expr(const Expr& e);

// key = value lines, '#' comments, blank lines ignored.  Operator files take
// keys f0..f4 (exprs in x, default 0, f4 required and nonzero) and name.
OperatorSpec parse_operator_file(std::string_view text);
OperatorSpec load_operator_file(const std::string& path);

// Transformation files take keys xi, phi (exprs in x, both required; phi and
// xi' must not vanish identically) and name.
Transformation parse_transformation_file(std::string_view text);
Transformation load_transformation_file(const std::string& path);

}  // namespace cartan
