#include "cartan/parse.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <vector>

namespace cartan {

namespace {

enum class Tok {
  number,
  ident,
  plus,
  minus,
  star,
  slash,
  caret,
  lparen,
  rparen,
  end,
};

struct Token {
  Tok kind = Tok::end;
  SourceSpan span;
  Rational value;      // number
  std::string base;    // ident without primes
  int primes = 0;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::number: return "number";
    case Tok::ident: {
      std::string s = "identifier '" + t.base;
      s.append(static_cast<std::size_t>(t.primes), '\'');
      return s + "'";
    }
    case Tok::plus: return "'+'";
    case Tok::minus: return "'-'";
    case Tok::star: return "'*'";
    case Tok::slash: return "'/'";
    case Tok::caret: return "'^'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::end: return "end of input";
  }
  return "token";
}

class Lexer {
 public:
  Lexer(std::string_view text, std::size_t base_offset, int base_line,
        int base_col)
      : text_(text),
        base_offset_(base_offset),
        base_line_(base_line),
        base_col_(base_col) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool done = t.kind == Tok::end;
      out.push_back(std::move(t));
      if (done) return out;
    }
  }

 private:
  SourceSpan span_from(std::size_t start_pos, int start_line, int start_col,
                       std::size_t end_pos) const {
    SourceSpan s;
    s.begin = base_offset_ + start_pos;
    s.end = base_offset_ + end_pos;
    if (start_line == 1) {
      s.line = base_line_;
      s.col = base_col_ + start_col - 1;
    } else {
      s.line = base_line_ + start_line - 1;
      s.col = start_col;
    }
    return s;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Token next() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      advance();
    }
    Token t;
    std::size_t start = pos_;
    int sl = line_, sc = col_;
    if (pos_ >= text_.size()) {
      t.kind = Tok::end;
      t.span = span_from(start, sl, sc, start);
      return t;
    }
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits += text_[pos_];
        advance();
      }
      std::string frac;
      if (pos_ < text_.size() && text_[pos_] == '.') {
        advance();
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          frac += text_[pos_];
          advance();
        }
        if (frac.empty()) {
          throw ParseError("expected digits after decimal point",
                           span_from(start, sl, sc, pos_));
        }
      }
      t.kind = Tok::number;
      BigInt numer(digits + frac);
      BigInt denom = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) denom *= 10;
      t.value = Rational(numer, denom);
      t.span = span_from(start, sl, sc, pos_);
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string base;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        base += text_[pos_];
        advance();
      }
      int primes = 0;
      while (pos_ < text_.size() && text_[pos_] == '\'') {
        ++primes;
        advance();
      }
      t.kind = Tok::ident;
      t.base = std::move(base);
      t.primes = primes;
      t.span = span_from(start, sl, sc, pos_);
      return t;
    }
    switch (c) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      default: {
        advance();
        std::string msg = "unexpected character '";
        msg += c;
        msg += "'";
        throw ParseError(msg, span_from(start, sl, sc, pos_));
      }
    }
    advance();
    t.span = span_from(start, sl, sc, pos_);
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::size_t base_offset_;
  int base_line_;
  int base_col_;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, const SymbolSet& allowed)
      : toks_(std::move(toks)), allowed_(allowed) {}

  Expr run() {
    Expr e = expr();
    if (peek().kind != Tok::end) {
      throw ParseError("expected operator or end of input, found " +
                           describe(peek()),
                       peek().span);
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token take() { return toks_[pos_++]; }

  Expr expr() {
    Expr lhs = term();
    while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
      Token op = take();
      Expr rhs = term();
      lhs = combine(op, lhs, rhs);
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (peek().kind == Tok::star || peek().kind == Tok::slash) {
      Token op = take();
      Expr rhs = factor();
      lhs = combine(op, lhs, rhs);
    }
    return lhs;
  }

  Expr factor() {
    if (peek().kind == Tok::minus) {
      Token op = take();
      Expr inner = factor();
      return combine(op, Expr::zero(), inner);
    }
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (peek().kind == Tok::caret) {
      Token op = take();
      Expr exp = factor();
      if (!exp.is_rational()) {
        throw ParseError("exponent must reduce to a rational constant",
                         op.span);
      }
      try {
        return base.pow(*exp.as_rational());
      } catch (const Error& err) {
        throw ParseError(err.what(), op.span);
      }
    }
    return base;
  }

  Expr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: {
        Token n = take();
        return Expr::constant(n.value);
      }
      case Tok::ident: {
        Token id = take();
        auto atom = atom_from_base_name(id.base, id.primes);
        if (!atom || allowed_.find(id.base) == allowed_.end()) {
          std::string names;
          for (const auto& s : allowed_) {
            if (!names.empty()) names += ", ";
            names += s;
          }
          throw ParseError("unknown symbol in " + describe(id) +
                               " (allowed here: " + names + ")",
                           id.span);
        }
        return Expr::atom(*atom);
      }
      case Tok::lparen: {
        take();
        Expr inner = expr();
        if (peek().kind != Tok::rparen) {
          throw ParseError("expected ')' to close '(', found " +
                               describe(peek()),
                           peek().span);
        }
        take();
        return inner;
      }
      default:
        throw ParseError("expected expression, found " + describe(t), t.span);
    }
  }

  Expr combine(const Token& op, const Expr& lhs, const Expr& rhs) {
    try {
      switch (op.kind) {
        case Tok::plus: return lhs + rhs;
        case Tok::minus: return lhs - rhs;
        case Tok::star: return lhs * rhs;
        case Tok::slash: return lhs / rhs;
        default: break;
      }
    } catch (const Error& err) {
      throw ParseError(err.what(), op.span);
    }
    fail(Errc::invalid_input, "not an operator token");
  }

  std::vector<Token> toks_;
  const SymbolSet& allowed_;
  std::size_t pos_ = 0;
};

}  // namespace

const SymbolSet& coefficient_symbols() {
  static const SymbolSet set{"x"};
  return set;
}

const SymbolSet& jet_symbols() {
  static const SymbolSet set{"x",  "u",  "p",  "q",  "r", "s",
                             "f0", "f1", "f2", "f3", "f4"};
  return set;
}

const SymbolSet& full_symbols() {
  static const SymbolSet set = [] {
    SymbolSet s = jet_symbols();
    for (int i = 1; i <= kParamCount; ++i) s.insert("a" + std::to_string(i));
    return s;
  }();
  return set;
}

Expr parse_expr_at(std::string_view text, const SymbolSet& allowed,
                   std::size_t base_offset, int base_line, int base_col) {
  Lexer lex(text, base_offset, base_line, base_col);
  Parser parser(lex.run(), allowed);
  return parser.run();
}

Expr parse_expr(std::string_view text, const SymbolSet& allowed) {
  return parse_expr_at(text, allowed, 0, 1, 1);
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

std::string exponent_suffix(int quarters) {
  if (quarters == 4) return "";
  if (quarters % 4 == 0) {
    int n = quarters / 4;
    if (n < 0) return "^(" + std::to_string(n) + ")";
    return "^" + std::to_string(n);
  }
  int g = std::gcd(quarters < 0 ? -quarters : quarters, 4);
  return "^(" + std::to_string(quarters / g) + "/" + std::to_string(4 / g) +
         ")";
}

std::string format_term(const TermView& t, bool leading) {
  Rational c = t.coeff;
  std::string out;
  if (c < 0) {
    out += leading ? "-" : " - ";
    c = -c;
  } else if (!leading) {
    out += " + ";
  }
  std::string body;
  if (t.powers.empty()) {
    body = to_string(c);
  } else {
    if (c != 1) body = to_string(c) + "*";
    bool first = true;
    for (const auto& ap : t.powers) {
      if (!first) body += "*";
      first = false;
      body += ap.atom.name() + exponent_suffix(ap.quarters);
    }
  }
  return out + body;
}

std::string format_sum(const std::vector<TermView>& terms) {
  std::string out;
  bool leading = true;
  for (const auto& t : terms) {
    out += format_term(t, leading);
    leading = false;
  }
  return out;
}

// True when the printed form needs parentheses as a '/' operand.
bool needs_parens_as_divisor(const std::vector<TermView>& terms) {
  if (terms.size() != 1) return true;
  const TermView& t = terms.front();
  return t.coeff != 1 || t.powers.size() != 1;
}

}  // namespace

std::string format_expr(const Expr& e) {
  if (e.is_zero()) return "0";
  // Clearing monomial: one extra power of each atom for every negative
  // exponent occurrence, so both displayed halves are exponent-nonnegative.
  std::map<Atom, int> neg;
  auto scan = [&neg](const std::vector<TermView>& terms) {
    for (const auto& t : terms) {
      for (const auto& ap : t.powers) {
        auto [it, fresh] = neg.emplace(ap.atom, ap.quarters);
        if (!fresh && ap.quarters < it->second) it->second = ap.quarters;
      }
    }
  };
  scan(e.numerator_terms());
  scan(e.denominator_terms());
  Expr clear = Expr::one();
  for (const auto& [atom, q] : neg) {
    if (q < 0) clear = clear * Expr::atom_power(atom, -q);
  }
  Expr shown_num = e.numerator() * clear;
  Expr shown_den = e.denominator() * clear;

  auto num_terms = shown_num.numerator_terms();
  std::string num_str = format_sum(num_terms);
  if (shown_den.is_one()) return num_str;

  auto den_terms = shown_den.numerator_terms();
  if (num_terms.size() > 1) num_str = "(" + num_str + ")";
  std::string den_str = format_sum(den_terms);
  if (needs_parens_as_divisor(den_terms)) den_str = "(" + den_str + ")";
  return num_str + "/" + den_str;
}

// ---------------------------------------------------------------------------
// key = value files

namespace {

struct KvLine {
  std::string key;
  SourceSpan key_span;
  std::string value;
  std::size_t value_offset = 0;
  int value_line = 1;
  int value_col = 1;
};

bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

std::vector<KvLine> split_kv_lines(std::string_view text) {
  std::vector<KvLine> out;
  std::size_t pos = 0;
  int line_no = 1;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::size_t line_end = (eol == std::string_view::npos) ? text.size() : eol;
    std::string_view line = text.substr(pos, line_end - pos);
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t b = 0, e = line.size();
    while (b < e && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(line[e - 1]))) --e;
    if (b < e) {
      std::string_view body = line.substr(b, e - b);
      std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) {
        SourceSpan span{pos + b, pos + e, line_no, static_cast<int>(b) + 1};
        throw ParseError("expected 'key = expression'", span);
      }
      std::size_t ke = eq;
      while (ke > 0 && std::isspace(static_cast<unsigned char>(body[ke - 1])))
        --ke;
      std::size_t vb = eq + 1;
      while (vb < body.size() &&
             std::isspace(static_cast<unsigned char>(body[vb])))
        ++vb;
      KvLine kv;
      kv.key = std::string(body.substr(0, ke));
      kv.key_span = SourceSpan{pos + b, pos + b + ke, line_no,
                               static_cast<int>(b) + 1};
      kv.value = std::string(body.substr(vb));
      kv.value_offset = pos + b + vb;
      kv.value_line = line_no;
      kv.value_col = static_cast<int>(b + vb) + 1;
      if (!is_ident(kv.key)) {
        throw ParseError("malformed key '" + kv.key + "'", kv.key_span);
      }
      out.push_back(std::move(kv));
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
    ++line_no;
  }
  return out;
}

int last_line(std::string_view text) {
  int n = 1;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

std::string read_file_or_fail(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::invalid_input, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void rethrow_with_path(const std::string& path,
                                    const ParseError& pe) {
  std::ostringstream msg;
  msg << path << ":" << pe.span().line << ":" << pe.span().col << ": "
      << pe.what();
  throw ParseError(msg.str(), pe.span());
}

}  // namespace

OperatorSpec parse_operator_file(std::string_view text) {
  OperatorSpec op;
  for (auto& f : op.f) f = Expr::zero();
  std::array<bool, 5> seen{};
  std::array<SourceSpan, 5> value_spans{};
  bool seen_name = false;
  for (const KvLine& kv : split_kv_lines(text)) {
    if (kv.key == "name") {
      if (seen_name)
        throw ParseError("duplicate key 'name'", kv.key_span);
      seen_name = true;
      op.name = kv.value;
      continue;
    }
    if (kv.key.size() == 2 && kv.key[0] == 'f' && kv.key[1] >= '0' &&
        kv.key[1] <= '4') {
      int i = kv.key[1] - '0';
      if (seen[static_cast<std::size_t>(i)]) {
        throw ParseError("duplicate key '" + kv.key + "'", kv.key_span);
      }
      seen[static_cast<std::size_t>(i)] = true;
      op.f[static_cast<std::size_t>(i)] =
          parse_expr_at(kv.value, coefficient_symbols(), kv.value_offset,
                        kv.value_line, kv.value_col);
      value_spans[static_cast<std::size_t>(i)] =
          SourceSpan{kv.value_offset, kv.value_offset + kv.value.size(),
                     kv.value_line, kv.value_col};
      continue;
    }
    throw ParseError("unrecognized key '" + kv.key +
                         "' (expected f0..f4 or name)",
                     kv.key_span);
  }
  if (!seen[4]) {
    SourceSpan span{text.size(), text.size(), last_line(text), 1};
    throw ParseError("operator file must define f4", span);
  }
  if (op.f[4].is_zero()) {
    throw ParseError("f4 must not be identically zero", value_spans[4]);
  }
  return op;
}

Transformation parse_transformation_file(std::string_view text) {
  Transformation t;
  bool seen_xi = false, seen_phi = false, seen_name = false;
  SourceSpan xi_span{}, phi_span{};
  for (const KvLine& kv : split_kv_lines(text)) {
    if (kv.key == "name") {
      if (seen_name) throw ParseError("duplicate key 'name'", kv.key_span);
      seen_name = true;
      t.name = kv.value;
      continue;
    }
    if (kv.key == "xi" || kv.key == "phi") {
      bool& seen = (kv.key == "xi") ? seen_xi : seen_phi;
      if (seen) {
        throw ParseError("duplicate key '" + kv.key + "'", kv.key_span);
      }
      seen = true;
      Expr value = parse_expr_at(kv.value, coefficient_symbols(),
                                 kv.value_offset, kv.value_line, kv.value_col);
      SourceSpan vspan{kv.value_offset, kv.value_offset + kv.value.size(),
                       kv.value_line, kv.value_col};
      if (kv.key == "xi") {
        t.xi = value;
        xi_span = vspan;
      } else {
        t.phi = value;
        phi_span = vspan;
      }
      continue;
    }
    throw ParseError("unrecognized key '" + kv.key +
                         "' (expected xi, phi or name)",
                     kv.key_span);
  }
  if (!seen_xi) {
    SourceSpan span{text.size(), text.size(), last_line(text), 1};
    throw ParseError("transformation file must define xi", span);
  }
  if (!seen_phi) {
    SourceSpan span{text.size(), text.size(), last_line(text), 1};
    throw ParseError("transformation file must define phi", span);
  }
  if (t.phi.is_zero()) {
    throw ParseError("phi must not be identically zero", phi_span);
  }
  if (t.xi.derivative(Atom::chart(ChartVar::x)).is_zero()) {
    throw ParseError("xi must depend on x", xi_span);
  }
  return t;
}

OperatorSpec load_operator_file(const std::string& path) {
  std::string text = read_file_or_fail(path);
  try {
    return parse_operator_file(text);
  } catch (const ParseError& pe) {
    rethrow_with_path(path, pe);
  }
}

Transformation load_transformation_file(const std::string& path) {
  std::string text = read_file_or_fail(path);
  try {
    return parse_transformation_file(text);
  } catch (const ParseError& pe) {
    rethrow_with_path(path, pe);
  }
}

}  // namespace cartan
