#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cartan/parse.hpp"
#include "support/random_exprs.hpp"

using namespace cartan;

namespace {

Expr jx() { return Expr::atom(Atom::chart(ChartVar::x)); }
Expr ju() { return Expr::atom(Atom::chart(ChartVar::u)); }
Expr jp() { return Expr::atom(Atom::chart(ChartVar::p)); }
Expr pa(int i) { return Expr::atom(Atom::param(i)); }
Expr fc(int i, int order = 0) { return Expr::atom(Atom::coeff(i, order)); }

// Convenience: parse against the widest symbol table.
Expr P(std::string_view s) { return parse_expr(s, full_symbols()); }

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(P("1 + 2*3^2") == Expr::from_int(19));
  CHECK(P("2^3^2") == Expr::from_int(512));  // right-assoc exponent
  CHECK(P("8/4/2") == Expr::from_int(1));    // left-assoc division
  CHECK(P("-x^2") == Expr::zero() - jx() * jx());
  CHECK(P("(-x)^2") == jx() * jx());
  CHECK(P("x/2*u") == jx() * ju() / Expr::from_int(2));
  CHECK(P("2 - -3") == Expr::from_int(5));
}

TEST_CASE("decimals are read exactly") {
  CHECK(P("1.25") == Expr::constant(Rational(5, 4)));
  CHECK(P("0.1") == Expr::constant(Rational(1, 10)));
  CHECK_THROWS_AS(P("12. + 1"), ParseError);  // dot needs digits
}

TEST_CASE("prime suffixes select coefficient derivatives") {
  CHECK(P("f4''") == fc(4, 2));
  CHECK(P("2*f3 - 3*f4'") ==
        Expr::from_int(2) * fc(3) - Expr::from_int(3) * fc(4, 1));
  Expr e = P("(2*f3 - 3*f4')/(4*f4^(3/4))");
  Expr want = (Expr::from_int(2) * fc(3) - Expr::from_int(3) * fc(4, 1)) /
              (Expr::from_int(4) * fc(4).pow(Rational(3, 4)));
  CHECK(e == want);
}

TEST_CASE("symbol tables gate identifiers") {
  CHECK_THROWS_AS(parse_expr("a3 + x", jet_symbols()), ParseError);
  CHECK(parse_expr("a3 + x", full_symbols()) == pa(3) + jx());
  try {
    parse_expr("f4 + 1", coefficient_symbols());
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().begin == 0);
    CHECK(pe.span().end == 2);
    CHECK(std::string(pe.what()).find("allowed here: x") != std::string::npos);
  }
  // Chart variables take no primes.
  CHECK_THROWS_AS(P("x'"), ParseError);
}

TEST_CASE("error spans point at the offending token") {
  try {
    P("x + * 2");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().begin == 4);
    CHECK(pe.span().line == 1);
    CHECK(pe.span().col == 5);
  }
  try {
    P("2*(x+1");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().begin == 6);  // end of input
    CHECK(std::string(pe.what()).find("')'") != std::string::npos);
  }
  try {
    P("x^u");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().col == 2);
    CHECK(std::string(pe.what()).find("rational") != std::string::npos);
  }
  try {
    P("1/(x - x)");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().col == 2);  // the '/'
  }
  // Engine-level radical restrictions surface with the '^' span.
  try {
    P("(x+1)^(1/3)");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().col == 6);
  }
  CHECK_THROWS_AS(P("x @ 2"), ParseError);
  CHECK_THROWS_AS(P(""), ParseError);
}

TEST_CASE("multi-line spans track lines and columns") {
  try {
    P("x +\n  y");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().line == 2);
    CHECK(pe.span().col == 3);
  }
}

TEST_CASE("formatting simple shapes") {
  CHECK(format_expr(Expr::zero()) == "0");
  CHECK(format_expr(jx() * jx() + jx() + Expr::one()) == "x^2 + x + 1");
  CHECK(format_expr(Expr::from_int(2) - jx()) == "-x + 2");
  CHECK(format_expr(jx() / Expr::from_int(2)) == "1/2*x");
  CHECK(format_expr((fc(4) * ju()).pow(Rational(1, 2))) ==
        "u^(1/2)*f4^(1/2)");
  CHECK(format_expr((fc(4) * ju()).pow(Rational(-1, 4))) ==
        "1/(u^(1/4)*f4^(1/4))");
}

TEST_CASE("folded quotients display with cleared exponents") {
  Expr torsion = Expr::zero() -
                 (pa(2) + pa(3) * jp()) / (pa(1) * pa(3) * ju());
  std::string s = format_expr(torsion);
  CHECK(s == "(-p*a3 - a2)/(u*a1*a3)");
  CHECK(P(s) == torsion);
}

TEST_CASE("round-trip on random canonical expressions") {
  Rng rng(0xC0FFEE);
  for (int i = 0; i < 200; ++i) {
    Expr e = testsupport::random_expr(rng);
    std::string s = format_expr(e);
    Expr back = P(s);
    INFO("expr: ", s);
    CHECK(back == e);
  }
}

TEST_CASE("operator files") {
  OperatorSpec op = parse_operator_file(
      "# Airy-like example\n"
      "name = shifted-airy\n"
      "f4 = 1\n"
      "f2 = x\n"
      "\n"
      "f0 = x^2 - 1\n");
  CHECK(op.name == "shifted-airy");
  CHECK(op.f[4] == Expr::one());
  CHECK(op.f[3].is_zero());
  CHECK(op.f[2] == jx());
  CHECK(op.f[0] == jx() * jx() - Expr::one());

  CHECK_THROWS_AS(parse_operator_file("f2 = x\n"), ParseError);  // no f4
  try {
    parse_operator_file("f4 = x - x\n");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(std::string(pe.what()).find("identically zero") !=
          std::string::npos);
    CHECK(pe.span().line == 1);
    CHECK(pe.span().col == 6);
  }
  CHECK_THROWS_AS(parse_operator_file("f4 = 1\nf4 = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_operator_file("f5 = 1\nf4 = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_operator_file("f4 : 1\n"), ParseError);
  try {
    parse_operator_file("f4 = 1\nf1 = u + 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(pe.span().line == 2);
    CHECK(pe.span().col == 6);
  }
}

TEST_CASE("transformation files") {
  Transformation t = parse_transformation_file(
      "name = stretch\n"
      "xi = 2*x\n"
      "phi = 1\n");
  CHECK(t.name == "stretch");
  CHECK(t.xi == Expr::from_int(2) * jx());
  CHECK(t.phi == Expr::one());

  CHECK_THROWS_AS(parse_transformation_file("xi = x\n"), ParseError);
  CHECK_THROWS_AS(parse_transformation_file("phi = 1\n"), ParseError);
  try {
    parse_transformation_file("xi = x\nphi = 0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(std::string(pe.what()).find("phi") != std::string::npos);
  }
  try {
    parse_transformation_file("xi = 3\nphi = 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& pe) {
    CHECK(std::string(pe.what()).find("depend on x") != std::string::npos);
  }
}
