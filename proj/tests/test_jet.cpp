#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cartan/jet.hpp"
#include "cartan/parse.hpp"

#include <cmath>

using namespace cartan;

namespace {

Expr ax() { return Expr::atom(Atom::chart(ChartVar::x)); }
Expr au() { return Expr::atom(Atom::chart(ChartVar::u)); }
Expr ap() { return Expr::atom(Atom::chart(ChartVar::p)); }
Expr aq() { return Expr::atom(Atom::chart(ChartVar::q)); }
Expr ar() { return Expr::atom(Atom::chart(ChartVar::r)); }
Expr as() { return Expr::atom(Atom::chart(ChartVar::s)); }
Expr fa(int i, int k = 0) { return Expr::atom(Atom::coeff(i, k)); }

OperatorSpec d4() {
  OperatorSpec op;
  for (auto& fi : op.f) fi = Expr::zero();
  op.f[4] = Expr::one();
  op.name = "biharmonic";
  return op;
}

Transformation make_t(const Expr& xi, const Expr& phi) {
  Transformation t;
  t.xi = xi;
  t.phi = phi;
  return t;
}

}  // namespace

TEST_CASE("identity prolongation is the identity") {
  auto J = Transformation::identity().jet_formulas();
  CHECK(J[0] == ax());
  CHECK(J[1] == au());
  CHECK(J[2] == ap());
  CHECK(J[3] == aq());
  CHECK(J[4] == ar());
  CHECK(J[5] == as());
}

TEST_CASE("gauge factor x gives the Leibniz jets of x*u") {
  auto J = make_t(ax(), ax()).jet_formulas();
  CHECK(J[1] == ax() * au());
  CHECK(J[2] == au() + ax() * ap());
  CHECK(J[3] == Expr::from_int(2) * ap() + ax() * aq());
  CHECK(J[4] == Expr::from_int(3) * aq() + ax() * ar());
  CHECK(J[5] == Expr::from_int(4) * ar() + ax() * as());
}

TEST_CASE("substitution xi = 2x rescales the jets dyadically") {
  auto J = make_t(Expr::from_int(2) * ax(), Expr::one()).jet_formulas();
  CHECK(J[2] == ap() / Expr::from_int(2));
  CHECK(J[3] == aq() / Expr::from_int(4));
  CHECK(J[4] == ar() / Expr::from_int(8));
  CHECK(J[5] == as() / Expr::from_int(16));
}

TEST_CASE("prolongation agrees with differentiating a concrete section") {
  // ubar(xbar) = phi(x) u(x) with xbar = x^2; jet of ubar via d/dxbar =
  // (1/2x) d/dx must match prolong() on the jet of u.
  Atom x = Atom::chart(ChartVar::x);
  Transformation t = make_t(ax() * ax(), ax() + Expr::one());
  Expr u_of_x = ax() * ax() * ax() + Expr::one();
  double x0 = 1.3;

  JetPoint jp;
  jp.x = x0;
  Expr der = u_of_x;
  double* slots[5] = {&jp.u, &jp.p, &jp.q, &jp.r, &jp.s};
  for (auto* slot : slots) {
    *slot = der.evaluate({{x, x0}});
    der = der.derivative(x);
  }

  JetPoint got = prolong(t, jp);

  Expr ubar = t.phi * u_of_x;
  Expr xip = t.xi.derivative(x);
  CHECK(got.x == doctest::Approx(x0 * x0).epsilon(1e-12));
  double expect[5];
  Expr cur = ubar;
  for (int k = 0; k < 5; ++k) {
    expect[k] = cur.evaluate({{x, x0}});
    cur = cur.derivative(x) / xip;
  }
  CHECK(got.u == doctest::Approx(expect[0]).epsilon(1e-12));
  CHECK(got.p == doctest::Approx(expect[1]).epsilon(1e-12));
  CHECK(got.q == doctest::Approx(expect[2]).epsilon(1e-12));
  CHECK(got.r == doctest::Approx(expect[3]).epsilon(1e-12));
  CHECK(got.s == doctest::Approx(expect[4]).epsilon(1e-12));
}

TEST_CASE("identity transform fixes the generic operator in both modes") {
  OperatorSpec gen = OperatorSpec::generic();
  for (Mode mode : {Mode::direct, Mode::gauge}) {
    TransformedOperator to =
        transform_operator(gen, Transformation::identity(), mode);
    for (int i = 0; i <= 4; ++i) {
      CHECK(to.composed[static_cast<std::size_t>(i)] == fa(i));
    }
    REQUIRE(to.target_chart.has_value());
    CHECK(to.target_chart->f[2] == fa(2));
  }
}

TEST_CASE("constant gauge factor scales a direct transform inversely") {
  TransformedOperator to =
      transform_operator(d4(), make_t(ax(), Expr::from_int(2)), Mode::direct);
  REQUIRE(to.target_chart.has_value());
  CHECK(to.target_chart->f[4] == Expr::constant(Rational(1, 2)));
  for (int i = 0; i < 4; ++i) {
    CHECK(to.target_chart->f[static_cast<std::size_t>(i)].is_zero());
  }
}

TEST_CASE("xi = 2x sends the biharmonic operator to 16 d^4") {
  TransformedOperator to = transform_operator(
      d4(), make_t(Expr::from_int(2) * ax(), Expr::one()), Mode::direct);
  REQUIRE(to.target_chart.has_value());
  CHECK(to.target_chart->f[4] == Expr::from_int(16));
  for (int i = 0; i < 4; ++i) {
    CHECK(to.target_chart->f[static_cast<std::size_t>(i)].is_zero());
  }
}

TEST_CASE("gauge conjugation by x matches the hand computation") {
  // x . D^4 . x^{-1}: fbar = (1, -4/x, 12/x^2, -24/x^3, 24/x^4).
  TransformedOperator to =
      transform_operator(d4(), make_t(ax(), ax()), Mode::gauge);
  Expr x = ax();
  CHECK(to.composed[4] == Expr::one());
  CHECK(to.composed[3] == Expr::from_int(-4) / x);
  CHECK(to.composed[2] == Expr::from_int(12) / (x * x));
  CHECK(to.composed[1] == Expr::from_int(-24) / (x * x * x));
  CHECK(to.composed[0] == Expr::from_int(24) / (x * x * x * x));
}

TEST_CASE("nonaffine xi leaves no closed-form target chart") {
  TransformedOperator to =
      transform_operator(d4(), make_t(ax() * ax(), Expr::one()), Mode::direct);
  CHECK_FALSE(to.target_chart.has_value());
  // The composed coefficients still satisfy the defining identity at a point:
  // sum fbar_i(xi(x)) * jet_i(ubar) = u''''(x) for u = x^4.
  Atom x = Atom::chart(ChartVar::x);
  Expr u_of_x = ax().pow(4);
  double x0 = 1.7;
  Expr xip = to.map.xi.derivative(x);
  Expr ubar = to.map.phi * u_of_x;
  double lhs = 0;
  Expr cur = ubar;
  for (int i = 0; i <= 4; ++i) {
    lhs += to.composed[static_cast<std::size_t>(i)].evaluate({{x, x0}}) *
           cur.evaluate({{x, x0}});
    cur = cur.derivative(x) / xip;
  }
  CHECK(lhs == doctest::Approx(24.0).epsilon(1e-10));
}

TEST_CASE("affine target chart agrees with the composed coefficients") {
  OperatorSpec op = parse_operator_file("f4 = 1 + x^2\nf1 = x\nf0 = 3\n");
  Transformation t = make_t(Expr::from_int(3) * ax() - Expr::one(),
                            ax() + Expr::from_int(2));
  TransformedOperator to = transform_operator(op, t, Mode::gauge);
  REQUIRE(to.target_chart.has_value());
  double x0 = 1.25;
  auto env_a = to.coefficient_env(x0, 3);
  Atom x = Atom::chart(ChartVar::x);
  double xbar0 = t.xi.evaluate({{x, x0}});
  auto env_b = to.target_chart->coefficient_env(xbar0, 3);
  REQUIRE(env_a.size() == env_b.size());
  for (const auto& [atom, va] : env_a) {
    CHECK(va == doctest::Approx(env_b.at(atom)).epsilon(1e-9));
  }
}

TEST_CASE("operator coefficient environments") {
  OperatorSpec op = parse_operator_file("f4 = x^2\n");
  auto env = op.coefficient_env(2.0, 2);
  CHECK(env.at(Atom::coeff(4, 0)) == doctest::Approx(4.0));
  CHECK(env.at(Atom::coeff(4, 1)) == doctest::Approx(4.0));
  CHECK(env.at(Atom::coeff(4, 2)) == doctest::Approx(2.0));
  CHECK(env.at(Atom::coeff(0, 0)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(OperatorSpec::generic().coefficient_env(1.0, 1), Error);
}

TEST_CASE("interval validation") {
  Interval iv;
  CHECK_THROWS_AS(parse_operator_file("f4 = x - 3\n").validate_on(iv), Error);
  CHECK_THROWS_AS(parse_operator_file("f4 = 1.5 - x\n").validate_on(iv),
                  Error);
  parse_operator_file("f4 = x\n").validate_on(iv);  // fine on [1,2]
  Transformation bad = make_t(ax(), ax() - Expr::constant(Rational(3, 2)));
  CHECK_THROWS_AS(bad.validate_on(iv), Error);
  make_t(ax() * ax(), ax()).validate_on(iv);  // xi' = 2x > 0 there
}

TEST_CASE("total derivative") {
  Expr e = fa(4) * ar() + au() * au();
  Expr want = fa(4, 1) * ar() + fa(4) * as() +
              Expr::from_int(2) * au() * ap();
  CHECK(total_derivative(e) == want);
  CHECK_THROWS_AS(total_derivative(as()), Error);
}

TEST_CASE("invariant expressions and values") {
  OperatorSpec gen = OperatorSpec::generic();
  Expr dir = invariant_expr(gen, Mode::direct);
  CHECK(dir == fa(4) * as() + fa(3) * ar() + fa(2) * aq() + fa(1) * ap() +
                   fa(0) * au());
  Expr gau = invariant_expr(gen, Mode::gauge);
  CHECK(gau == (fa(4) * as() + fa(3) * ar() + fa(2) * aq() + fa(1) * ap()) /
                       au() +
                   fa(0));

  OperatorSpec op = parse_operator_file("f4 = 1\nf0 = x\n");
  JetPoint jp{2.0, 3.0, 0.5, -1.0, 2.0, 4.0};
  CHECK(invariant_I(op, jp, Mode::direct) == doctest::Approx(4.0 + 2.0 * 3.0));
  CHECK(invariant_I(op, jp, Mode::gauge) ==
        doctest::Approx(4.0 / 3.0 + 2.0));
  std::array<Rational, 6> jet{Rational(2), Rational(3), Rational(1, 2),
                              Rational(-1), Rational(2), Rational(4)};
  CHECK(invariant_I_exact(op, jet, Mode::gauge) == Rational(10, 3));
}

TEST_CASE("apply_operator on polynomial sections") {
  OperatorSpec op = parse_operator_file("f4 = 1\nf0 = x\n");
  CHECK(apply_operator(op, ax().pow(4), 2.0) ==
        doctest::Approx(24.0 + 2.0 * 16.0));
  CHECK_THROWS_AS(apply_operator(OperatorSpec::generic(), ax(), 1.0), Error);
}

TEST_CASE("mode names") {
  CHECK(std::string(to_string(Mode::direct)) == "direct");
  CHECK(std::string(to_string(Mode::gauge)) == "gauge");
  CHECK(mode_from_string("gauge") == Mode::gauge);
  CHECK_FALSE(mode_from_string("both").has_value());
}
