#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cartan/coframe.hpp"
#include "cartan/form.hpp"
#include "support/random_exprs.hpp"

using namespace cartan;

namespace {

Expr ax() { return Expr::atom(Atom::chart(ChartVar::x)); }
Expr au() { return Expr::atom(Atom::chart(ChartVar::u)); }
Expr ap() { return Expr::atom(Atom::chart(ChartVar::p)); }
Expr aq() { return Expr::atom(Atom::chart(ChartVar::q)); }
Expr ar() { return Expr::atom(Atom::chart(ChartVar::r)); }
Expr as() { return Expr::atom(Atom::chart(ChartVar::s)); }
Expr fa(int i, int k = 0) { return Expr::atom(Atom::coeff(i, k)); }
Expr pa(int i) { return Expr::atom(Atom::param(i)); }

Form dv(ChartVar v) { return Form::covector(static_cast<int>(v)); }
Form da(int alpha) { return Form::covector(kChartCount + alpha - 1); }

// The six contact covectors of the fourth-order problem, built by hand:
// w1 = dx, w2 = (du - p dx)/u, w3 = dp - q dx, w4 = dq - r dx,
// w5 = dr - s dx, w6 = dI with I = f4 s + f3 r + f2 q + f1 p + f0 u.
std::array<Form, 6> contact_coframe() {
  Expr I = fa(4) * as() + fa(3) * ar() + fa(2) * aq() + fa(1) * ap() +
           fa(0) * au();
  std::array<Form, 6> w;
  w[0] = dv(ChartVar::x);
  w[1] = (Expr::one() / au()) * (dv(ChartVar::u) - ap() * dv(ChartVar::x));
  w[2] = dv(ChartVar::p) - aq() * dv(ChartVar::x);
  w[3] = dv(ChartVar::q) - ar() * dv(ChartVar::x);
  w[4] = dv(ChartVar::r) - as() * dv(ChartVar::x);
  w[5] = d(Form::scalar(I));
  return w;
}

Form random_one_form(Rng& rng) {
  Form f = Form::zero(1);
  int n = static_cast<int>(rng.integer(2, 5));
  for (int i = 0; i < n; ++i) {
    int idx = static_cast<int>(rng.integer(0, kCovectorCount - 1));
    f += testsupport::random_simple_expr(rng) * Form::covector(idx);
  }
  return f;
}

// Integer-exponent coefficients so substitutions cannot demand radicals.
Form random_int_one_form(Rng& rng) {
  Form f = Form::zero(1);
  int n = static_cast<int>(rng.integer(2, 4));
  for (int i = 0; i < n; ++i) {
    int idx = static_cast<int>(rng.integer(0, kCovectorCount - 1));
    f += testsupport::random_int_expr(rng) * Form::covector(idx);
  }
  return f;
}

}  // namespace

TEST_CASE("exterior derivative of the contact covectors") {
  auto w = contact_coframe();
  // dw2 = (1/u) dx^dp - (p/u^2) dx^du
  Form dw2 = d(w[1]);
  CHECK(dw2.coeff2(0, 1) == Expr::zero() - ap() / (au() * au()));
  CHECK(dw2.coeff2(0, 2) == Expr::one() / au());
  CHECK(dw2.terms2().size() == 2);
  // dw3 = dp^dx wedge bookkeeping: d(-q dx) = -dq^dx = dx^dq
  Form dw3 = d(w[2]);
  CHECK(dw3.coeff2(0, 3) == Expr::one());
  CHECK(dw3.terms2().size() == 1);
  // dI picks up coefficient-atom derivatives through the dx slot.
  const Form& w6 = w[5];
  CHECK(w6.coeff1(0) == fa(4, 1) * as() + fa(3, 1) * ar() + fa(2, 1) * aq() +
                            fa(1, 1) * ap() + fa(0, 1) * au());
  CHECK(w6.coeff1(1) == fa(0));
  CHECK(w6.coeff1(5) == fa(4));
}

TEST_CASE("d of d vanishes") {
  auto w = contact_coframe();
  for (const auto& wi : w) CHECK(d(d(wi)).is_zero());
  for (int v = 0; v < kChartCount; ++v) {
    Form f = Form::scalar(Expr::atom(Atom::chart(static_cast<ChartVar>(v))));
    CHECK(d(d(f)).is_zero());
  }
  Form coeffs = Form::scalar(fa(4) * as() * as() + fa(2, 1) * au());
  CHECK(d(d(coeffs)).is_zero());
  Rng rng(2024);
  for (int i = 0; i < 25; ++i) {
    CHECK(d(d(random_one_form(rng))).is_zero());
  }
}

TEST_CASE("wedge antisymmetry and derivation rules") {
  Rng rng(77);
  for (int i = 0; i < 10; ++i) {
    Form a = random_one_form(rng);
    Form b = random_one_form(rng);
    CHECK((wedge(a, b) + wedge(b, a)).is_zero());
    CHECK(wedge(a, a).is_zero());
    // Leibniz on 1-forms: d(a^b) = da^b - a^db.
    Form lhs = d(wedge(a, b));
    Form rhs = wedge(d(a), b) - wedge(a, d(b));
    CHECK((lhs - rhs).is_zero());
  }
  // Scalar Leibniz: d(fg) = f dg + g df.
  Expr f = testsupport::random_expr(rng);
  Expr g = testsupport::random_expr(rng);
  Form lhs = d(Form::scalar(f * g));
  Form rhs = f * d(Form::scalar(g)) + g * d(Form::scalar(f));
  CHECK((lhs - rhs).is_zero());
  // d(f a) = df ^ a + f da.
  Form a = random_one_form(rng);
  CHECK((d(f * a) - (wedge(d(Form::scalar(f)), a) + f * d(a))).is_zero());
}

TEST_CASE("wedge degree cap") {
  Rng rng(5);
  Form a = random_one_form(rng);
  Form b = random_one_form(rng);
  Form ab = wedge(a, b);
  CHECK_THROWS_AS(wedge(ab, ab), Error);
  CHECK_THROWS_AS(d(wedge(ab, a)), Error);
}

TEST_CASE("pullback along parameter bindings") {
  // a2 -> -a3 p, the shape produced by an absorption step.
  std::map<Atom, Expr> binding{
      {Atom::param(2), Expr::zero() - pa(3) * ap()}};
  Form omega = wedge(da(2), dv(ChartVar::x));
  Form pulled = substitute_in_form(omega, binding);
  // d(-a3 p) ^ dx = (-p da3 - a3 dp) ^ dx
  CHECK(pulled.coeff2(0, 8) == ap());   // dx^da3 slot
  CHECK(pulled.coeff2(0, 2) == pa(3));  // dx^dp slot
  CHECK(pulled.terms2().size() == 2);
  // Coefficients substitute too.
  Form scaled = substitute_in_form((pa(2) * au()) * dv(ChartVar::x), binding);
  CHECK(scaled.coeff1(0) == Expr::zero() - pa(3) * ap() * au());
  // d and substitution commute for resolved bindings.
  Rng rng(91);
  for (int i = 0; i < 6; ++i) {
    Form f = random_int_one_form(rng);
    Form lhs = d(substitute_in_form(f, binding));
    Form rhs = substitute_in_form(d(f), binding);
    CHECK((lhs - rhs).is_zero());
  }
}

TEST_CASE("coframe matrix, determinant, inverse") {
  auto w = contact_coframe();
  Matrix6 m = coframe_matrix(w);
  CHECK(matrix_det(m) == fa(4) / au());
  Matrix6 inv = invert_matrix(m);
  // Inverse rows express chart covectors in the coframe: du = p w1 + u w2.
  CHECK(inv[1][0] == ap());
  CHECK(inv[1][1] == au());
  CHECK(inv[2][0] == aq());  // dp = q w1 + w3
  CHECK(inv[2][2] == Expr::one());
  // A * inv == identity.
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      Expr acc = Expr::zero();
      for (int k = 0; k < 6; ++k) acc = acc + m[i][k] * inv[k][j];
      CHECK(acc == (i == j ? Expr::one() : Expr::zero()));
    }
  }
  // Singular matrix: repeat a row.
  Matrix6 sing = m;
  sing[3] = sing[2];
  CHECK(matrix_det(sing).is_zero());
  CHECK_THROWS_AS(invert_matrix(sing), Error);
}

TEST_CASE("coframe carrying parameter differentials is rejected") {
  auto w = contact_coframe();
  w[2] += da(1);
  CHECK_THROWS_AS(coframe_matrix(w), Error);
}

TEST_CASE("coframe resolution reconstructs the form") {
  auto w = contact_coframe();
  Matrix6 inv = invert_matrix(coframe_matrix(w));
  Rng rng(12);
  for (int round = 0; round < 4; ++round) {
    Form omega = Form::zero(2);
    for (int t = 0; t < 5; ++t) {
      int j = static_cast<int>(rng.integer(0, kChartCount - 1));
      int k = static_cast<int>(rng.integer(0, kCovectorCount - 1));
      if (j == k) continue;
      omega += testsupport::random_expr(rng) *
               wedge(Form::covector(j), Form::covector(k));
    }
    CoframeResolution res = resolve_in_coframe(omega, inv);
    Form rebuilt = Form::zero(2);
    for (const auto& [jk, c] : res.torsion) {
      rebuilt += c * wedge(w[static_cast<std::size_t>(jk.first)],
                           w[static_cast<std::size_t>(jk.second)]);
    }
    for (const auto& [aj, c] : res.mixed) {
      rebuilt += c * wedge(da(aj.first),
                           w[static_cast<std::size_t>(aj.second)]);
    }
    CHECK((rebuilt - omega).is_zero());
  }
  // da ^ da content cannot be expressed in this basis.
  Form bad = wedge(da(1), da(2));
  CHECK_THROWS_AS(resolve_in_coframe(bad, inv), Error);
}

TEST_CASE("numeric evaluation of forms") {
  auto w = contact_coframe();
  std::map<Atom, double> env{{Atom::chart(ChartVar::u), 2.0},
                             {Atom::chart(ChartVar::p), 3.0}};
  TangentVector X{};
  X[0] = 1.0;  // d/dx direction
  CHECK(w[1].evaluate(env, X) == doctest::Approx(-1.5));
  TangentVector Y{};
  Y[2] = 1.0;  // d/dp
  Form dw2 = d(w[1]);
  double xy = dw2.evaluate(env, X, Y);
  double yx = dw2.evaluate(env, Y, X);
  CHECK(xy == doctest::Approx(0.5));  // (1/u) dx^dp pairing
  CHECK(xy == doctest::Approx(-yx));
}
