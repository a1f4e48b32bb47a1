#include "cartan/equiv.hpp"

#include "cartan/errors.hpp"
#include "cartan/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cartan {

namespace {

double rel_gap(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Random polynomial in x of the given degree with rational coefficients in
// [-2, 2]; the probe functions u(x) the operators are applied to.
Expr random_polynomial(Rng& rng, int degree) {
  Expr poly = Expr::zero();
  Expr x = Expr::atom(Atom::chart(ChartVar::x));
  for (int i = 0; i <= degree; ++i) {
    Rational c(rng.integer(-200, 200), 100);
    poly = poly + Expr::constant(c) * x.pow(Rational(i));
  }
  return poly;
}

}  // namespace

EquivalenceReport check_equivalence(const OperatorSpec& a,
                                    const OperatorSpec& b,
                                    const Transformation& t, Mode mode,
                                    const EquivalenceOptions& opts) {
  if (opts.samples <= 0) fail(Errc::invalid_input, "samples must be positive");
  const Interval& iv = opts.interval;
  a.validate_on(iv);
  t.validate_on(iv);

  const Atom x_atom = Atom::chart(ChartVar::x);
  // The invariants carry fractional powers of u, so the comparison lives on
  // the branch u > 0; phi < 0 would push probe points off it.
  double xbar_lo = 0, xbar_hi = 0;
  for (int i = 0; i <= 100; ++i) {
    double x0 = iv.lo + (iv.hi - iv.lo) * i / 100.0;
    std::map<Atom, double> at{{x_atom, x0}};
    if (t.phi.evaluate(at) <= 0)
      fail(Errc::invalid_input,
           "phi must stay positive on the interval: invariants are defined "
           "on the u > 0 branch");
    double xb = t.xi.evaluate(at);
    if (i == 0) xbar_lo = xbar_hi = xb;
    xbar_lo = std::min(xbar_lo, xb);
    xbar_hi = std::max(xbar_hi, xb);
  }
  b.validate_on({xbar_lo, xbar_hi});

  EquivalenceReport report;
  report.mode = mode;
  report.tolerance = opts.tolerance;

  Rng rng(opts.seed);

  // Operator-level identity: Dbar[ubar](xbar) against D[u](x), with the
  // 4-jet of ubar = phi u produced by prolongation.
  report.operator_identity.label = "operator";
  report.operator_identity.trials = opts.samples;
  for (int k = 0; k < opts.samples; ++k) {
    Expr u_poly = random_polynomial(rng, 6);
    double x0 = rng.uniform(iv.lo, iv.hi);
    std::map<Atom, double> at{{x_atom, x0}};

    double lhs = apply_operator(a, u_poly, x0);
    if (mode == Mode::gauge) lhs *= t.phi.evaluate(at);

    JetPoint jp;
    jp.x = x0;
    Expr der = u_poly;
    double* comp[5] = {&jp.u, &jp.p, &jp.q, &jp.r, &jp.s};
    for (double* c : comp) {
      *c = der.evaluate(at);
      der = der.derivative(x_atom);
    }
    JetPoint pb = prolong(t, jp);

    std::map<Atom, double> at_bar{{x_atom, pb.x}};
    double jet_bar[5] = {pb.u, pb.p, pb.q, pb.r, pb.s};
    double rhs = 0;
    for (int i = 0; i <= 4; ++i) rhs += b.f[i].evaluate(at_bar) * jet_bar[i];

    report.operator_identity.max_deviation =
        std::max(report.operator_identity.max_deviation, rel_gap(lhs, rhs));
  }

  // Invariant matching at random jet points: the generic reduction supplies
  // each invariant once; the two operators enter through their coefficient
  // environments at corresponding points.  The scalar invariant I joins the
  // set even when no final torsion slot carries it (gauge mode), since it is
  // the only member sensitive to f0 there.
  std::map<std::string, Expr> invs = generic_pipeline(mode).invariants;
  invs.emplace("I", invariant_expr(OperatorSpec::generic(), mode));
  int order = 1;
  for (const auto& [name, e] : invs)
    order = std::max(order, coefficient_order(e));
  for (const auto& [name, expr] : invs) {
    ProbeSummary s;
    s.label = name;
    s.trials = opts.samples;
    report.invariants.push_back(s);
  }
  for (int k = 0; k < opts.samples; ++k) {
    JetPoint jp;
    jp.x = rng.uniform(iv.lo, iv.hi);
    jp.u = rng.uniform(0.5, 2.0);
    jp.p = rng.uniform(-2.0, 2.0);
    jp.q = rng.uniform(-2.0, 2.0);
    jp.r = rng.uniform(-2.0, 2.0);
    jp.s = rng.uniform(-2.0, 2.0);
    JetPoint pb = prolong(t, jp);

    std::map<Atom, double> env_a = jp.env();
    auto coeff_a = a.coefficient_env(jp.x, order);
    env_a.insert(coeff_a.begin(), coeff_a.end());
    std::map<Atom, double> env_b = pb.env();
    auto coeff_b = b.coefficient_env(pb.x, order);
    env_b.insert(coeff_b.begin(), coeff_b.end());

    std::size_t slot = 0;
    for (const auto& [name, expr] : invs) {
      double va = expr.evaluate(env_a);
      double vb = expr.evaluate(env_b);
      ProbeSummary& s = report.invariants[slot++];
      s.max_deviation = std::max(s.max_deviation, rel_gap(va, vb));
    }
  }

  report.max_deviation = report.operator_identity.max_deviation;
  for (const ProbeSummary& s : report.invariants)
    report.max_deviation = std::max(report.max_deviation, s.max_deviation);
  report.equivalent = report.max_deviation <= opts.tolerance;
  return report;
}

}  // namespace cartan
