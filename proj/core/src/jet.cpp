#include "cartan/jet.hpp"

#include <cmath>

namespace cartan {

namespace {

Expr chart_expr(ChartVar v) { return Expr::atom(Atom::chart(v)); }

Atom jet_atom(int order) {
  // u^(0)..u^(4) correspond to the chart variables u,p,q,r,s.
  return Atom::chart(static_cast<ChartVar>(order + 1));
}

constexpr double kDegenerateTol = 1e-8;

}  // namespace

const char* to_string(Mode m) { return m == Mode::direct ? "direct" : "gauge"; }

std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "direct") return Mode::direct;
  if (s == "gauge") return Mode::gauge;
  return std::nullopt;
}

std::map<Atom, double> JetPoint::env() const {
  return {{Atom::chart(ChartVar::x), x}, {Atom::chart(ChartVar::u), u},
          {Atom::chart(ChartVar::p), p}, {Atom::chart(ChartVar::q), q},
          {Atom::chart(ChartVar::r), r}, {Atom::chart(ChartVar::s), s}};
}

OperatorSpec OperatorSpec::generic() {
  OperatorSpec op;
  for (int i = 0; i <= 4; ++i) {
    op.f[static_cast<std::size_t>(i)] = Expr::atom(Atom::coeff(i));
  }
  op.name = "generic";
  return op;
}

bool OperatorSpec::is_generic() const {
  for (const Expr& fi : f) {
    for (const Atom& a : fi.atoms()) {
      if (a.is_coeff()) return true;
    }
  }
  return false;
}

std::map<Atom, double> OperatorSpec::coefficient_env(double x0,
                                                     int max_order) const {
  if (is_generic())
    fail(Errc::missing_binding,
         "cannot evaluate the coefficients of the generic operator");
  std::map<Atom, double> env;
  std::map<Atom, double> at{{Atom::chart(ChartVar::x), x0}};
  for (int i = 0; i <= 4; ++i) {
    Expr g = f[static_cast<std::size_t>(i)];
    for (int k = 0; k <= max_order; ++k) {
      env[Atom::coeff(i, k)] = g.evaluate(at);
      g = g.derivative(Atom::chart(ChartVar::x));
    }
  }
  return env;
}

void OperatorSpec::validate_on(const Interval& iv) const {
  if (is_generic()) return;
  for (int j = 0; j <= 100; ++j) {
    double xv = iv.lo + (iv.hi - iv.lo) * j / 100.0;
    std::map<Atom, double> at{{Atom::chart(ChartVar::x), xv}};
    double f4v = 0;
    try {
      for (int i = 0; i <= 3; ++i) f[static_cast<std::size_t>(i)].evaluate(at);
      f4v = f[4].evaluate(at);
    } catch (const Error& e) {
      fail(Errc::invalid_input,
           "operator coefficient not evaluable at x = " + std::to_string(xv) +
               ": " + e.what());
    }
    if (!(f4v > 0)) {
      fail(Errc::invalid_input,
           "f4 must stay positive on the working interval; f4(" +
               std::to_string(xv) + ") = " + std::to_string(f4v));
    }
  }
}

Transformation Transformation::identity() {
  Transformation t;
  t.xi = chart_expr(ChartVar::x);
  t.phi = Expr::one();
  t.name = "identity";
  return t;
}

void Transformation::validate_on(const Interval& iv) const {
  Expr xip = xi.derivative(Atom::chart(ChartVar::x));
  for (int j = 0; j <= 100; ++j) {
    double xv = iv.lo + (iv.hi - iv.lo) * j / 100.0;
    std::map<Atom, double> at{{Atom::chart(ChartVar::x), xv}};
    try {
      if (std::abs(phi.evaluate(at)) < kDegenerateTol)
        fail(Errc::invalid_input,
             "phi vanishes near x = " + std::to_string(xv));
      if (std::abs(xip.evaluate(at)) < kDegenerateTol)
        fail(Errc::invalid_input,
             "xi' vanishes near x = " + std::to_string(xv));
    } catch (const Error& e) {
      if (e.code() == Errc::invalid_input) throw;
      fail(Errc::invalid_input,
           "transformation not evaluable at x = " + std::to_string(xv) + ": " +
               e.what());
    }
  }
}

const std::array<Expr, 6>& Transformation::jet_formulas() const {
  if (jets_) return *jets_;
  Expr xip = xi.derivative(Atom::chart(ChartVar::x));
  if (xip.is_zero())
    fail(Errc::invalid_input, "xi must depend on x");
  auto J = std::make_shared<std::array<Expr, 6>>();
  (*J)[0] = xi;
  (*J)[1] = phi * chart_expr(ChartVar::u);
  // Chain rule Dbar = (1/xi') D gives J_{k+1} = D J_k / xi'.  Writing
  // J_k = N_k / xi'^{d_k} with polynomial N_k,
  //   N_{k+1} = (D N_k) xi' - d_k N_k xi'',  d_{k+1} = d_k + 2,
  // so each level divides exactly once instead of nesting quotients whose
  // denominators the canonical form cannot cancel.
  Expr xipp = xip.derivative(Atom::chart(ChartVar::x));
  Expr N = total_derivative((*J)[1]);
  int d = 1;
  (*J)[2] = N / xip;
  for (int k = 3; k <= 5; ++k) {
    N = total_derivative(N) * xip - Expr::from_int(d) * N * xipp;
    d += 2;
    (*J)[static_cast<std::size_t>(k)] = N / xip.pow(Rational(d));
  }
  jets_ = J;
  return *jets_;
}

Expr total_derivative(const Expr& e) {
  if (e.contains(Atom::chart(ChartVar::s)))
    fail(Errc::degree_overflow,
         "total derivative of an expression in s needs the fifth jet");
  Expr out = e.derivative(Atom::chart(ChartVar::x));
  out = out + chart_expr(ChartVar::p) * e.derivative(Atom::chart(ChartVar::u));
  out = out + chart_expr(ChartVar::q) * e.derivative(Atom::chart(ChartVar::p));
  out = out + chart_expr(ChartVar::r) * e.derivative(Atom::chart(ChartVar::q));
  out = out + chart_expr(ChartVar::s) * e.derivative(Atom::chart(ChartVar::r));
  return out;
}

int coefficient_order(const Expr& e) {
  int order = 0;
  for (const Atom& a : e.atoms())
    if (a.kind() == Atom::Kind::coeff) order = std::max(order, a.deriv_order());
  return order;
}

JetPoint prolong(const Transformation& t, const JetPoint& jp) {
  const auto& J = t.jet_formulas();
  auto env = jp.env();
  JetPoint out;
  out.x = J[0].evaluate(env);
  out.u = J[1].evaluate(env);
  out.p = J[2].evaluate(env);
  out.q = J[3].evaluate(env);
  out.r = J[4].evaluate(env);
  out.s = J[5].evaluate(env);
  return out;
}

TransformedOperator transform_operator(const OperatorSpec& op,
                                       const Transformation& t, Mode mode) {
  TransformedOperator out;
  out.map = t;
  out.mode = mode;
  const auto& J = t.jet_formulas();
  // L_i = the i-th transformed derivative as a function of the source jet;
  // linear in u..s, so c[i][j] are functions of x alone.
  std::array<std::array<Expr, 5>, 5> c;
  for (int i = 0; i <= 4; ++i) {
    for (int j = 0; j <= 4; ++j) {
      c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          J[static_cast<std::size_t>(i + 1)].derivative(jet_atom(j));
    }
  }
  // Solve sum_i g_i c_ij = rhs_j downward; g_i = fbar_i(xi(x)).
  std::array<Expr, 5> g;
  for (int j = 4; j >= 0; --j) {
    Expr rhs = op.f[static_cast<std::size_t>(j)];
    if (mode == Mode::gauge) rhs = t.phi * rhs;
    for (int i = j + 1; i <= 4; ++i) {
      rhs = rhs - g[static_cast<std::size_t>(i)] *
                      c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    g[static_cast<std::size_t>(j)] =
        rhs / c[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];
  }
  out.composed = g;
  // Affine xi inverts in closed form, giving the target-chart coefficients.
  Atom x = Atom::chart(ChartVar::x);
  Expr xip = t.xi.derivative(x);
  if (xip.derivative(x).is_zero()) {
    Expr beta = t.xi.substituted({{x, Expr::zero()}});
    std::map<Atom, Expr> back{{x, (chart_expr(ChartVar::x) - beta) / xip}};
    OperatorSpec target;
    for (int i = 0; i <= 4; ++i) {
      target.f[static_cast<std::size_t>(i)] =
          g[static_cast<std::size_t>(i)].substituted(back);
    }
    target.name = op.name.empty() ? "transformed" : op.name + "-transformed";
    out.target_chart = std::move(target);
  }
  return out;
}

std::map<Atom, double> TransformedOperator::coefficient_env(
    double x0_source, int max_order) const {
  std::map<Atom, double> env;
  Atom x = Atom::chart(ChartVar::x);
  std::map<Atom, double> at{{x, x0_source}};
  const std::size_t len = static_cast<std::size_t>(max_order) + 1;
  // composed[i](x) = fbar_i(xi(x)); recover the xbar-derivatives of fbar_i by
  // matching Taylor coefficients of g against powers of w = xi - xi(x0).
  std::vector<double> xs = map.xi.evaluate_jet(at, x, max_order);
  std::vector<double> w(len, 0.0);
  double factorial = 1.0;
  for (std::size_t k = 1; k < len; ++k) {
    factorial *= double(k);
    w[k] = xs[k] / factorial;
  }
  if (len > 1 && std::abs(w[1]) < 1e-12)
    fail(Errc::singular_evaluation, "xi' vanishes at the probe point");
  for (int i = 0; i <= 4; ++i) {
    std::vector<double> g =
        composed[static_cast<std::size_t>(i)].evaluate_jet(at, x, max_order);
    factorial = 1.0;
    for (std::size_t k = 1; k < len; ++k) {
      factorial *= double(k);
      g[k] /= factorial;  // derivative values -> Taylor coefficients
    }
    // Triangular solve: F_k = leading residual coefficient / w_1^k, then
    // strip F_k * w^k.  fbar^(k) = k! F_k.
    std::vector<double> wpow(len, 0.0);
    wpow[0] = 1.0;
    factorial = 1.0;
    for (std::size_t k = 0; k < len; ++k) {
      if (k > 0) {
        // wpow <- wpow * w, truncated
        std::vector<double> nw(len, 0.0);
        for (std::size_t a = 0; a < len; ++a)
          for (std::size_t b = 0; a + b < len; ++b) nw[a + b] += wpow[a] * w[b];
        wpow = std::move(nw);
        factorial *= double(k);
      }
      double Fk = g[k] / (k == 0 ? 1.0 : wpow[k]);
      for (std::size_t j = k; j < len; ++j) g[j] -= Fk * wpow[j];
      env[Atom::coeff(i, static_cast<int>(k))] = Fk * factorial;
    }
  }
  return env;
}

double apply_operator(const OperatorSpec& op, const Expr& u_of_x, double x0) {
  if (op.is_generic())
    fail(Errc::missing_binding, "cannot apply the generic operator");
  Atom x = Atom::chart(ChartVar::x);
  std::map<Atom, double> at{{x, x0}};
  double acc = 0;
  Expr deriv = u_of_x;
  for (int i = 0; i <= 4; ++i) {
    acc += op.f[static_cast<std::size_t>(i)].evaluate(at) * deriv.evaluate(at);
    deriv = deriv.derivative(x);
  }
  return acc;
}

Expr invariant_expr(const OperatorSpec& op, Mode mode) {
  Expr top = op.f[4] * chart_expr(ChartVar::s) +
             op.f[3] * chart_expr(ChartVar::r) +
             op.f[2] * chart_expr(ChartVar::q) +
             op.f[1] * chart_expr(ChartVar::p);
  if (mode == Mode::direct) {
    return top + op.f[0] * chart_expr(ChartVar::u);
  }
  return top / chart_expr(ChartVar::u) + op.f[0];
}

double invariant_I(const OperatorSpec& op, const JetPoint& jp, Mode mode) {
  return invariant_expr(op, mode).evaluate(jp.env());
}

Rational invariant_I_exact(const OperatorSpec& op,
                           const std::array<Rational, 6>& jet, Mode mode) {
  std::map<Atom, Rational> env;
  for (int v = 0; v < kChartCount; ++v) {
    env.emplace(Atom::chart(static_cast<ChartVar>(v)),
                jet[static_cast<std::size_t>(v)]);
  }
  return invariant_expr(op, mode).evaluate_exact(env);
}

}  // namespace cartan
