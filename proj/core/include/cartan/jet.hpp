#pragma once

#include "cartan/expr.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace cartan {

// The two equivalence problems: direct identifies D[u] with D~[u~], gauge
// identifies D~[u~] with phi * D[u] under (x,u) -> (xi(x), phi(x) u).
enum class Mode { direct, gauge };

const char* to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

struct Interval {
  double lo = 1.0;
  double hi = 2.0;
};

// Numeric point of the fourth jet space: (x, u, p, q, r, s) with p = u', etc.
struct JetPoint {
  double x = 0, u = 1, p = 0, q = 0, r = 0, s = 0;
  std::map<Atom, double> env() const;
};

// Linear operator sum f_i(x) D^i of order four.  Coefficients are Exprs in x;
// the generic operator carries the free coefficient atoms f0..f4 instead and
// stands for an arbitrary member of the class.
struct OperatorSpec {
  std::array<Expr, 5> f{};
  std::string name;

  static OperatorSpec generic();
  bool is_generic() const;

  // Bindings for f_i^(k) atoms at x0, derivatives up to max_order.
  std::map<Atom, double> coefficient_env(double x0, int max_order) const;

  // 101-point grid check: coefficients evaluable and f4 > 0 throughout.
  void validate_on(const Interval& iv) const;
};

// Fiber-preserving transformation xbar = xi(x), ubar = phi(x) u.
struct Transformation {
  Expr xi, phi;
  std::string name;

  static Transformation identity();

  // Grid check: |xi'| and |phi| bounded away from zero on the interval.
  void validate_on(const Interval& iv) const;

  // Cached symbolic 4-jet of the transformation: {xbar, ubar, pbar, qbar,
  // rbar, sbar} as Exprs in (x, u, p, q, r, s), built from the chain rule
  // Dbar = (1/xi') D.
  const std::array<Expr, 6>& jet_formulas() const;

 private:
  mutable std::shared_ptr<const std::array<Expr, 6>> jets_;
};

// Total derivative along the contact structure: d/dx + p d/du + q d/dp +
// r d/dq + s d/dr.  Coefficient atoms ride along via d(f_i^(k))/dx.
Expr total_derivative(const Expr& e);

// Highest derivative order among the f-atoms of e; bounds the coefficient
// environment needed to evaluate e numerically.
int coefficient_order(const Expr& e);

// Numeric prolongation of jp under T.  Errc::singular_evaluation when xi'
// degenerates at the point.
JetPoint prolong(const Transformation& t, const JetPoint& jp);

// Result of moving an operator across a transformation.  `composed` holds
// fbar_i(xi(x)) as Exprs in the source variable; when xi is affine the
// coefficients are also available directly in the target chart.
struct TransformedOperator {
  std::array<Expr, 5> composed{};
  Transformation map;
  Mode mode = Mode::direct;
  std::optional<OperatorSpec> target_chart;

  // Bindings for the f-atoms of the *target* operator at xbar = xi(x0),
  // derivatives taken with d/dxbar = (1/xi') d/dx.
  std::map<Atom, double> coefficient_env(double x0_source, int max_order) const;
};

TransformedOperator transform_operator(const OperatorSpec& op,
                                       const Transformation& t, Mode mode);

// Evaluates sum f_i(x0) u^(i)(x0) for a concrete operator and polynomial u.
double apply_operator(const OperatorSpec& op, const Expr& u_of_x, double x0);

// The scalar invariant I as a 0-form on the jet space:
//   direct: f4 s + f3 r + f2 q + f1 p + f0 u
//   gauge:  (f4 s + f3 r + f2 q + f1 p)/u + f0
Expr invariant_expr(const OperatorSpec& op, Mode mode);

double invariant_I(const OperatorSpec& op, const JetPoint& jp, Mode mode);

// Exact variant for rational data; jet = (x,u,p,q,r,s).
Rational invariant_I_exact(const OperatorSpec& op,
                           const std::array<Rational, 6>& jet, Mode mode);

}  // namespace cartan
