#pragma once

#include "cartan/expr.hpp"
#include "cartan/rng.hpp"

#include <vector>

namespace cartan::testsupport {

// Draws from the full atom alphabet: chart variables, group parameters,
// coefficient atoms up to second derivative.
inline Atom random_atom(Rng& rng) {
  int k = static_cast<int>(rng.integer(0, 20));
  if (k < 6) return Atom::chart(static_cast<ChartVar>(k));
  if (k < 16) return Atom::param(k - 5);
  return Atom::coeff(k - 16, static_cast<int>(rng.integer(0, 2)));
}

inline Rational random_coeff(Rng& rng) {
  long num = static_cast<long>(rng.integer(1, 9));
  if (rng.integer(0, 1) == 1) num = -num;
  long den = static_cast<long>(rng.integer(1, 9));
  return Rational(num, den);
}

// Nonzero quarter-exponent in [-8, 8].
inline int random_quarters(Rng& rng) {
  int q = static_cast<int>(rng.integer(1, 8));
  return rng.integer(0, 1) == 1 ? -q : q;
}

inline Expr random_term(Rng& rng) {
  Expr t = Expr::constant(random_coeff(rng));
  int n_atoms = static_cast<int>(rng.integer(1, 3));
  for (int i = 0; i < n_atoms; ++i) {
    t = t * Expr::atom_power(random_atom(rng), random_quarters(rng));
  }
  return t;
}

inline Expr random_sum(Rng& rng, int max_terms) {
  int n = static_cast<int>(rng.integer(1, max_terms));
  Expr s = Expr::zero();
  for (int i = 0; i < n; ++i) s = s + random_term(rng);
  return s;
}

// Random canonical expression; about half are genuine quotients.
inline Expr random_expr(Rng& rng) {
  Expr num = random_sum(rng, 4);
  if (rng.integer(0, 1) == 0) return num;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Expr den = random_sum(rng, 3);
    if (!den.is_zero()) return num / den;
  }
  return num;
}

// Sum with at most single-term denominators, which fold into negative
// exponents.  Differentiation and products then stay term-counted instead of
// squaring multi-term denominators; use this for form coefficients.
inline Expr random_simple_expr(Rng& rng) {
  Expr num = random_sum(rng, 3);
  if (rng.integer(0, 1) == 0) return num;
  return num / random_term(rng);
}

// Integer exponents only, so any substitution target stays in the fragment.
inline Expr random_int_expr(Rng& rng) {
  int n = static_cast<int>(rng.integer(1, 3));
  Expr s = Expr::zero();
  for (int t = 0; t < n; ++t) {
    Expr term = Expr::constant(random_coeff(rng));
    int n_atoms = static_cast<int>(rng.integer(1, 3));
    for (int i = 0; i < n_atoms; ++i) {
      int e = static_cast<int>(rng.integer(1, 2));
      if (rng.integer(0, 1) == 1) e = -e;
      term = term * Expr::atom_power(random_atom(rng), 4 * e);
    }
    s = s + term;
  }
  return s;
}

}  // namespace cartan::testsupport
