#pragma once

#include "cartan/atom.hpp"
#include "cartan/errors.hpp"
#include "cartan/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cartan {

// Exponents are stored in quarter units: quarters == 6 means ^(3/2).  This is
// exactly the radical fragment the equivalence computations live in; any finer
// root is rejected with Errc::unsupported_radical.
struct AtomPower {
  Atom atom;
  int quarters;
  friend bool operator==(const AtomPower&, const AtomPower&) = default;
};

// Read-only view of one canonical term: coeff * prod(atom^quarters/4).
struct TermView {
  Rational coeff;
  std::vector<AtomPower> powers;
};

// Sums with more terms than this abort with a diagnostic instead of grinding.
inline constexpr size_t kMaxTerms = 20000;

// Immutable canonical expression: a quotient of two canonical sums of terms.
// Single-term denominators are folded into the numerator as negative
// exponents, so the stored denominator is either the constant 1 or a
// multi-term sum with rational content removed and a positive leading
// coefficient.  All operations return new values; construction canonicalizes.
class Expr {
 public:
  Expr();  // zero

  static Expr zero();
  static Expr one();
  static Expr constant(const Rational& r);
  static Expr from_int(long n);
  static Expr atom(Atom a);
  static Expr atom_power(Atom a, int quarters);

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);  // throws zero_divisor
  Expr operator-() const;
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr& operator/=(const Expr& o) { return *this = *this / o; }

  // Exponent denominator must divide 4; fractional exponents require a
  // single-term base (positive branch).
  Expr pow(const Rational& exponent) const;

  bool is_zero() const;
  bool is_one() const;
  bool is_rational() const;
  std::optional<Rational> as_rational() const;

  // Differentiation by a chart variable or group parameter.  d/dx also bumps
  // coefficient-function atoms: d(f3')/dx = f3''.
  Expr derivative(Atom v) const;

  // Simultaneous substitution; binding values must be free of the bound
  // atoms (Errc::cyclic_binding otherwise).
  Expr substituted(const std::map<Atom, Expr>& bindings) const;

  double evaluate(const std::map<Atom, double>& env) const;
  // Exact evaluation; radicals must come out rational.
  Rational evaluate_exact(const std::map<Atom, Rational>& env) const;

  // Value and derivatives with respect to `var` up to `order`, computed by
  // truncated Taylor arithmetic at the point.  Returns {f, f', ..., f^(order)};
  // no truncation error, only double roundoff.  Same singularity rules as
  // evaluate().
  std::vector<double> evaluate_jet(const std::map<Atom, double>& env, Atom var,
                                   int order) const;

  std::set<Atom> atoms() const;
  bool contains(Atom a) const;

  Expr numerator() const;    // numerator over 1
  Expr denominator() const;  // denominator over 1
  bool has_unit_denominator() const;

  size_t term_count() const;  // numerator terms
  std::vector<TermView> numerator_terms() const;
  std::vector<TermView> denominator_terms() const;

  // Structural (canonical-form) equality.
  friend bool operator==(const Expr&, const Expr&);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  struct Impl;

 private:
  explicit Expr(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
  friend struct ExprAccess;
};

Expr pow(const Expr& base, const Rational& exponent);

// Three-tier equality decision: identical canonical forms, then a canonical
// cross-multiplied difference, then seeded random numeric probing (50 points
// in [0.5, 2], relative tolerance 1e-10).
enum class EqualityVerdict { unequal, syntactic, cross_multiplied, probabilistic };

EqualityVerdict check_equal(const Expr& a, const Expr& b, uint64_t seed = 0);

// True for any verdict other than `unequal`.
bool exprs_equal(const Expr& a, const Expr& b, uint64_t seed = 0);

const char* to_string(EqualityVerdict v);

}  // namespace cartan
