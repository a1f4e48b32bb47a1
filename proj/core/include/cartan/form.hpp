#pragma once

#include "cartan/expr.hpp"

#include <array>
#include <map>
#include <utility>

namespace cartan {

// Components in the covector basis dx,du,dp,dq,dr,ds,da1..da10.
using TangentVector = std::array<double, kCovectorCount>;

// Differential form of degree 0..3 over the 16-dimensional parameter-extended
// jet space.  Coefficients are canonical Exprs; index tuples are kept sorted
// strictly ascending and structurally-zero coefficients are dropped, so
// is_zero() is a complete decision within the expression fragment.
class Form {
 public:
  Form() = default;  // zero 0-form

  static Form zero(int degree);
  static Form scalar(const Expr& e);
  static Form covector(int index);
  static Form d_atom(Atom a);

  int degree() const { return degree_; }
  bool is_zero() const;

  const Expr& scalar_part() const;
  Expr coeff1(int i) const;
  // Signed lookups: indices in any order, zero on repeats.
  Expr coeff2(int i, int j) const;
  Expr coeff3(int i, int j, int k) const;

  const std::map<int, Expr>& terms1() const { return c1_; }
  const std::map<std::pair<int, int>, Expr>& terms2() const { return c2_; }
  const std::map<std::array<int, 3>, Expr>& terms3() const { return c3_; }

  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator-() const;
  Form& operator+=(const Form& o) { return *this = *this + o; }
  Form& operator-=(const Form& o) { return *this = *this - o; }

  friend Form operator*(const Expr& s, const Form& f);

  // Numeric pairing with tangent vectors; env must bind every atom in the
  // touched coefficients.
  double evaluate(const std::map<Atom, double>& env) const;
  double evaluate(const std::map<Atom, double>& env,
                  const TangentVector& X) const;
  double evaluate(const std::map<Atom, double>& env, const TangentVector& X,
                  const TangentVector& Y) const;

 private:
  void set1(int i, const Expr& c);
  void add2(int i, int j, const Expr& c);
  void add3(int i, int j, int k, const Expr& c);
  void prune();

  friend Form wedge(const Form& a, const Form& b);
  friend Form d(const Form& f);
  friend Form substitute_in_form(const Form& f,
                                 const std::map<Atom, Expr>& bindings);

  int degree_ = 0;
  Expr c0_;  // zero by default
  std::map<int, Expr> c1_;
  std::map<std::pair<int, int>, Expr> c2_;
  std::map<std::array<int, 3>, Expr> c3_;
};

// Graded product; results above degree 3 raise Errc::degree_overflow.
Form wedge(const Form& a, const Form& b);

// Exterior derivative.  Coefficient atoms are functions of the base variable,
// so their differentials feed the dx slot: d(f4) = f4' dx.
Form d(const Form& f);

// Pullback along atom bindings: coefficients are substituted and each bound
// atom's covector is replaced by the exterior derivative of its binding.
Form substitute_in_form(const Form& f, const std::map<Atom, Expr>& bindings);

}  // namespace cartan
