#pragma once

#include "cartan/expr.hpp"

#include <memory>

namespace cartan {

// Unreduced arithmetic tree over atoms and rationals.  The parser and the
// random-expression generator build these; canonicalize() folds them into
// canonical Exprs.
struct ExprTree {
  enum class Node { number, symbol, add, sub, mul, div, neg, pow };

  Node node = Node::number;
  Rational value;            // number
  std::optional<Atom> atom;  // symbol
  std::shared_ptr<const ExprTree> lhs, rhs;

  static std::shared_ptr<const ExprTree> number(Rational v);
  static std::shared_ptr<const ExprTree> symbol(Atom a);
  static std::shared_ptr<const ExprTree> make(Node n,
                                              std::shared_ptr<const ExprTree> l,
                                              std::shared_ptr<const ExprTree> r);
};

using TreePtr = std::shared_ptr<const ExprTree>;

// Folds a tree into canonical form.  Exponents (pow right children) must
// canonicalize to rational constants.
Expr canonicalize(const ExprTree& tree);

// Rebuilds a tree that spells out the canonical form literally; used to state
// idempotence as canonicalize(tree_of(canonicalize(t))) == canonicalize(t).
TreePtr tree_of(const Expr& e);

}  // namespace cartan
