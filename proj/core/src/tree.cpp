#include "cartan/tree.hpp"

namespace cartan {

TreePtr ExprTree::number(Rational v) {
  auto t = std::make_shared<ExprTree>();
  t->node = Node::number;
  t->value = std::move(v);
  return t;
}

TreePtr ExprTree::symbol(Atom a) {
  auto t = std::make_shared<ExprTree>();
  t->node = Node::symbol;
  t->atom = a;
  return t;
}

TreePtr ExprTree::make(Node n, TreePtr l, TreePtr r) {
  auto t = std::make_shared<ExprTree>();
  t->node = n;
  t->lhs = std::move(l);
  t->rhs = std::move(r);
  return t;
}

Expr canonicalize(const ExprTree& tree) {
  switch (tree.node) {
    case ExprTree::Node::number:
      return Expr::constant(tree.value);
    case ExprTree::Node::symbol:
      return Expr::atom(*tree.atom);
    case ExprTree::Node::add:
      return canonicalize(*tree.lhs) + canonicalize(*tree.rhs);
    case ExprTree::Node::sub:
      return canonicalize(*tree.lhs) - canonicalize(*tree.rhs);
    case ExprTree::Node::mul:
      return canonicalize(*tree.lhs) * canonicalize(*tree.rhs);
    case ExprTree::Node::div:
      return canonicalize(*tree.lhs) / canonicalize(*tree.rhs);
    case ExprTree::Node::neg:
      return -canonicalize(*tree.lhs);
    case ExprTree::Node::pow: {
      Expr e = canonicalize(*tree.rhs);
      auto r = e.as_rational();
      if (!r)
        fail(Errc::unsupported_radical, "exponent does not reduce to a rational");
      return canonicalize(*tree.lhs).pow(*r);
    }
  }
  fail(Errc::invalid_input, "malformed expression tree");
}

namespace {

TreePtr tree_of_terms(const std::vector<TermView>& terms) {
  if (terms.empty()) return ExprTree::number(Rational(0));
  TreePtr acc;
  for (const auto& t : terms) {
    TreePtr prod = ExprTree::number(t.coeff);
    for (const auto& f : t.powers) {
      TreePtr factor = ExprTree::symbol(f.atom);
      if (f.quarters != 4)
        factor = ExprTree::make(ExprTree::Node::pow, factor,
                                ExprTree::number(Rational(f.quarters, 4)));
      prod = ExprTree::make(ExprTree::Node::mul, std::move(prod), factor);
    }
    acc = acc ? ExprTree::make(ExprTree::Node::add, std::move(acc), std::move(prod))
              : std::move(prod);
  }
  return acc;
}

}  // namespace

TreePtr tree_of(const Expr& e) {
  TreePtr num = tree_of_terms(e.numerator_terms());
  if (e.has_unit_denominator()) return num;
  return ExprTree::make(ExprTree::Node::div, std::move(num),
                        tree_of_terms(e.denominator_terms()));
}

}  // namespace cartan
