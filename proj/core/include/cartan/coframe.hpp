#pragma once

#include "cartan/form.hpp"

namespace cartan {

using Matrix6 = std::array<std::array<Expr, 6>, 6>;

Expr matrix_det(const Matrix6& m);

// Exact Gauss-Jordan; Errc::degenerate_coframe when no nonzero pivot exists.
Matrix6 invert_matrix(const Matrix6& m);

// Row i = components of theta[i] over the chart covectors dx..ds.  A lifted
// coframe never carries parameter differentials; finding any is an error.
Matrix6 coframe_matrix(const std::array<Form, 6>& theta);

// omega = sum_{j<k} torsion[{j,k}] theta^j ^ theta^k
//       + sum       mixed[{alpha,j}] da_alpha ^ theta^j
// with j,k 0-based rows of theta and alpha the 1-based parameter index.
struct CoframeResolution {
  std::map<std::pair<int, int>, Expr> torsion;
  std::map<std::pair<int, int>, Expr> mixed;

  Expr torsion_at(int j, int k) const;  // zero when absent, j < k
  Expr mixed_at(int alpha, int j) const;
};

// inv is the inverse of coframe_matrix(theta), passed in so a whole structure
// equation sweep shares one inversion.
CoframeResolution resolve_in_coframe(const Form& omega, const Matrix6& inv);

CoframeResolution to_coframe_basis(const Form& omega,
                                   const std::array<Form, 6>& theta);

}  // namespace cartan
