#include "cartan/coframe.hpp"

namespace cartan {

Expr matrix_det(const Matrix6& m) {
  Matrix6 a = m;
  Expr det = Expr::one();
  for (int col = 0; col < 6; ++col) {
    int pivot = -1;
    for (int r = col; r < 6; ++r) {
      if (!a[r][col].is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return Expr::zero();
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      det = Expr::zero() - det;
    }
    det = det * a[col][col];
    for (int r = col + 1; r < 6; ++r) {
      if (a[r][col].is_zero()) continue;
      Expr factor = a[r][col] / a[col][col];
      for (int c = col; c < 6; ++c) {
        a[r][c] = a[r][c] - factor * a[col][c];
      }
    }
  }
  return det;
}

Matrix6 invert_matrix(const Matrix6& m) {
  Matrix6 a = m;
  Matrix6 inv;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) inv[i][j] = i == j ? Expr::one() : Expr::zero();
  }
  for (int col = 0; col < 6; ++col) {
    int pivot = -1;
    for (int r = col; r < 6; ++r) {
      if (!a[r][col].is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0)
      fail(Errc::degenerate_coframe,
           "coframe matrix is singular at column " + std::to_string(col));
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      std::swap(inv[pivot], inv[col]);
    }
    Expr p = a[col][col];
    for (int c = 0; c < 6; ++c) {
      a[col][c] = a[col][c] / p;
      inv[col][c] = inv[col][c] / p;
    }
    for (int r = 0; r < 6; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Expr factor = a[r][col];
      for (int c = 0; c < 6; ++c) {
        a[r][c] = a[r][c] - factor * a[col][c];
        inv[r][c] = inv[r][c] - factor * inv[col][c];
      }
    }
  }
  return inv;
}

Matrix6 coframe_matrix(const std::array<Form, 6>& theta) {
  Matrix6 m;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) m[i][j] = Expr::zero();
    for (const auto& [idx, c] : theta[static_cast<std::size_t>(i)].terms1()) {
      if (idx >= kChartCount)
        fail(Errc::invalid_input,
             "coframe row " + std::to_string(i + 1) +
                 " carries a parameter differential");
      m[i][idx] = c;
    }
  }
  return m;
}

Expr CoframeResolution::torsion_at(int j, int k) const {
  auto it = torsion.find({j, k});
  return it == torsion.end() ? Expr::zero() : it->second;
}

Expr CoframeResolution::mixed_at(int alpha, int j) const {
  auto it = mixed.find({alpha, j});
  return it == mixed.end() ? Expr::zero() : it->second;
}

CoframeResolution resolve_in_coframe(const Form& omega, const Matrix6& inv) {
  if (omega.degree() != 2)
    fail(Errc::invalid_input, "coframe resolution expects a 2-form");
  CoframeResolution out;
  auto add = [](std::map<std::pair<int, int>, Expr>& dst,
                std::pair<int, int> key, const Expr& value) {
    if (value.is_zero()) return;
    auto it = dst.find(key);
    if (it == dst.end()) {
      dst.emplace(key, value);
    } else {
      it->second = it->second + value;
      if (it->second.is_zero()) dst.erase(it);
    }
  };
  for (const auto& [jk, c] : omega.terms2()) {
    auto [j, k] = jk;
    if (k < kChartCount) {
      // chart ^ chart: push both slots through the inverse.
      for (int a = 0; a < 6; ++a) {
        for (int b = a + 1; b < 6; ++b) {
          Expr t = c * (inv[j][a] * inv[k][b] - inv[j][b] * inv[k][a]);
          add(out.torsion, {a, b}, t);
        }
      }
    } else if (j < kChartCount) {
      // stored as dv_j ^ da_alpha == -da_alpha ^ dv_j
      int alpha = k - kChartCount + 1;
      for (int b = 0; b < 6; ++b) {
        add(out.mixed, {alpha, b}, Expr::zero() - c * inv[j][b]);
      }
    } else {
      fail(Errc::invalid_input,
           "2-form has a da^da component; not resolvable in a coframe");
    }
  }
  return out;
}

CoframeResolution to_coframe_basis(const Form& omega,
                                   const std::array<Form, 6>& theta) {
  return resolve_in_coframe(omega, invert_matrix(coframe_matrix(theta)));
}

}  // namespace cartan
