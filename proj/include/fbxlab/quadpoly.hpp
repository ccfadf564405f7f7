#pragma once

#include "fbxlab/sym_matrix.hpp"
#include "fbxlab/vec.hpp"

namespace fbx {

// p(x) = 1/2 M x.x with M symmetric; no affine part (the linear term of the
// free boundary model lives in the half-plane factor g(0,nu)(x.nu)).
struct QuadPoly {
  SymMatrix M;

  QuadPoly() = default;
  explicit QuadPoly(int d) : M(SymMatrix::zero(d)) {}
  explicit QuadPoly(const SymMatrix& m) : M(m) {}

  int dim() const { return M.dim(); }
  double operator()(const Vec& x) const { return 0.5 * M.quad(x); }
  Vec grad(const Vec& x) const { return M.apply(x); }
  const SymMatrix& hessian() const { return M; }

  // sup over the closed unit ball of |p| = spectral radius / 2
  double sup_norm_b1() const { return 0.5 * M.spectral_radius(); }

  friend QuadPoly operator+(const QuadPoly& a, const QuadPoly& b) {
    return QuadPoly(a.M + b.M);
  }
  friend QuadPoly operator-(const QuadPoly& a, const QuadPoly& b) {
    return QuadPoly(a.M - b.M);
  }
  friend QuadPoly operator*(double s, const QuadPoly& p) { return QuadPoly(s * p.M); }
};

// Rotation R with R nu = e_d (identity when nu == e_d), as a dense matrix.
struct Rotation {
  int dim = 0;
  double r[8][8] = {};

  Vec apply(const Vec& x) const {
    Vec y(dim);
    for (int i = 0; i < dim; ++i) {
      double s = 0;
      for (int j = 0; j < dim; ++j) s += r[i][j] * x[j];
      y[i] = s;
    }
    return y;
  }
  Vec apply_transpose(const Vec& x) const {
    Vec y(dim);
    for (int i = 0; i < dim; ++i) {
      double s = 0;
      for (int j = 0; j < dim; ++j) s += r[j][i] * x[j];
      y[i] = s;
    }
    return y;
  }
  // R M R^T
  SymMatrix conjugate(const SymMatrix& m) const;
  // R^T M R
  SymMatrix conjugate_transpose(const SymMatrix& m) const;
};

Rotation rotation_to_axis(const Vec& nu);  // R nu = e_d

}  // namespace fbx
