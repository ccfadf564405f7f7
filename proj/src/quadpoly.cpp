#include "fbxlab/quadpoly.hpp"

#include <cmath>

#include "fbxlab/errors.hpp"

namespace fbx {

SymMatrix Rotation::conjugate(const SymMatrix& m) const {
  SymMatrix out(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double s = 0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) s += r[i][a] * m(a, b) * r[j][b];
      out.at(i, j) = s;
    }
  return out;
}

SymMatrix Rotation::conjugate_transpose(const SymMatrix& m) const {
  SymMatrix out(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      double s = 0;
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) s += r[a][i] * m(a, b) * r[b][j];
      out.at(i, j) = s;
    }
  return out;
}

Rotation rotation_to_axis(const Vec& nu) {
  const int d = nu.dim;
  Rotation R;
  R.dim = d;
  const Vec ed = Vec::axis(d, d - 1);
  const double c = nu.dot(ed);
  Vec w = nu - c * ed;  // component of nu orthogonal to e_d
  const double s = w.norm();
  for (int i = 0; i < d; ++i) R.r[i][i] = 1.0;
  if (s < 1e-15) {
    if (c < 0) throw PreconditionError("rotation_to_axis: nu = -e_d is a fold point");
    return R;  // nu == e_d
  }
  w *= 1.0 / s;
  // rotation by the angle between nu and e_d inside span(w, e_d)
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double wi = w[i], wj = w[j];
      const double ei = (i == d - 1) ? 1.0 : 0.0;
      const double ej = (j == d - 1) ? 1.0 : 0.0;
      R.r[i][j] = (i == j ? 1.0 : 0.0) + (c - 1.0) * (wi * wj + ei * ej) +
                  s * (ei * wj - wi * ej);
    }
  return R;
}

}  // namespace fbx
