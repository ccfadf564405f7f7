#pragma once

#include <vector>

#include "fbxlab/sym_matrix.hpp"
#include "fbxlab/vec.hpp"

namespace fbx {

// Least-squares slope of log(y) vs log(x). Entries with y below the floor are
// dropped; if fewer than two remain, `floored` is set and the slope is +inf.
struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
  bool floored = false;
  int used = 0;
};
ExponentFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y,
                         double floor = 1e-13);

// Dense symmetric-positive solve (Gaussian elimination with partial pivoting),
// for the small normal systems of the quadratic fits.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b);

// Least-squares fit of a + b.x + 1/2 x.C x over the given points.
struct QuadFit {
  double value0 = 0.0;
  Vec grad0;
  SymMatrix hess0;
};
QuadFit fit_quadratic(const std::vector<Vec>& points, const std::vector<double>& values);

}  // namespace fbx
