#include "fbxlab/fitting.hpp"

#include <cmath>
#include <limits>

#include "fbxlab/errors.hpp"

namespace fbx {

ExponentFit fit_exponent(const std::vector<double>& x, const std::vector<double>& y,
                         double floor) {
  ExponentFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > floor) || !(x[i] > 0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  fit.used = n;
  if (n < 2) {
    fit.floored = true;
    fit.exponent = std::numeric_limits<double>::infinity();
    return fit;
  }
  const double det = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / det;
  fit.intercept = (sy * sxx - sx * sxy) / det;
  return fit;
}

std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-14)
      throw ResolutionError("solve_dense: singular normal system");
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= m * a[col][c];
      b[r] -= m * b[col];
    }
  }
  std::vector<double> x(n);
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

QuadFit fit_quadratic(const std::vector<Vec>& points, const std::vector<double>& values) {
  if (points.empty()) throw ResolutionError("fit_quadratic: no points");
  const int d = points[0].dim;
  const int nb = 1 + d + d * (d + 1) / 2;
  if (static_cast<int>(points.size()) < nb)
    throw ResolutionError("fit_quadratic: under-determined fit");
  std::vector<double> basis(nb);
  std::vector<std::vector<double>> ata(nb, std::vector<double>(nb, 0.0));
  std::vector<double> atb(nb, 0.0);
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vec& x = points[p];
    int k = 0;
    basis[k++] = 1.0;
    for (int i = 0; i < d; ++i) basis[k++] = x[i];
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) basis[k++] = (i == j) ? 0.5 * x[i] * x[j] : x[i] * x[j];
    for (int i = 0; i < nb; ++i) {
      atb[i] += basis[i] * values[p];
      for (int j = i; j < nb; ++j) ata[i][j] += basis[i] * basis[j];
    }
  }
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < i; ++j) ata[i][j] = ata[j][i];
  const std::vector<double> c = solve_dense(std::move(ata), std::move(atb));
  QuadFit fit;
  fit.value0 = c[0];
  fit.grad0 = Vec(d);
  for (int i = 0; i < d; ++i) fit.grad0[i] = c[1 + i];
  fit.hess0 = SymMatrix::zero(d);
  int k = 1 + d;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) fit.hess0.at(i, j) = c[k++];
  return fit;
}

}  // namespace fbx
