#include "fbxlab/sym_matrix.hpp"

#include <algorithm>

namespace fbx {

void SymMatrix::eigenvalues(double* out, double (*vectors)[kMaxDim]) const {
  const int n = d_;
  double m[kMaxDim][kMaxDim];
  double q[kMaxDim][kMaxDim];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i][j] = (*this)(i, j);
      q[i][j] = (i == j) ? 1.0 : 0.0;
    }

  const double scale = std::max(norm_inf(), 1.0);
  const double tol = 1e-15 * scale;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0;
    for (int p = 0; p < n - 1; ++p)
      for (int r = p + 1; r < n; ++r) off = std::max(off, std::fabs(m[p][r]));
    if (off <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int r = p + 1; r < n; ++r) {
        if (std::fabs(m[p][r]) <= tol * 1e-2) continue;
        const double theta = (m[r][r] - m[p][p]) / (2.0 * m[p][r]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m[k][p], mkr = m[k][r];
          m[k][p] = c * mkp - s * mkr;
          m[k][r] = s * mkp + c * mkr;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m[p][k], mrk = m[r][k];
          m[p][k] = c * mpk - s * mrk;
          m[r][k] = s * mpk + c * mrk;
          const double qkp = q[k][p], qkr = q[k][r];
          q[k][p] = c * qkp - s * qkr;
          q[k][r] = s * qkp + c * qkr;
        }
      }
    }
  }

  int order[kMaxDim];
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order, order + n, [&](int i, int j) { return m[i][i] < m[j][j]; });
  for (int i = 0; i < n; ++i) out[i] = m[order[i]][order[i]];
  if (vectors) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) vectors[i][j] = q[i][order[j]];
  }
}

}  // namespace fbx
