#pragma once

#include <array>
#include <cmath>

#include "fbxlab/errors.hpp"
#include "fbxlab/vec.hpp"

namespace fbx {

// Dense symmetric d x d matrix, d <= 8. Only the upper triangle is stored
// (row-major), so symmetry holds by construction.
class SymMatrix {
 public:
  static constexpr int kMaxDim = 8;

  SymMatrix() = default;
  explicit SymMatrix(int d) : d_(d) {
    if (d < 1 || d > kMaxDim) throw InvalidInput("SymMatrix: dim out of range");
    a_.fill(0.0);
  }

  static SymMatrix zero(int d) { return SymMatrix(d); }
  static SymMatrix identity(int d) {
    SymMatrix m(d);
    for (int i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }
  static SymMatrix diag(const Vec& v) {
    SymMatrix m(v.dim);
    for (int i = 0; i < v.dim; ++i) m.at(i, i) = v[i];
    return m;
  }
  // v (x) v
  static SymMatrix outer(const Vec& v) {
    SymMatrix m(v.dim);
    for (int i = 0; i < v.dim; ++i)
      for (int j = i; j < v.dim; ++j) m.at(i, j) = v[i] * v[j];
    return m;
  }
  // a (x) b + b (x) a
  static SymMatrix sym_outer(const Vec& a, const Vec& b) {
    SymMatrix m(a.dim);
    for (int i = 0; i < a.dim; ++i)
      for (int j = i; j < a.dim; ++j) m.at(i, j) = a[i] * b[j] + b[i] * a[j];
    return m;
  }

  int dim() const { return d_; }
  int packed_size() const { return d_ * (d_ + 1) / 2; }

  double& at(int i, int j) { return a_[index(i, j)]; }
  double operator()(int i, int j) const { return a_[index(i, j)]; }

  SymMatrix& operator+=(const SymMatrix& o) {
    for (int k = 0; k < packed_size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    for (int k = 0; k < packed_size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  SymMatrix& operator*=(double s) {
    for (int k = 0; k < packed_size(); ++k) a_[k] *= s;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix x, const SymMatrix& y) { return x += y; }
  friend SymMatrix operator-(SymMatrix x, const SymMatrix& y) { return x -= y; }
  friend SymMatrix operator*(double s, SymMatrix x) { return x *= s; }
  friend SymMatrix operator*(SymMatrix x, double s) { return x *= s; }

  Vec apply(const Vec& x) const {
    Vec y(d_);
    for (int i = 0; i < d_; ++i) {
      double s = 0;
      for (int j = 0; j < d_; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
  // x . M x
  double quad(const Vec& x) const { return x.dot(apply(x)); }

  double trace() const {
    double s = 0;
    for (int i = 0; i < d_; ++i) s += (*this)(i, i);
    return s;
  }
  double norm_inf() const {
    double s = 0;
    for (int k = 0; k < packed_size(); ++k) s = std::max(s, std::fabs(a_[k]));
    return s;
  }
  bool finite() const {
    for (int k = 0; k < packed_size(); ++k)
      if (!std::isfinite(a_[k])) return false;
    return true;
  }

  // Eigenvalues by cyclic Jacobi rotations, sorted ascending. If vectors is
  // non-null it receives the orthonormal eigenvectors as columns.
  void eigenvalues(double* out, double (*vectors)[kMaxDim] = nullptr) const;

  // Spectral radius (max |eigenvalue|).
  double spectral_radius() const {
    double ev[kMaxDim];
    eigenvalues(ev);
    return std::max(std::fabs(ev[0]), std::fabs(ev[d_ - 1]));
  }

 private:
  int index(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * d_ - i * (i - 1) / 2 + (j - i);
  }

  int d_ = 0;
  std::array<double, kMaxDim*(kMaxDim + 1) / 2> a_{};
};

}  // namespace fbx
