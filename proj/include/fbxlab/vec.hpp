#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace fbx {

// Small dense vector for points and directions, dim <= 8.
struct Vec {
  int dim = 0;
  std::array<double, 8> a{};

  Vec() = default;
  explicit Vec(int d) : dim(d) { a.fill(0.0); }
  Vec(std::initializer_list<double> xs) {
    dim = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) a[i++] = x;
  }

  double& operator[](int i) { return a[i]; }
  double operator[](int i) const { return a[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < dim; ++i) a[i] += o.a[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < dim; ++i) a[i] -= o.a[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < dim; ++i) a[i] *= s;
    return *this;
  }

  friend Vec operator+(Vec x, const Vec& y) { return x += y; }
  friend Vec operator-(Vec x, const Vec& y) { return x -= y; }
  friend Vec operator*(double s, Vec x) { return x *= s; }
  friend Vec operator*(Vec x, double s) { return x *= s; }

  double dot(const Vec& o) const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s += a[i] * o.a[i];
    return s;
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  double norm_inf() const {
    double s = 0;
    for (int i = 0; i < dim; ++i) s = std::max(s, std::fabs(a[i]));
    return s;
  }

  static Vec axis(int d, int k) {
    Vec v(d);
    v[k] = 1.0;
    return v;
  }
  static Vec zero(int d) { return Vec(d); }

  Vec normalized() const {
    double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
    Vec v = *this;
    v *= 1.0 / n;
    return v;
  }
};

inline Vec unit(const Vec& v) { return v.normalized(); }

// Deterministic RNG used by all sampling-based checks. Default seed is 0x5EED.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x5EED) : eng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  Vec point_in_ball(int d, double radius = 1.0) {
    while (true) {
      Vec x(d);
      for (int i = 0; i < d; ++i) x[i] = uniform();
      if (x.norm2() <= 1.0) return x * radius;
    }
  }
  Vec point_in_annulus(int d, double r_in, double r_out, const Vec& center) {
    while (true) {
      Vec x = point_in_ball(d, r_out);
      double r = x.norm();
      if (r >= r_in && r <= r_out) return center + x;
    }
  }
  Vec unit_vector(int d) {
    while (true) {
      Vec x = point_in_ball(d);
      if (x.norm() > 1e-3) return x.normalized();
    }
  }
  Vec vector(int d, double amp = 1.0) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = amp * uniform();
    return x;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

constexpr std::uint64_t kDefaultSeed = 0x5EED;

}  // namespace fbx
