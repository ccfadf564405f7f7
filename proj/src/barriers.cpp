#include "fbxlab/barriers.hpp"

#include <cmath>

#include "fbxlab/errors.hpp"

namespace fbx {

double BarrierSpec::value(const Vec& x) const {
  const Vec y = x - center;
  const double r = y.norm();
  switch (kind) {
    case BarrierKind::radial_sub: {
      if (r <= rho / 2) return delta;
      if (r >= rho) return 0.0;
      const double s = (r * r) / (rho * rho);
      return delta * coeff * (std::exp(-gamma * s) - std::exp(-gamma));
    }
    case BarrierKind::radial_super: {
      if (r <= rho / 2) return 0.0;
      if (r >= rho) return delta;
      const double s = (r * r) / (rho * rho);
      return delta * (1.0 - coeff * (std::exp(-gamma * s) - std::exp(-gamma)));
    }
    case BarrierKind::power: {
      if (r <= 1.0 / 20.0) return 1.0;
      if (r >= rho) return 0.0;
      return coeff * (std::pow(r, -gamma) - std::pow(rho, -gamma));
    }
    case BarrierKind::exponential:
      return c1 - c2 * std::exp(gamma * x[dim - 1]);
  }
  return 0.0;
}

Vec BarrierSpec::gradient(const Vec& x) const {
  const Vec y = x - center;
  const double r = y.norm();
  switch (kind) {
    case BarrierKind::radial_sub:
    case BarrierKind::radial_super: {
      Vec g = Vec::zero(dim);
      if (r > rho / 2 && r < rho) {
        const double s = (r * r) / (rho * rho);
        const double c = -2.0 * delta * coeff * gamma / (rho * rho) * std::exp(-gamma * s);
        g = c * y;
        if (kind == BarrierKind::radial_super) g *= -1.0;
      }
      return g;
    }
    case BarrierKind::power: {
      Vec g = Vec::zero(dim);
      if (r > 1.0 / 20.0 && r < rho)
        g = (-coeff * gamma * std::pow(r, -gamma - 2.0)) * y;
      return g;
    }
    case BarrierKind::exponential: {
      Vec g = Vec::zero(dim);
      g[dim - 1] = -c2 * gamma * std::exp(gamma * x[dim - 1]);
      return g;
    }
  }
  return Vec::zero(dim);
}

SymMatrix BarrierSpec::hessian(const Vec& x) const {
  const Vec y = x - center;
  const double r = y.norm();
  switch (kind) {
    case BarrierKind::radial_sub:
    case BarrierKind::radial_super: {
      SymMatrix h = SymMatrix::zero(dim);
      if (r > rho / 2 && r < rho) {
        const double s = (r * r) / (rho * rho);
        const double c = 2.0 * delta * coeff * gamma / (rho * rho) * std::exp(-gamma * s);
        h = c * ((2.0 * gamma / (rho * rho)) * SymMatrix::outer(y) - SymMatrix::identity(dim));
        if (kind == BarrierKind::radial_super) h *= -1.0;
      }
      return h;
    }
    case BarrierKind::power: {
      SymMatrix h = SymMatrix::zero(dim);
      if (r > 1.0 / 20.0 && r < rho) {
        const double c = coeff * gamma * std::pow(r, -gamma - 2.0);
        h = c * ((gamma + 2.0) / (r * r) * SymMatrix::outer(y) - SymMatrix::identity(dim));
      }
      return h;
    }
    case BarrierKind::exponential: {
      SymMatrix h = SymMatrix::zero(dim);
      h.at(dim - 1, dim - 1) = -c2 * gamma * gamma * std::exp(gamma * x[dim - 1]);
      return h;
    }
  }
  return SymMatrix::zero(dim);
}

namespace {

// Smallest gamma with unit slack in 2 lambda gamma - Lambda(d-1) - Lip >= 1.
double radial_gamma(int d, double lambda, double Lambda, double lip) {
  return (1.0 + Lambda * (d - 1) + lip) / (2.0 * lambda);
}

BarrierSpec make_radial(BarrierKind kind, int d, double rho, double delta, double gamma) {
  BarrierSpec b;
  b.kind = kind;
  b.dim = d;
  b.center = Vec::zero(d);
  b.rho = rho;
  b.gamma = gamma;
  b.delta = delta;
  b.coeff = 1.0 / (std::exp(-gamma / 4.0) - std::exp(-gamma));  // psi = 1 at rho/2
  return b;
}

}  // namespace

std::pair<BarrierSpec, double> radial_subsolution(double rho, double delta,
                                                  const RescaledProblem& problem,
                                                  int samples, std::uint64_t seed) {
  if (!(delta > 0) || !(rho > 0)) throw PreconditionError("radial_subsolution: rho, delta > 0");
  const OperatorSpec& op = problem.base->op;
  const int d = op.dim;
  BarrierSpec b = make_radial(BarrierKind::radial_sub, d, rho, delta,
                              radial_gamma(d, op.lambda, op.Lambda, op.lip_grad));
  Rng rng(seed);
  double sigma = std::numeric_limits<double>::infinity();
  Vec worst = Vec::zero(d);
  for (int k = 0; k < samples; ++k) {
    const Vec x = rng.point_in_annulus(d, rho / 2 * (1 + 1e-9), rho * (1 - 1e-9), b.center);
    const double v = problem.F(b.hessian(x), b.gradient(x), x);
    if (v < sigma) {
      sigma = v;
      worst = x;
    }
  }
  if (!(sigma > 0))
    throw BarrierFailure("radial_subsolution: certification failed",
                         {worst.a.begin(), worst.a.begin() + d}, sigma);
  b.sigma = sigma;
  return {b, sigma};
}

std::pair<BarrierSpec, double> radial_supersolution(double rho, double delta,
                                                    const RescaledProblem& problem,
                                                    int samples, std::uint64_t seed) {
  if (!(delta > 0) || !(rho > 0)) throw PreconditionError("radial_supersolution: rho, delta > 0");
  const OperatorSpec& op = problem.base->op;
  const int d = op.dim;
  BarrierSpec b = make_radial(BarrierKind::radial_super, d, rho, delta,
                              radial_gamma(d, op.lambda, op.Lambda, op.lip_grad));
  Rng rng(seed);
  double neg = -std::numeric_limits<double>::infinity();
  Vec worst = Vec::zero(d);
  for (int k = 0; k < samples; ++k) {
    const Vec x = rng.point_in_annulus(d, rho / 2 * (1 + 1e-9), rho * (1 - 1e-9), b.center);
    const double v = problem.F(b.hessian(x), b.gradient(x), x);
    if (v > neg) {
      neg = v;
      worst = x;
    }
  }
  const double sigma = -neg;
  if (!(sigma > 0))
    throw BarrierFailure("radial_supersolution: certification failed",
                         {worst.a.begin(), worst.a.begin() + d}, neg);
  b.sigma = sigma;
  return {b, sigma};
}

BarrierSpec power_barrier(const Vec& center, double rho, double gamma, double lambda,
                          double Lambda, int samples, std::uint64_t seed) {
  const int d = center.dim;
  const double threshold = std::max(Lambda * (d - 1) / lambda - 1.0, 0.0);
  if (!(gamma > threshold))
    throw PreconditionError("power_barrier: gamma below ellipticity threshold");
  if (!(rho > 1.0 / 20.0)) throw PreconditionError("power_barrier: rho must exceed 1/20");
  BarrierSpec b;
  b.kind = BarrierKind::power;
  b.dim = d;
  b.center = center;
  b.rho = rho;
  b.gamma = gamma;
  b.delta = 1.0;
  b.coeff = 1.0 / (std::pow(1.0 / 20.0, -gamma) - std::pow(rho, -gamma));
  Rng rng(seed);
  double c0 = std::numeric_limits<double>::infinity();
  Vec worst = center;
  for (int k = 0; k < samples; ++k) {
    const Vec x = rng.point_in_annulus(d, (1.0 / 20.0) * (1 + 1e-9), rho * (1 - 1e-9), center);
    const double v = pucci_minus(b.hessian(x), lambda, Lambda);
    if (v < c0) {
      c0 = v;
      worst = x;
    }
  }
  if (!(c0 > 0))
    throw BarrierFailure("power_barrier: M^- certification failed",
                         {worst.a.begin(), worst.a.begin() + d}, c0);
  b.sigma = c0;
  return b;
}

BarrierSpec exponential_supersolution(const Problem& problem, double f_bound,
                                      double minorant_bound, double datum_bound,
                                      int samples, std::uint64_t seed) {
  const OperatorSpec& op = problem.op;
  const int d = op.dim;
  if (!std::isfinite(f_bound) || !std::isfinite(minorant_bound) || !std::isfinite(datum_bound))
    throw PreconditionError("exponential_supersolution: bounds must be finite");
  BarrierSpec b;
  b.kind = BarrierKind::exponential;
  b.dim = d;
  b.center = Vec::zero(d);
  b.gamma = (1.0 + op.lip_grad) / op.lambda;  // lambda gamma - Lip >= 1
  const double depth = b.gamma * std::exp(-b.gamma) * (op.lambda * b.gamma - op.lip_grad);
  b.c2 = std::max(1.0, f_bound / depth);
  b.c1 = b.c2 * std::exp(b.gamma) + std::max({1.0, minorant_bound, datum_bound});
  b.delta = 1.0;

  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    const Vec x = rng.point_in_ball(d);
    const double v = problem.op.eval(b.hessian(x), b.gradient(x), x);
    if (v > -f_bound + 1e-12)
      throw BarrierFailure("exponential_supersolution: certification failed",
                           {x.a.begin(), x.a.begin() + d}, v);
  }
  return b;
}

}  // namespace fbx
