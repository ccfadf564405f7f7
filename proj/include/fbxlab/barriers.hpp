#pragma once

#include <functional>

#include "fbxlab/operators.hpp"
#include "fbxlab/sym_matrix.hpp"
#include "fbxlab/vec.hpp"

namespace fbx {

enum class BarrierKind { radial_sub, radial_super, power, exponential };

// Closed-form barrier with its certified margin. Evaluation, gradient and
// Hessian are exact formulas; certification samples the operator on them.
struct BarrierSpec {
  BarrierKind kind;
  int dim = 0;
  Vec center;
  double rho = 1.0;       // outer radius (radial/power)
  double gamma = 1.0;     // exponent
  double delta = 1.0;     // amplitude
  double sigma = 0.0;     // certified margin
  double coeff = 0.0;     // C~ or c-bar (continuity normalization)
  double c1 = 0.0, c2 = 0.0;  // exponential barrier constants

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  SymMatrix hessian(const Vec& x) const;
};

// Radial subsolution zeta = delta * psi with psi = C~ (e^{-gamma|x/rho|^2} - e^{-gamma}),
// equal to delta on B_{rho/2} and 0 on the sphere of radius rho. Certifies
// F_r(D^2 zeta, grad zeta, x) >= sigma > 0 on the annulus by sampling.
std::pair<BarrierSpec, double> radial_subsolution(double rho, double delta,
                                                  const RescaledProblem& problem,
                                                  int samples = 10000,
                                                  std::uint64_t seed = kDefaultSeed);

// Mirror barrier zeta~ = delta (1 - psi): zero on the inner ball, delta on the
// outer sphere, with F_r < -sigma certified on the annulus.
std::pair<BarrierSpec, double> radial_supersolution(double rho, double delta,
                                                    const RescaledProblem& problem,
                                                    int samples = 10000,
                                                    std::uint64_t seed = kDefaultSeed);

// Power barrier of the partial Harnack inequality: 1 on |x-c| <= 1/20, zero
// outside |x-c| = rho, with M^-(D^2 psi) >= c0 > 0 certified on the annulus.
BarrierSpec power_barrier(const Vec& center, double rho, double gamma, double lambda,
                          double Lambda, int samples = 10000,
                          std::uint64_t seed = kDefaultSeed);

// w(x) = C1 - C2 e^{gamma x_d}, strictly positive on the closed unit ball,
// dominating the given bounds, with F(D^2 w, grad w, x) <= -f_bound certified.
BarrierSpec exponential_supersolution(const Problem& problem, double f_bound,
                                      double minorant_bound, double datum_bound,
                                      int samples = 10000,
                                      std::uint64_t seed = kDefaultSeed);

}  // namespace fbx
