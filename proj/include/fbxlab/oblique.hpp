#pragma once

#include <functional>

#include "fbxlab/fitting.hpp"
#include "fbxlab/grid.hpp"
#include "fbxlab/operators.hpp"
#include "fbxlab/quadpoly.hpp"

namespace fbx {

// Hessian-only operator on the half-ball with the oblique condition
// grad(u) . tau = 0 on the flat boundary; tau . e_d = 1.
struct ObliqueProblem {
  OperatorSpec op;  // evaluator reads only the Hessian slot
  Vec tau;
  double h = 1.0 / 64.0;
};

// The difference-quotient linearization of F around the polynomial jet:
// M -> [F(D^2 p + eps M, grad_model, 0) - F(D^2 p, grad_model, 0)] / eps.
// Inherits the (lambda, Lambda) sandwich of the parent.
OperatorSpec linearize_operator(const Problem& problem, const QuadPoly& p,
                                const Vec& grad_model, double eps);

struct ObliqueSolveInfo {
  long sweeps = 0;
  double residual = 0.0;
  double boundary_residual = 0.0;
};

// Damped sweeps enforcing F(D^2 u) = 0 at interior nodes and the centered
// ghost elimination u(z', -h) = u(z', h) + 2h tau' . grad'(u) at flat nodes.
GridField solve_oblique(const ObliqueProblem& problem,
                        const std::function<double(const Vec&)>& curved_data,
                        ObliqueSolveInfo* info = nullptr, double tol = 1e-9,
                        long max_sweeps = 2000000);

struct Expansion {
  double value0 = 0.0;
  Vec grad0;
  SymMatrix hess0;
  std::vector<double> rhos;       // {1/8, 1/16, 1/32}
  std::vector<double> residuals;  // sup-norm of (u - per-rho quadratic fit)
  double decay_exponent = 0.0;
  bool resolution_floor = false;  // residuals at solver-tolerance level
};

// Pointwise second-order expansion at 0: least-squares quadratic fit on
// B_{1/8}^+ for the jet; per-rho refits give the decay profile.
Expansion pointwise_expansion(const GridField& field, double fit_radius = 0.125,
                              double floor = 1e-7);

}  // namespace fbx
