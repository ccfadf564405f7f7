#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fbxlab/grid.hpp"
#include "fbxlab/operators.hpp"
#include "fbxlab/quadpoly.hpp"

namespace fbx {

// One element of P(nu, F, f, g): F(D^2 p, g(0,nu) nu, 0) = f(0) and
// grad p . tau(nu, g) = grad_x g(0,nu) . x on {x . nu = 0}. The Hessian slot
// is corrected along tau-perp by monotone bisection.
QuadPoly construct_polynomial(const Problem& problem, const Vec& nu, double tol = 1e-12);

// Residuals of the two defining conditions (for admissibility checks).
struct PolynomialResiduals {
  double interior = 0.0;  // |F(D^2 p, g0 nu, 0) - f(0)|
  double oblique = 0.0;   // worst violation of the hyperplane condition on a basis
};
PolynomialResiduals polynomial_residuals(const Problem& problem, const Vec& nu,
                                         const QuadPoly& p);

// Unit vector orthogonal to tau: the normalized projection of the last axis
// onto tau's orthogonal complement (first axis when tau is parallel to it).
Vec tau_perp(const Vec& tau);

// Smallest eps with (g(x0,nu)(y.nu) + p(y) - eps)_+ <= u_{x0,r}(y) <= (... + eps)_+
// over rescaled lattice samples of B_1.
double measure_flatness(const GridField& u, const Vec& x0, double r, const Vec& nu,
                        const QuadPoly& p, const Problem& problem);
// Same measurement on a closed-form field (no grid): samples a fixed lattice.
double measure_flatness(const std::function<double(const Vec&)>& u, int dim, const Vec& x0,
                        double r, const Vec& nu, const QuadPoly& p, double g0,
                        int samples_per_axis = 64);

struct TraceRecord {
  int n = 0;
  double rho_n = 0.0;  // scale
  double r_n = 0.0;    // radius budget
  Vec nu;
  QuadPoly p;
  double eps = 0.0;
  std::string flag;  // "", "budget-exceeded", "not-decreasing", "grid-floor"
};

struct FlatnessTrace {
  double rho = 0.25;
  double r0 = 1.0 / 32.0;
  double alpha = 0.25;
  double delta = 0.5;
  std::vector<TraceRecord> records;

  const TraceRecord& last() const { return records.back(); }
  void write_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

struct ImproveOpts {
  double oblique_h = 1.0 / 32.0;
  double oblique_tol = 1e-9;
  double eps_floor = 1e-11;  // below this the step is a fixed point
  int min_samples = 8;       // rescaled lattice samples needed to measure
};

// One quadratic improvement-of-flatness step; appends the new record.
void improve_flatness(const GridField& u, const Vec& x0, FlatnessTrace& trace,
                      const Problem& problem, const ImproveOpts& opts = {});

// Retarget the hyperplane condition from (tau, xi, e_d) to (tau', xi', nu'):
// symmetric row correction paired with e_d, then conjugation by the rotation
// R nu' = e_d. The output satisfies grad p'. tau' = xi'. x on {x . nu' = 0}
// exactly up to rounding.
QuadPoly adjust_polynomial(const QuadPoly& p, const Vec& tau, const Vec& tau_prime,
                           const Vec& xi, const Vec& xi_prime, const Vec& nu_prime,
                           double pre_tol = 1e-10);

// Unit vector in the direction g0 nu_base + r_amp * correction.
Vec renormalize_direction(const Vec& nu_base, double g0, const Vec& correction,
                          double r_amp);

struct TaylorReport {
  Vec nu;
  QuadPoly p_physical;   // expansion polynomial in unscaled coordinates
  FlatnessTrace trace;
  std::vector<double> radii;
  std::vector<double> sup_errors;
  double exponent = 0.0;
  bool resolution_bound = false;
  bool halted_early = false;
};

struct TaylorOpts {
  double rho = 0.25;
  double r0 = 1.0 / 32.0;
  double alpha = 0.25;
  double delta = 0.0;  // 0: pick by bisection on the measured moduli
  int max_steps = 12;
  ImproveOpts improve;
};

// Iterate the improvement of flatness at a free boundary point down to the
// grid floor; returns the limit direction/polynomial and the fitted rate.
TaylorReport taylor_expand_at_fb(const GridField& u, const Vec& x0, const Problem& problem,
                                 const TaylorOpts& opts = {});

// Largest delta in (0,1] whose rescaled moduli pass at n = 0 (bisection).
double delta_from_moduli(const Problem& problem, const Vec& x0, const IofConstants& c);

}  // namespace fbx
