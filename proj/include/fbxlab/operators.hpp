#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fbxlab/sym_matrix.hpp"
#include "fbxlab/vec.hpp"

namespace fbx {

// Pucci extremal operators for the ellipticity class E(lambda, Lambda).
double pucci_plus(const SymMatrix& n, double lambda, double Lambda);
double pucci_minus(const SymMatrix& n, double lambda, double Lambda);

enum class Concavity { concave, convex, neither };

// A fully nonlinear operator F(M, xi, x) with declared ellipticity data.
struct OperatorSpec {
  int dim = 0;
  double lambda = 1.0;
  double Lambda = 1.0;
  double lip_grad = 0.0;        // Lipschitz seminorm in the gradient slot
  double holder_beta = 1.0;     // Holder exponent in x
  double holder_seminorm = 0.0; // Holder seminorm in x
  Concavity concavity = Concavity::neither;
  std::string name;

  std::function<double(const SymMatrix&, const Vec&, const Vec&)> eval;

  // Optional fast monotone evaluation from per-direction second differences
  // (wide-stencil sweeps). delta[k] is the second difference along the k-th
  // stencil direction, normalized to approximate the unit-direction second
  // derivative. Used only when set; the generic frame assembly is the default.
  std::function<double(const double* delta, int ndir, const Vec& grad, const Vec& x)> wide_fast;

  double operator()(const SymMatrix& m, const Vec& xi, const Vec& x) const {
    return eval(m, xi, x);
  }
};

struct SandwichReport {
  bool pass = true;
  double worst_excess = 0.0;  // largest violation of either inequality
  int samples = 0;
};

// Sampled checks of the OperatorSpec invariants.
bool check_zero_at_zero(const OperatorSpec& op, int samples = 64, double tol = 1e-12,
                        std::uint64_t seed = kDefaultSeed);
SandwichReport check_pucci_sandwich(const OperatorSpec& op, int samples = 1000,
                                    std::uint64_t seed = kDefaultSeed);
bool check_concavity(const OperatorSpec& op, int samples = 1000,
                     std::uint64_t seed = kDefaultSeed);

// Free boundary condition g(x, nu) with its two gradients. grad_theta is the
// ambient derivative in the direction argument restricted to the sphere.
struct BoundaryLaw {
  int dim = 0;
  double gamma0 = 1.0;
  std::string name;
  std::function<double(const Vec&, const Vec&)> g;
  std::function<Vec(const Vec&, const Vec&)> grad_x;
  std::function<Vec(const Vec&, const Vec&)> grad_theta;

  double operator()(const Vec& x, const Vec& nu) const { return g(x, nu); }
};

// Finite-difference cross check of grad_theta along tangent directions.
bool check_spherical_gradient(const BoundaryLaw& law, int samples = 64,
                              double step = 1e-4, double tol = 1e-6,
                              std::uint64_t seed = kDefaultSeed);

// The oblique vector tau(nu, g) = nu + ((grad_theta.nu)nu - grad_theta)/g.
// Satisfies tau.nu = 1 up to rounding.
Vec compute_tau(const BoundaryLaw& law, const Vec& nu, const Vec& x0);

// The data triple of the free boundary problem.
struct Problem {
  OperatorSpec op;
  std::function<double(const Vec&)> f;
  BoundaryLaw law;
};

// The rescaled triple F_{x0,rho}, f_{x0,rho}, g_{x0,rho}.
struct RescaledProblem {
  std::shared_ptr<const Problem> base;
  Vec x0;
  double rho = 1.0;

  double F(const SymMatrix& m, const Vec& xi, const Vec& x) const;
  double f(const Vec& x) const;
  double g(const Vec& x, const Vec& nu) const;

  // The rescaled triple packaged as a Problem (with adjusted seminorms).
  Problem materialize() const;
};

// rho in (0,1]; the ball of radius rho around x0 must stay inside the base
// domain B_1.
RescaledProblem rescale(const Problem& problem, const Vec& x0, double rho);
Problem rescale_problem(const Problem& problem, const Vec& x0, double rho);

// Empirical moduli of the rescaled data at scale rho_n = delta * rho^n,
// compared against the budget r_n = r0 * rho^n (hypotheses of the
// improvement-of-flatness step).
struct ModulusEntry {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = true;
};
struct ModulusReport {
  int n = 0;
  double scale = 0.0;   // rho_n
  double budget = 0.0;  // r_n
  std::vector<ModulusEntry> entries;
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};
struct IofConstants {
  double rho = 0.25;
  double r0 = 1.0 / 32.0;
  double alpha = 0.25;
};
ModulusReport measure_iof_moduli(const Problem& problem, const Vec& x0, double delta,
                                 int n, const IofConstants& c = {},
                                 int samples = 200, std::uint64_t seed = kDefaultSeed);

// Built-in registry (operators compiled in, selected by name).
OperatorSpec make_laplace(int d);
OperatorSpec make_pucci_minus_op(int d, double lambda, double Lambda);
OperatorSpec make_pucci_plus_op(int d, double lambda, double Lambda);
// Concave Bellman minimum of two linear operators tr(A_i M) with diagonal
// A_i of spectrum {lambda, Lambda}.
OperatorSpec make_bellman_min(int d, double lambda, double Lambda);
OperatorSpec operator_by_name(const std::string& name, int d, double lambda, double Lambda);
std::vector<std::string> operator_names();

BoundaryLaw make_constant_law(int d, double g0);
BoundaryLaw make_linear_x_law(int d, double g0, const Vec& a);      // g0 + a.x
BoundaryLaw make_angular_law(int d, double g0, double eps, int axis = 0);  // g0 (1 + eps nu_k)
BoundaryLaw law_by_name(const std::string& name, int d, const std::vector<double>& params);

}  // namespace fbx
