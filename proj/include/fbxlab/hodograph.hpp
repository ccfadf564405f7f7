#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "fbxlab/grid.hpp"
#include "fbxlab/operators.hpp"

namespace fbx {

// Hodograph map Phi(x', x_d) = (x', u(x)) on a patch with free boundary normal
// near e_d, and its partial Legendre inverse w with Phi^{-1}(y) = (y', w(y)).
struct HodographChart {
  Vec x0;
  double delta = 0.0;   // patch radius in the source grid
  double source_h = 0.0;
  GridField w;          // target field on {y_d >= 0}; w(y', 0) traces the FB
  double min_wd = 0.0;  // smallest dw/dy_d seen on the chart
};

struct HodographParams {
  double spacing_factor = 4.0;  // target grid spacing = factor * source h
  double gamma0 = 1.0;          // monotonicity floor gamma0 / 2 for du/dx_d
  double max_tilt_deg = 15.0;   // FB normal must align with e_d within this
};

HodographChart hodograph_forward(const GridField& u, const Vec& x0, double delta,
                                 const HodographParams& params = {});

// Sup residuals of the five derivative identities relating u and w.
struct DerivativeReport {
  double first_tangential = 0.0;  // du/dx_i = -w_i / w_d
  double first_normal = 0.0;      // du/dx_d = 1 / w_d
  double second_dd = 0.0;         // u_dd = -w_dd / w_d^3
  double second_di = 0.0;
  double second_ij = 0.0;
  int samples = 0;
  double max_residual() const;
};
DerivativeReport legendre_derivative_check(const HodographChart& chart, const GridField& u);

// Psi_2(xi) = (-xi_1/xi_d, ..., -xi_{d-1}/xi_d, 1/xi_d) = grad u at the
// matched point; Psi_1 assembles D^2 u from (D^2 w, grad w).
Vec hodograph_psi2(const Vec& xi);
SymMatrix hodograph_psi1(const SymMatrix& m, const Vec& xi);

// Transformed operator F~(M, xi, z, y) = F(Psi_1(M,xi), Psi_2(xi), (y', z)) - f(y', z).
struct TransformedOperator {
  std::function<double(const SymMatrix&, const Vec&, double, const Vec&)> eval;
  double xi_d_cutoff = 0.0;
};
TransformedOperator transform_operator(const Problem& problem, const HodographChart& chart);

struct TransformReport {
  double max_residual = 0.0;  // |F~| on the chart's (w, grad w, D^2 w) samples
  int samples = 0;
  // finite-difference monotonicity probe of F~ in M near the chart jet:
  // strictly one-signed slopes certify ellipticity (sign included)
  double slope_min = 0.0;
  double slope_max = 0.0;
  bool elliptic = false;
};
TransformReport transform_residual(const Problem& problem, const HodographChart& chart,
                                   const TransformedOperator& op);

// G(x, xi) = |xi| - g(x, xi/|xi|).
double bernoulli_residual(const BoundaryLaw& law, const Vec& x, const Vec& xi);
// G~(y', z, xi) = G((y', z), Psi_2(xi)).
double bernoulli_transformed(const BoundaryLaw& law, const Vec& y_prime, double z,
                             const Vec& xi);

// Complementing (Lopatinskii-Shapiro) condition for the linearized system.
enum class ComplementingVerdict { satisfied, violated, degenerate };

struct ComplementingInput {
  SymMatrix a;   // dF~/dM at the boundary point (uniformly elliptic)
  Vec b;         // dG~/dxi
  Vec xi_prime;  // nonzero tangential frequency (d-1 components used)
};

struct ComplementingResult {
  ComplementingVerdict verdict;
  std::complex<double> mu1, mu2;
  std::string detail;
};

ComplementingResult check_complementing(const ComplementingInput& input);

// Root-and-decay analysis of a mu^2 + i b mu + c = 0 with boundary row
// b_d mu + i s = 0; exposed separately so the degenerate branches are testable.
ComplementingResult complementing_roots(double a, double b, double c, double b_d,
                                        double s);

}  // namespace fbx
