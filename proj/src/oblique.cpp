#include "fbxlab/oblique.hpp"

#include <algorithm>
#include <cmath>

#include "fbxlab/errors.hpp"

namespace fbx {

OperatorSpec linearize_operator(const Problem& problem, const QuadPoly& p,
                                const Vec& grad_model, double eps) {
  if (!(eps > 0)) throw PreconditionError("linearize_operator: eps must be positive");
  auto base = std::make_shared<Problem>(problem);
  const SymMatrix d2p = p.hessian();
  const Vec origin = Vec::zero(problem.op.dim);
  const double f0 = base->op.eval(d2p, grad_model, origin);
  OperatorSpec out;
  out.dim = problem.op.dim;
  out.lambda = problem.op.lambda;
  out.Lambda = problem.op.Lambda;
  out.lip_grad = 0.0;
  out.concavity = problem.op.concavity;
  out.name = problem.op.name + "~linearized";
  out.eval = [base, d2p, grad_model, origin, f0, eps](const SymMatrix& m, const Vec&,
                                                      const Vec&) {
    return (base->op.eval(d2p + eps * m, grad_model, origin) - f0) / eps;
  };
  return out;
}

GridField solve_oblique(const ObliqueProblem& problem,
                        const std::function<double(const Vec&)>& curved_data,
                        ObliqueSolveInfo* info, double tol, long max_sweeps) {
  const int d = problem.op.dim;
  if (std::fabs(problem.tau[d - 1] - 1.0) > 1e-12)
    throw PreconditionError("solve_oblique: tau . e_d must equal 1");
  const double h = problem.h;
  GridField u = make_halfball_grid(d, h, curved_data);

  const std::ptrdiff_t stride[3] = {
      static_cast<std::ptrdiff_t>(u.n[1]) * u.n[2], u.n[2], 1};
  const std::ptrdiff_t sd = stride[d - 1];

  std::vector<std::size_t> interior, flat;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (u.mask[idx] == NodeMask::interior) interior.push_back(idx);
    if (u.mask[idx] == NodeMask::oblique_flat) flat.push_back(idx);
  }

  const double ih2 = 1.0 / (h * h);
  // ghost value at z - h e_d from the centered boundary condition
  const auto ghost = [&](std::size_t idx) {
    double tg = 0.0;
    for (int a = 0; a < d - 1; ++a)
      tg += problem.tau[a] * (u.values[idx + stride[a]] - u.values[idx - stride[a]]) /
            (2.0 * h);
    return u.values[idx + sd] + 2.0 * h * tg;
  };
  const auto hessian_at = [&](std::size_t idx, bool flat_node) {
    SymMatrix m(d);
    const double c = u.values[idx];
    for (int a = 0; a < d; ++a) {
      const double up = u.values[idx + stride[a]];
      const double um = (flat_node && a == d - 1) ? ghost(idx) : u.values[idx - stride[a]];
      m.at(a, a) = (up - 2.0 * c + um) * ih2;
    }
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) {
        if (flat_node && b == d - 1) {
          // centered in the tangent axis, one-sided upward in z_d
          const double v = (u.values[idx + stride[a] + sd] - u.values[idx + stride[a]] -
                            u.values[idx - stride[a] + sd] + u.values[idx - stride[a]]) *
                           (0.5 * ih2);
          m.at(a, b) = v;
        } else {
          m.at(a, b) = (u.values[idx + stride[a] + stride[b]] -
                        u.values[idx + stride[a] - stride[b]] -
                        u.values[idx - stride[a] + stride[b]] +
                        u.values[idx - stride[a] - stride[b]]) *
                       (0.25 * ih2);
        }
      }
    return m;
  };

  const Vec zero = Vec::zero(d);
  const double theta = h * h / (2.0 * d * problem.op.Lambda);
  const double omega = 1.5;
  double res = 0.0;
  long sweeps = 0;
  bool converged = false;
  for (long sweep = 1; sweep <= max_sweeps; ++sweep) {
    double max_update = 0.0;
    for (std::size_t idx : interior) {
      const double r = problem.op.eval(hessian_at(idx, false), zero, zero);
      u.values[idx] += omega * theta * r;
      max_update = std::max(max_update, std::fabs(r));
    }
    for (std::size_t idx : flat) {
      const double r = problem.op.eval(hessian_at(idx, true), zero, zero);
      u.values[idx] += omega * theta * r;
      max_update = std::max(max_update, std::fabs(r));
    }
    sweeps = sweep;
    if (max_update <= tol * std::max(1.0, u.max_abs())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NonConvergence("solve_oblique: sweep cap exceeded", {});

  if (info) {
    info->sweeps = sweeps;
    double r = 0.0;
    for (std::size_t idx : interior)
      r = std::max(r, std::fabs(problem.op.eval(hessian_at(idx, false), zero, zero)));
    info->residual = r;
    double br = 0.0;
    for (std::size_t idx : flat) {
      double tg = 0.0;
      for (int a = 0; a < d - 1; ++a)
        tg += problem.tau[a] *
              (u.values[idx + stride[a]] - u.values[idx - stride[a]]) / (2.0 * h);
      // first-order one-sided reading of grad u . tau (O(h) for smooth u)
      const double und = (u.values[idx + sd] - u.values[idx]) / h;
      br = std::max(br, std::fabs(und + tg));
    }
    info->boundary_residual = br;
  }
  return u;
}

Expansion pointwise_expansion(const GridField& field, double fit_radius, double floor) {
  Expansion ex;
  const auto collect = [&](double radius, std::vector<Vec>& pts, std::vector<double>& vals) {
    for (std::size_t idx = 0; idx < field.size(); ++idx) {
      if (field.mask[idx] == NodeMask::exterior) continue;
      const Vec x = field.coord(idx);
      if (x.norm() <= radius) {
        pts.push_back(x);
        vals.push_back(field.values[idx]);
      }
    }
  };
  std::vector<Vec> pts;
  std::vector<double> vals;
  collect(fit_radius, pts, vals);
  const QuadFit jet = fit_quadratic(pts, vals);
  ex.value0 = jet.value0;
  ex.grad0 = jet.grad0;
  ex.hess0 = jet.hess0;

  for (double rho : {fit_radius, fit_radius / 2, fit_radius / 4}) {
    std::vector<Vec> p2;
    std::vector<double> v2;
    collect(rho, p2, v2);
    double sup = 0.0;
    try {
      const QuadFit local = fit_quadratic(p2, v2);
      for (std::size_t i = 0; i < p2.size(); ++i) {
        const double q = local.value0 + local.grad0.dot(p2[i]) + 0.5 * local.hess0.quad(p2[i]);
        sup = std::max(sup, std::fabs(v2[i] - q));
      }
    } catch (const ResolutionError&) {
      break;  // too few nodes at this radius
    }
    ex.rhos.push_back(rho);
    ex.residuals.push_back(sup);
  }
  if (ex.rhos.size() < 2) throw ResolutionError("pointwise_expansion: grid too coarse");
  const ExponentFit fit = fit_exponent(ex.rhos, ex.residuals, floor);
  ex.decay_exponent = fit.exponent;
  ex.resolution_floor = fit.floored;
  return ex;
}

}  // namespace fbx
