#include "fbxlab/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "fbxlab/errors.hpp"
#include "fbxlab/oblique.hpp"
#include "fbxlab/perron.hpp"

#include <nlohmann/json.hpp>

namespace fbx {

namespace {

// Symmetric correction making P_{e_d}(M tau) = P_{e_d}(xi) exact: the row
// correction of the polynomial-adjustment construction, paired with e_d
// (tau . e_d = 1 keeps it perfectly conditioned).
SymMatrix retarget_on_flat(const SymMatrix& m, const Vec& tau, const Vec& xi) {
  const int d = m.dim();
  const Vec ed = Vec::axis(d, d - 1);
  const double td = tau[d - 1];
  if (std::fabs(td) < 1e-12)
    throw PreconditionError("adjust_polynomial: tau has no e_d component");
  Vec eta = xi - m.apply(tau);
  eta[d - 1] = 0.0;  // only the tangential components are constrained
  SymMatrix out = m;
  // Delta = (eta (x) e_d + e_d (x) eta) / (2 - overlap): solve exactly
  // (Delta tau)_j = eta_j for j < d with Delta = sym_outer(c, e_d).
  // (Delta tau)_j = c_j * td + e_d[j] * (c . tau); for j < d this is c_j td.
  Vec c = (1.0 / td) * eta;
  c[d - 1] = 0.0;
  out += SymMatrix::sym_outer(c, ed);
  return out;
}

double hyperplane_violation(const SymMatrix& m, const Vec& tau, const Vec& xi,
                            const Vec& nu) {
  // worst |(M tau - xi) . t| over an orthonormal basis t of {x . nu = 0}
  const int d = m.dim();
  const Vec res = m.apply(tau) - xi;
  const Rotation R = rotation_to_axis(nu);
  double worst = 0.0;
  for (int a = 0; a < d - 1; ++a) {
    // t = R^T e_a spans the hyperplane
    Vec t = R.apply_transpose(Vec::axis(d, a));
    worst = std::max(worst, std::fabs(res.dot(t)));
  }
  return worst;
}

}  // namespace

Vec tau_perp(const Vec& tau) {
  const int d = tau.dim;
  Vec cand = Vec::axis(d, d - 1);
  Vec w = cand - (cand.dot(tau) / tau.norm2()) * tau;
  if (w.norm() < 1e-10) {
    cand = Vec::axis(d, 0);
    w = cand - (cand.dot(tau) / tau.norm2()) * tau;
  }
  return w.normalized();
}

QuadPoly construct_polynomial(const Problem& problem, const Vec& nu, double tol) {
  const int d = problem.op.dim;
  const Vec origin = Vec::zero(d);
  const double g0 = problem.law.g(origin, nu);
  if (g0 < problem.law.gamma0 - 1e-12)
    throw PreconditionError("construct_polynomial: g(0,nu) below gamma0");
  const Vec tau = compute_tau(problem.law, nu, origin);
  Vec xi = problem.law.grad_x(origin, nu);

  // base matrix with P_nu(M tau) = P_nu(xi), built on the (xi', nu) pairing
  Vec xi_t = xi - xi.dot(nu) * nu;
  SymMatrix m0 = SymMatrix::sym_outer((1.0 / tau.dot(nu)) * xi_t, nu);

  // one-parameter correction along tau-perp: F is monotone in t with slope
  // in [lambda, Lambda], so the root bracket always exists
  const Vec tp = tau_perp(tau);
  const SymMatrix dir = SymMatrix::outer(tp);
  const Vec grad_model = g0 * nu;
  const double target = problem.f(origin);
  const auto eval_t = [&](double t) {
    return problem.op.eval(m0 + t * dir, grad_model, origin) - target;
  };
  double t_lo = 0.0, t_hi = 0.0;
  const double f0 = eval_t(0.0);
  if (std::fabs(f0) > tol) {
    const double step = std::fabs(f0) / problem.op.lambda + 1.0;
    if (f0 > 0) {
      t_lo = -step;
      t_hi = 0.0;
      while (eval_t(t_lo) > 0) t_lo *= 2.0;
    } else {
      t_lo = 0.0;
      t_hi = step;
      while (eval_t(t_hi) < 0) t_hi *= 2.0;
    }
    for (int it = 0; it < 200 && t_hi - t_lo > 0; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      const double v = eval_t(mid);
      if (std::fabs(v) <= tol) {
        t_lo = t_hi = mid;
        break;
      }
      (v < 0 ? t_lo : t_hi) = mid;
    }
  }
  const double t = 0.5 * (t_lo + t_hi);
  return QuadPoly(m0 + t * dir);
}

PolynomialResiduals polynomial_residuals(const Problem& problem, const Vec& nu,
                                         const QuadPoly& p) {
  const int d = problem.op.dim;
  const Vec origin = Vec::zero(d);
  const double g0 = problem.law.g(origin, nu);
  const Vec tau = compute_tau(problem.law, nu, origin);
  const Vec xi = problem.law.grad_x(origin, nu);
  PolynomialResiduals res;
  res.interior = std::fabs(problem.op.eval(p.hessian(), g0 * nu, origin) - problem.f(origin));
  res.oblique = hyperplane_violation(p.hessian(), tau, xi, nu);
  return res;
}

double measure_flatness(const GridField& u, const Vec& x0, double r, const Vec& nu,
                        const QuadPoly& p, const Problem& problem) {
  const double thr = u.h * u.h;
  if (u.interp(x0) > thr)
    throw PreconditionError("measure_flatness: x0 is not near the zero set");
  const double g0 = problem.law.g(x0, nu);
  double eps = 0.0;
  bool any = false;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (u.mask[idx] == NodeMask::exterior) continue;
    const Vec x = u.coord(idx);
    if ((x - x0).norm() > r) continue;
    any = true;
    const Vec y = (1.0 / r) * (x - x0);
    const double uval = u.values[idx] / r;
    const double model = g0 * y.dot(nu) + p(y);
    if (model - uval > eps) eps = model - uval;          // lower bound side
    if (uval > 0.0 && uval - model > eps) eps = uval - model;  // upper bound side
  }
  if (!any) throw ResolutionError("measure_flatness: no samples inside B_r(x0)");
  return eps;
}

double measure_flatness(const std::function<double(const Vec&)>& u, int dim, const Vec& x0,
                        double r, const Vec& nu, const QuadPoly& p, double g0,
                        int samples_per_axis) {
  double eps = 0.0;
  const double step = 2.0 / samples_per_axis;
  const int n = samples_per_axis + 1;
  std::array<int, 3> counts = {n, dim > 1 ? n : 1, dim > 2 ? n : 1};
  for (int i = 0; i < counts[0]; ++i)
    for (int j = 0; j < counts[1]; ++j)
      for (int k = 0; k < counts[2]; ++k) {
        Vec y(dim);
        y[0] = -1.0 + i * step;
        if (dim > 1) y[1] = -1.0 + j * step;
        if (dim > 2) y[2] = -1.0 + k * step;
        if (y.norm() > 1.0) continue;
        const double uval = u(x0 + r * y) / r;
        const double model = g0 * y.dot(nu) + p(y);
        if (model - uval > eps) eps = model - uval;
        if (uval > 0.0 && uval - model > eps) eps = uval - model;
      }
  return eps;
}

QuadPoly adjust_polynomial(const QuadPoly& p, const Vec& tau, const Vec& tau_prime,
                           const Vec& xi, const Vec& xi_prime, const Vec& nu_prime,
                           double pre_tol) {
  const int d = p.dim();
  const Vec ed = Vec::axis(d, d - 1);
  if (hyperplane_violation(p.hessian(), tau, xi, ed) > pre_tol)
    throw PreconditionError("adjust_polynomial: entry condition violated");
  double tmax = 0.0;
  for (int i = 0; i < d; ++i) tmax = std::max(tmax, std::fabs(tau_prime[i]));
  if (tmax < 1e-10)
    throw PreconditionError("adjust_polynomial: tau' vanishes");

  // stage 1: retarget (tau, xi) -> (tau', xi') on the flat hyperplane
  SymMatrix q = retarget_on_flat(p.hessian(), tau_prime, xi_prime);
  // stage 2: rotate the hyperplane: R nu' = e_d, impose the condition on the
  // rotated pair, then conjugate back
  const Rotation R = rotation_to_axis(nu_prime);
  SymMatrix q_rot = R.conjugate(q);
  q_rot = retarget_on_flat(q_rot, R.apply(tau_prime), R.apply(xi_prime));
  return QuadPoly(R.conjugate_transpose(q_rot));
}

Vec renormalize_direction(const Vec& nu_base, double g0, const Vec& correction,
                          double r_amp) {
  Vec v = g0 * nu_base + r_amp * correction;
  if (v.norm() < 1e-15)
    throw PreconditionError("renormalize_direction: zero direction");
  return v.normalized();
}

void FlatnessTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  if (records.empty()) return;
  const int d = records.front().nu.dim;
  out << "n,rho_n,r_n,eps_n";
  for (int a = 0; a < d; ++a) out << ",nu" << a;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out << ",M" << i << j;
  out << ",flag\n";
  char buf[64];
  for (const auto& r : records) {
    out << r.n;
    std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%.12g", r.rho_n, r.r_n, r.eps);
    out << buf;
    for (int a = 0; a < d; ++a) {
      std::snprintf(buf, sizeof buf, ",%.12g", r.nu[a]);
      out << buf;
    }
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        std::snprintf(buf, sizeof buf, ",%.12g", r.p.M(i, j));
        out << buf;
      }
    out << "," << r.flag << "\n";
  }
}

void FlatnessTrace::write_json(const std::string& path) const {
  nlohmann::json j;
  j["rho"] = rho;
  j["r0"] = r0;
  j["alpha"] = alpha;
  j["delta"] = delta;
  j["records"] = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json rec;
    rec["n"] = r.n;
    rec["rho_n"] = r.rho_n;
    rec["r_n"] = r.r_n;
    rec["eps_n"] = r.eps;
    const int d = r.nu.dim;
    std::vector<double> nu(d);
    for (int a = 0; a < d; ++a) nu[a] = r.nu[a];
    rec["nu"] = nu;
    std::vector<double> m;
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m.push_back(r.p.M(i, j));
    rec["M_upper"] = m;
    rec["flag"] = r.flag;
    j["records"].push_back(rec);
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << j.dump(2) << "\n";
}

void improve_flatness(const GridField& u, const Vec& x0, FlatnessTrace& trace,
                      const Problem& problem, const ImproveOpts& opts) {
  if (trace.records.empty())
    throw PreconditionError("improve_flatness: trace has no starting record");
  const TraceRecord& rec = trace.last();
  const int d = problem.op.dim;
  const double rho_n = rec.rho_n;
  const double r_n = rec.r_n;
  const double eps = rec.eps;

  const Problem pn = rescale_problem(problem, x0, rho_n);
  const Vec origin = Vec::zero(d);
  const double g0 = pn.law.g(origin, rec.nu);
  const Vec tau_n = compute_tau(pn.law, rec.nu, origin);
  const Vec xi_n = pn.law.grad_x(origin, rec.nu);

  TraceRecord next;
  next.n = rec.n + 1;
  next.rho_n = trace.rho * rho_n;
  next.r_n = trace.rho * r_n;

  if (eps <= opts.eps_floor) {
    // measured flatness at the floor: the step is a fixed point
    next.nu = rec.nu;
    next.p = trace.rho * rec.p;
    next.flag = "grid-floor";
  } else {
    const Rotation R = rotation_to_axis(rec.nu);
    // boundary data of the linearized function on the rotated half-ball
    const auto data = [&](const Vec& z) {
      const Vec y = R.apply_transpose(z);
      const Vec x = x0 + rho_n * y;
      const double uval = u.interp(x) / rho_n;
      const double model = g0 * y.dot(rec.nu) + rec.p(y);
      double val = (uval - model) / eps;
      return std::clamp(val, -1.0, 1.0);
    };
    ObliqueProblem ob;
    ob.op = linearize_operator(pn, rec.p, g0 * rec.nu, eps);
    // the linearization acts on Hessians in the rotated frame
    auto base_eval = ob.op.eval;
    Rotation Rc = R;
    ob.op.eval = [base_eval, Rc](const SymMatrix& m, const Vec& g, const Vec& x) {
      return base_eval(Rc.conjugate_transpose(m), g, x);
    };
    ob.tau = R.apply(tau_n);
    ob.h = opts.oblique_h;
    ObliqueSolveInfo info;
    const GridField utilde = solve_oblique(ob, data, &info, opts.oblique_tol);
    const Expansion exp = pointwise_expansion(utilde);

    const Vec nu_corr = R.apply_transpose(exp.grad0);
    const SymMatrix w_y = Rc.conjugate_transpose(exp.hess0);

    const Vec nu_next = renormalize_direction(rec.nu, g0, nu_corr, eps);
    const Vec tau_next = compute_tau(pn.law, nu_next, origin);
    const Vec xi_next = pn.law.grad_x(origin, nu_next);

    // polynomial update: add the Hessian correction, then retarget in the
    // frame where the current hyperplane is flat
    SymMatrix m_bar = rec.p.hessian() + eps * w_y;
    SymMatrix m_z = R.conjugate(m_bar);
    // entry condition is only approximate after the correction; project first
    m_z = retarget_on_flat(m_z, R.apply(tau_n), R.apply(xi_n));
    QuadPoly p_z(m_z);
    QuadPoly p_adj = adjust_polynomial(p_z, R.apply(tau_n), R.apply(tau_next),
                                       R.apply(xi_n), R.apply(xi_next), R.apply(nu_next));
    SymMatrix m_prime = R.conjugate_transpose(p_adj.hessian());

    // t-correction restores the interior condition at the new direction
    const Vec tp = tau_perp(tau_next);
    const SymMatrix dir = SymMatrix::outer(tp);
    const double g0_next = pn.law.g(origin, nu_next);
    const double target = pn.f(origin);
    const auto eval_t = [&](double t) {
      return pn.op.eval(m_prime + t * dir, g0_next * nu_next, origin) - target;
    };
    double t_lo = 0.0, t_hi = 0.0;
    const double v0 = eval_t(0.0);
    if (std::fabs(v0) > 1e-12) {
      const double step = std::fabs(v0) / pn.op.lambda + 1e-6;
      if (v0 > 0) {
        t_lo = -step;
        while (eval_t(t_lo) > 0) t_lo *= 2.0;
      } else {
        t_hi = step;
        while (eval_t(t_hi) < 0) t_hi *= 2.0;
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (std::fabs(eval_t(mid)) <= 1e-12) {
          t_lo = t_hi = mid;
          break;
        }
        (eval_t(mid) < 0 ? t_lo : t_hi) = mid;
      }
    }
    const double t = 0.5 * (t_lo + t_hi);
    next.nu = nu_next;
    next.p = trace.rho * QuadPoly(m_prime + t * dir);
  }

  // measure at the new scale; rescaled lattice samples need enough nodes
  const double ball_nodes = std::pow(2.0 * next.rho_n / u.h, d);
  if (ball_nodes < opts.min_samples) {
    next.eps = rec.eps;
    next.flag = "grid-floor";
    trace.records.push_back(next);
    return;
  }
  next.eps = measure_flatness(u, x0, next.rho_n, next.nu, next.p, problem);
  const double budget = std::pow(next.r_n, 1.0 + trace.alpha);
  if (next.eps > budget && next.flag.empty()) next.flag = "budget-exceeded";
  if (next.eps > rec.eps + 1e-12 && next.flag.empty()) next.flag = "not-decreasing";
  trace.records.push_back(next);
}

double delta_from_moduli(const Problem& problem, const Vec& x0, const IofConstants& c) {
  // rescaled sup norms of f and grad_x g must also sit below r0^2
  const auto sup_ok = [&](double delta) {
    const Problem pd = rescale_problem(problem, x0, delta);
    Rng rng(kDefaultSeed);
    const int d = problem.op.dim;
    double fs = 0.0, gs = 0.0;
    for (int k = 0; k < 200; ++k) {
      fs = std::max(fs, std::fabs(pd.f(rng.point_in_ball(d))));
      gs = std::max(gs, pd.law.grad_x(Vec::zero(d), rng.unit_vector(d)).norm());
    }
    const double cap = c.r0 * c.r0;
    return fs <= cap * (1 + 1e-9) && gs <= cap * (1 + 1e-9);
  };
  const auto ok = [&](double delta) {
    return measure_iof_moduli(problem, x0, delta, 0, c).pass() && sup_ok(delta);
  };
  double lo = 1e-3, hi = 1.0;
  if (ok(hi)) return hi;
  if (!ok(lo))
    throw PreconditionError("delta_from_moduli: moduli fail even at delta = 1e-3");
  for (int it = 0; it < 20; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

TaylorReport taylor_expand_at_fb(const GridField& u, const Vec& x0, const Problem& problem,
                                 const TaylorOpts& opts) {
  TaylorReport rep;
  const int d = problem.op.dim;
  IofConstants c{opts.rho, opts.r0, opts.alpha};
  const double delta = opts.delta > 0 ? opts.delta : delta_from_moduli(problem, x0, c);

  // flatness precondition at the delta scale
  const std::size_t node = u.nearest(x0);
  auto [slope, nu0] = one_sided_gradient(u, node);
  (void)slope;
  const Problem pd = rescale_problem(problem, x0, delta);
  QuadPoly p0 = construct_polynomial(pd, nu0);
  if (p0.sup_norm_b1() > opts.r0)
    throw PreconditionError("taylor_expand_at_fb: polynomial exceeds the radius budget");
  const double eps0 = measure_flatness(u, x0, delta, nu0, p0, problem);
  const double eps_max = delta * opts.r0 * opts.r0;
  if (eps0 > eps_max)
    throw PreconditionError("taylor_expand_at_fb: flatness precondition fails");

  FlatnessTrace trace;
  trace.rho = opts.rho;
  trace.r0 = opts.r0;
  trace.alpha = opts.alpha;
  trace.delta = delta;
  trace.records.push_back({0, delta, opts.r0, nu0, p0, eps0, ""});

  for (int n = 0; n < opts.max_steps; ++n) {
    improve_flatness(u, x0, trace, problem, opts.improve);
    const std::string& flag = trace.last().flag;
    if (flag == "grid-floor") break;
    if (flag == "not-decreasing") {
      rep.halted_early = true;
      break;
    }
  }

  const TraceRecord& last = trace.last();
  rep.nu = last.nu;
  rep.p_physical = QuadPoly((1.0 / last.rho_n) * last.p.hessian());
  const double g0 = problem.law.g(x0, rep.nu);

  // sup-norm error of the expansion over shrinking balls
  for (const auto& recd : trace.records) {
    const double r = recd.rho_n;
    double sup = 0.0;
    bool any = false;
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
      if (u.mask[idx] == NodeMask::exterior) continue;
      const Vec x = u.coord(idx);
      if ((x - x0).norm() > r) continue;
      if (u.values[idx] <= 0.0) continue;
      const Vec y = x - x0;
      const double model = g0 * y.dot(rep.nu) + rep.p_physical(y);
      sup = std::max(sup, std::fabs(u.values[idx] - model));
      any = true;
    }
    if (!any) continue;
    rep.radii.push_back(r);
    rep.sup_errors.push_back(sup);
  }
  const ExponentFit fit = fit_exponent(rep.radii, rep.sup_errors, 1e-12);
  rep.exponent = fit.exponent;
  rep.resolution_bound = fit.floored;
  rep.trace = std::move(trace);
  return rep;
}

}  // namespace fbx
