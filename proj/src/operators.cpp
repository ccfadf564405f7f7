#include "fbxlab/operators.hpp"

#include <algorithm>
#include <cmath>

#include "fbxlab/errors.hpp"

namespace fbx {

double pucci_plus(const SymMatrix& n, double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda))
    throw InvalidInput("pucci: need 0 < lambda <= Lambda");
  if (!n.finite()) throw InvalidInput("pucci: non-finite matrix entries");
  double ev[SymMatrix::kMaxDim];
  n.eigenvalues(ev);
  double s = 0;
  for (int i = 0; i < n.dim(); ++i) s += (ev[i] > 0 ? Lambda : lambda) * ev[i];
  return s;
}

double pucci_minus(const SymMatrix& n, double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda))
    throw InvalidInput("pucci: need 0 < lambda <= Lambda");
  if (!n.finite()) throw InvalidInput("pucci: non-finite matrix entries");
  double ev[SymMatrix::kMaxDim];
  n.eigenvalues(ev);
  double s = 0;
  for (int i = 0; i < n.dim(); ++i) s += (ev[i] > 0 ? lambda : Lambda) * ev[i];
  return s;
}

namespace {

SymMatrix random_sym(Rng& rng, int d, double amp = 1.0) {
  SymMatrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) m.at(i, j) = amp * rng.uniform();
  return m;
}

}  // namespace

bool check_zero_at_zero(const OperatorSpec& op, int samples, double tol,
                        std::uint64_t seed) {
  Rng rng(seed);
  const SymMatrix z = SymMatrix::zero(op.dim);
  const Vec zv = Vec::zero(op.dim);
  for (int k = 0; k < samples; ++k) {
    Vec x = rng.point_in_ball(op.dim);
    if (std::fabs(op(z, zv, x)) > tol) return false;
  }
  return true;
}

SandwichReport check_pucci_sandwich(const OperatorSpec& op, int samples,
                                    std::uint64_t seed) {
  Rng rng(seed);
  SandwichReport rep;
  rep.samples = samples;
  for (int k = 0; k < samples; ++k) {
    SymMatrix m = random_sym(rng, op.dim);
    SymMatrix n = random_sym(rng, op.dim);
    Vec xi = rng.vector(op.dim);
    Vec eta = rng.vector(op.dim);
    Vec x = rng.point_in_ball(op.dim);
    const double diff = op(m + n, xi, x) - op(m, eta, x);
    const double slack = op.lip_grad * (xi - eta).norm();
    const double lo = pucci_minus(n, op.lambda, op.Lambda) - slack;
    const double hi = pucci_plus(n, op.lambda, op.Lambda) + slack;
    const double scale = 1.0 + std::fabs(lo) + std::fabs(hi);
    const double excess = std::max(lo - diff, diff - hi) / scale;
    rep.worst_excess = std::max(rep.worst_excess, excess);
    if (excess > 1e-10) rep.pass = false;
  }
  return rep;
}

bool check_concavity(const OperatorSpec& op, int samples, std::uint64_t seed) {
  if (op.concavity == Concavity::neither) return true;
  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    SymMatrix m1 = random_sym(rng, op.dim);
    SymMatrix m2 = random_sym(rng, op.dim);
    Vec xi = rng.vector(op.dim);
    Vec x = rng.point_in_ball(op.dim);
    const double mid = op(0.5 * (m1 + m2), xi, x);
    const double avg = 0.5 * op(m1, xi, x) + 0.5 * op(m2, xi, x);
    const double tol = 1e-12 * (1.0 + std::fabs(mid) + std::fabs(avg));
    if (op.concavity == Concavity::concave && mid < avg - tol) return false;
    if (op.concavity == Concavity::convex && mid > avg + tol) return false;
  }
  return true;
}

bool check_spherical_gradient(const BoundaryLaw& law, int samples, double step,
                              double tol, std::uint64_t seed) {
  Rng rng(seed);
  for (int k = 0; k < samples; ++k) {
    Vec x = rng.point_in_ball(law.dim, 0.9);
    Vec nu = rng.unit_vector(law.dim);
    Vec gt = law.grad_theta(x, nu);
    for (int j = 0; j < law.dim; ++j) {
      Vec t = Vec::axis(law.dim, j) - nu.dot(Vec::axis(law.dim, j)) * nu;
      double tn = t.norm();
      if (tn < 1e-8) continue;
      t *= 1.0 / tn;
      const Vec np = unit(nu + step * t);
      const Vec nm = unit(nu - step * t);
      const double fd = (law.g(x, np) - law.g(x, nm)) / (2.0 * step);
      // tangential projection of grad_theta is what the sphere derivative sees
      const Vec gt_t = gt - nu.dot(gt) * nu;
      if (std::fabs(fd - gt_t.dot(t)) > tol) return false;
    }
  }
  return true;
}

Vec compute_tau(const BoundaryLaw& law, const Vec& nu, const Vec& x0) {
  if (std::fabs(nu.norm() - 1.0) > 1e-12)
    throw PreconditionError("compute_tau: nu is not a unit vector");
  const double g0 = law.g(x0, nu);
  if (g0 <= 0.0)
    throw Error("compute_tau: boundary law not bounded below (g <= 0)");
  const Vec gt = law.grad_theta(x0, nu);
  return nu + (1.0 / g0) * (gt.dot(nu) * nu - gt);
}

double RescaledProblem::F(const SymMatrix& m, const Vec& xi, const Vec& x) const {
  return rho * base->op.eval((1.0 / rho) * m, xi, x0 + rho * x);
}
double RescaledProblem::f(const Vec& x) const { return rho * base->f(x0 + rho * x); }
double RescaledProblem::g(const Vec& x, const Vec& nu) const {
  return base->law.g(x0 + rho * x, nu);
}

Problem RescaledProblem::materialize() const {
  return rescale_problem(*base, x0, rho);
}

RescaledProblem rescale(const Problem& problem, const Vec& x0, double rho) {
  if (!(rho > 0.0) || rho > 1.0) throw PreconditionError("rescale: rho must be in (0,1]");
  if (x0.norm() + rho > 1.0 + 1e-12)
    throw DomainError("rescale: ball of radius rho around x0 escapes B_1");
  RescaledProblem r;
  r.base = std::make_shared<Problem>(problem);
  r.x0 = x0;
  r.rho = rho;
  return r;
}

Problem rescale_problem(const Problem& problem, const Vec& x0, double rho) {
  if (!(rho > 0.0) || rho > 1.0) throw PreconditionError("rescale: rho must be in (0,1]");
  if (x0.norm() + rho > 1.0 + 1e-12)
    throw DomainError("rescale: ball of radius rho around x0 escapes B_1");
  auto base = std::make_shared<Problem>(problem);
  Problem out;
  out.op = base->op;
  out.op.lip_grad = rho * base->op.lip_grad;
  out.op.holder_seminorm = std::pow(rho, base->op.holder_beta) * base->op.holder_seminorm;
  out.op.name = base->op.name;
  out.op.eval = [base, x0, rho](const SymMatrix& m, const Vec& xi, const Vec& x) {
    return rho * base->op.eval((1.0 / rho) * m, xi, x0 + rho * x);
  };
  if (base->op.wide_fast) {
    // rho * F(rho^-1 M, ...) applied to frame matrices scales the second
    // differences by rho^-1 and the result by rho; for the linear fast paths
    // this is the identity, but gradient terms still see the shifted point.
    out.op.wide_fast = nullptr;
  }
  out.f = [base, x0, rho](const Vec& x) { return rho * base->f(x0 + rho * x); };
  out.law.dim = base->law.dim;
  out.law.gamma0 = base->law.gamma0;
  out.law.name = base->law.name;
  out.law.g = [base, x0, rho](const Vec& x, const Vec& nu) {
    return base->law.g(x0 + rho * x, nu);
  };
  out.law.grad_x = [base, x0, rho](const Vec& x, const Vec& nu) {
    return rho * base->law.grad_x(x0 + rho * x, nu);
  };
  out.law.grad_theta = [base, x0, rho](const Vec& x, const Vec& nu) {
    return base->law.grad_theta(x0 + rho * x, nu);
  };
  return out;
}

ModulusReport measure_iof_moduli(const Problem& problem, const Vec& x0, double delta,
                                 int n, const IofConstants& c, int samples,
                                 std::uint64_t seed) {
  if (!(delta > 0.0) || delta > 1.0)
    throw PreconditionError("measure_iof_moduli: delta must be in (0,1]");
  if (n < 0) throw PreconditionError("measure_iof_moduli: n must be >= 0");
  const double rho_n = delta * std::pow(c.rho, n);
  const double r_n = c.r0 * std::pow(c.rho, n);
  Problem pn = rescale_problem(problem, x0, rho_n);
  const int d = problem.op.dim;
  const double beta = problem.op.holder_beta;
  Rng rng(seed);

  ModulusReport rep;
  rep.n = n;
  rep.scale = rho_n;
  rep.budget = r_n;

  // HP1a: Lipschitz modulus of F_n in the gradient slot.
  double lip = 0.0;
  // HP1b: x-Holder modulus relative to r_n^beta (r_n + r_n|xi| + |M|).
  double hold = 0.0;
  const Vec origin = Vec::zero(d);
  for (int k = 0; k < samples; ++k) {
    SymMatrix m(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) m.at(i, j) = rng.uniform();
    Vec xi = rng.vector(d);
    Vec eta = rng.vector(d);
    Vec x = rng.point_in_ball(d);
    const double dgrad = (xi - eta).norm();
    if (dgrad > 1e-12)
      lip = std::max(lip, std::fabs(pn.op.eval(m, xi, x) - pn.op.eval(m, eta, x)) / dgrad);
    const double dx = std::fabs(pn.op.eval(m, xi, x) - pn.op.eval(m, xi, origin));
    const double denom = std::pow(r_n, beta) *
                         (r_n + r_n * xi.norm() + std::max(m.norm_inf(), 1e-12));
    hold = std::max(hold, dx / denom);
  }
  rep.entries.push_back({"F_lip_grad (HP1)", lip, r_n, lip <= r_n * (1.0 + 1e-9)});
  rep.entries.push_back({"F_x_holder_ratio (HP1)", hold, 1.0, hold <= 1.0 + 1e-9});

  // HP2: sup |f_n - f_n(0)| over B_1.
  double fmod = 0.0;
  const double f0 = pn.f(origin);
  for (int k = 0; k < samples * 5; ++k)
    fmod = std::max(fmod, std::fabs(pn.f(rng.point_in_ball(d)) - f0));
  const double fbound = std::pow(r_n, 1.0 + beta);
  rep.entries.push_back({"f_modulus (HP2)", fmod, fbound, fmod <= fbound * (1.0 + 1e-9)});

  // HP3: sup over directions of |grad_x g_n(0, nu)|.
  double gmod = 0.0;
  for (int k = 0; k < samples; ++k)
    gmod = std::max(gmod, pn.law.grad_x(origin, rng.unit_vector(d)).norm());
  rep.entries.push_back({"grad_x_g (HP3)", gmod, r_n, gmod <= r_n * (1.0 + 1e-9)});

  return rep;
}

// ---------------------------------------------------------------------------
// Built-in registry

OperatorSpec make_laplace(int d) {
  OperatorSpec op;
  op.dim = d;
  op.lambda = 1.0;
  op.Lambda = 1.0;
  op.concavity = Concavity::concave;  // linear: both concave and convex
  op.name = "laplace";
  op.eval = [](const SymMatrix& m, const Vec&, const Vec&) { return m.trace(); };
  op.wide_fast = [d](const double* delta, int ndir, const Vec&, const Vec&) {
    (void)ndir;
    double s = 0;
    for (int k = 0; k < d; ++k) s += delta[k];  // axis directions come first
    return s;
  };
  return op;
}

OperatorSpec make_pucci_minus_op(int d, double lambda, double Lambda) {
  OperatorSpec op;
  op.dim = d;
  op.lambda = lambda;
  op.Lambda = Lambda;
  op.concavity = Concavity::concave;
  op.name = "pucci_minus";
  op.eval = [lambda, Lambda](const SymMatrix& m, const Vec&, const Vec&) {
    return pucci_minus(m, lambda, Lambda);
  };
  return op;
}

OperatorSpec make_pucci_plus_op(int d, double lambda, double Lambda) {
  OperatorSpec op;
  op.dim = d;
  op.lambda = lambda;
  op.Lambda = Lambda;
  op.concavity = Concavity::convex;
  op.name = "pucci_plus";
  op.eval = [lambda, Lambda](const SymMatrix& m, const Vec&, const Vec&) {
    return pucci_plus(m, lambda, Lambda);
  };
  return op;
}

OperatorSpec make_bellman_min(int d, double lambda, double Lambda) {
  // A1 = diag(Lambda, lambda, ..., lambda), A2 = diag(lambda, Lambda, ..., lambda)
  // for d >= 2; in 1d the two coefficients are lambda and Lambda.
  Vec a1(d), a2(d);
  for (int i = 0; i < d; ++i) {
    a1[i] = (i == 0) ? Lambda : lambda;
    a2[i] = (i == std::min(1, d - 1)) ? Lambda : lambda;
  }
  if (d == 1) {
    a1[0] = lambda;
    a2[0] = Lambda;
  }
  OperatorSpec op;
  op.dim = d;
  op.lambda = lambda;
  op.Lambda = Lambda;
  op.concavity = Concavity::concave;
  op.name = "bellman";
  op.eval = [a1, a2, d](const SymMatrix& m, const Vec&, const Vec&) {
    double t1 = 0, t2 = 0;
    for (int i = 0; i < d; ++i) {
      // diagonal coefficient matrices: tr(A M) = sum_i A_ii M_ii
      t1 += a1[i] * m(i, i);
      t2 += a2[i] * m(i, i);
    }
    return std::min(t1, t2);
  };
  op.wide_fast = [a1, a2, d](const double* delta, int ndir, const Vec&, const Vec&) {
    (void)ndir;
    double t1 = 0, t2 = 0;
    for (int k = 0; k < d; ++k) {
      t1 += a1[k] * delta[k];
      t2 += a2[k] * delta[k];
    }
    return std::min(t1, t2);
  };
  return op;
}

OperatorSpec operator_by_name(const std::string& name, int d, double lambda,
                              double Lambda) {
  if (name == "laplace") return make_laplace(d);
  if (name == "pucci_minus") return make_pucci_minus_op(d, lambda, Lambda);
  if (name == "pucci_plus") return make_pucci_plus_op(d, lambda, Lambda);
  if (name == "bellman") return make_bellman_min(d, lambda, Lambda);
  throw InvalidInput("unknown operator: " + name);
}

std::vector<std::string> operator_names() {
  return {"laplace", "pucci_minus", "pucci_plus", "bellman"};
}

BoundaryLaw make_constant_law(int d, double g0) {
  if (!(g0 > 0)) throw InvalidInput("boundary law: g0 must be positive");
  BoundaryLaw law;
  law.dim = d;
  law.gamma0 = g0;
  law.name = "const";
  law.g = [g0](const Vec&, const Vec&) { return g0; };
  law.grad_x = [d](const Vec&, const Vec&) { return Vec::zero(d); };
  law.grad_theta = [d](const Vec&, const Vec&) { return Vec::zero(d); };
  return law;
}

BoundaryLaw make_linear_x_law(int d, double g0, const Vec& a) {
  BoundaryLaw law;
  law.dim = d;
  law.gamma0 = g0 - a.norm();  // over the closed unit ball
  if (!(law.gamma0 > 0)) throw InvalidInput("boundary law: violates H1 on B_1");
  law.name = "linear_x";
  law.g = [g0, a](const Vec& x, const Vec&) { return g0 + a.dot(x); };
  law.grad_x = [a](const Vec&, const Vec&) { return a; };
  law.grad_theta = [d](const Vec&, const Vec&) { return Vec::zero(d); };
  return law;
}

BoundaryLaw make_angular_law(int d, double g0, double eps, int axis) {
  BoundaryLaw law;
  law.dim = d;
  law.gamma0 = g0 * (1.0 - std::fabs(eps));
  if (!(law.gamma0 > 0)) throw InvalidInput("boundary law: violates H1");
  law.name = "angular";
  law.g = [g0, eps, axis](const Vec&, const Vec& nu) { return g0 * (1.0 + eps * nu[axis]); };
  law.grad_x = [d](const Vec&, const Vec&) { return Vec::zero(d); };
  law.grad_theta = [g0, eps, axis, d](const Vec&, const Vec&) {
    Vec v = Vec::zero(d);
    v[axis] = g0 * eps;
    return v;
  };
  return law;
}

BoundaryLaw law_by_name(const std::string& name, int d, const std::vector<double>& p) {
  if (name == "const") return make_constant_law(d, p.empty() ? 1.0 : p[0]);
  if (name == "linear_x") {
    Vec a(d);
    for (int i = 0; i < d && i + 1 < (int)p.size(); ++i) a[i] = p[i + 1];
    return make_linear_x_law(d, p.empty() ? 1.0 : p[0], a);
  }
  if (name == "angular")
    return make_angular_law(d, p.size() > 0 ? p[0] : 1.0, p.size() > 1 ? p[1] : 0.0);
  throw InvalidInput("unknown boundary law: " + name);
}

}  // namespace fbx
