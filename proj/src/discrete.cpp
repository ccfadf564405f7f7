#include "fbxlab/discrete.hpp"

#include <algorithm>
#include <cmath>

#include "fbxlab/errors.hpp"

namespace fbx {

std::vector<Vec> default_directions(int dim) {
  std::vector<Vec> dirs;
  for (int a = 0; a < dim; ++a) dirs.push_back(Vec::axis(dim, a));
  if (dim == 2) {
    dirs.push_back(Vec{1, 1});
    dirs.push_back(Vec{1, -1});
  } else if (dim == 3) {
    dirs.push_back(Vec{1, 1, 0});
    dirs.push_back(Vec{1, -1, 0});
    dirs.push_back(Vec{1, 0, 1});
    dirs.push_back(Vec{1, 0, -1});
    dirs.push_back(Vec{0, 1, 1});
    dirs.push_back(Vec{0, 1, -1});
  }
  return dirs;
}

DiscreteProblem make_discrete(const Problem& prob, Scheme scheme) {
  DiscreteProblem dp;
  dp.prob = prob;
  dp.scheme = scheme;
  dp.directions = default_directions(prob.op.dim);
  return dp;
}

Stencil::Stencil(const GridField& g, const DiscreteProblem& dp)
    : dp_(&dp), dim_(g.dim), h_(g.h), scheme_(dp.scheme) {
  const std::ptrdiff_t stride[3] = {
      static_cast<std::ptrdiff_t>(g.n[1]) * g.n[2], g.n[2], 1};
  ndir_ = static_cast<int>(dp.directions.size());
  if (ndir_ > 16) throw InvalidInput("stencil: too many directions");
  for (int k = 0; k < ndir_; ++k) {
    const Vec& v = dp.directions[k];
    std::ptrdiff_t o = 0;
    for (int a = 0; a < dim_; ++a) o += static_cast<std::ptrdiff_t>(std::lround(v[a])) * stride[a];
    off_[k] = o;
    inv_h2_[k] = 1.0 / (h_ * h_ * v.norm2());
    unit_[k] = v.normalized();
  }
  for (int a = 0; a < dim_; ++a) axis_off_[a] = stride[a];
  fast_ndir_ = dp.prob.op.wide_fast ? dim_ : ndir_;

  // orthogonal frames drawn from the default direction sets
  frames_.clear();
  Frame axis;
  axis.count = dim_;
  for (int a = 0; a < dim_; ++a) axis.dir[a] = a;
  frames_.push_back(axis);
  if (dim_ == 2 && ndir_ >= 4) {
    frames_.push_back({2, {2, 3, 0}});
  } else if (dim_ == 3 && ndir_ >= 9) {
    frames_.push_back({3, {3, 4, 2}});
    frames_.push_back({3, {5, 6, 1}});
    frames_.push_back({3, {7, 8, 0}});
  }

  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      mixed_.push_back({i, j, stride[i] + stride[j], stride[i] - stride[j],
                        -stride[i] + stride[j], -stride[i] - stride[j]});

  const OperatorSpec& op = dp.prob.op;
  theta_ = h_ * h_ / (2.0 * dim_ * op.Lambda + h_ * op.lip_grad);
}

bool Stencil::stencil_ok(const GridField& u, std::size_t idx) const {
  const auto check = [&](std::ptrdiff_t o) {
    const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(idx) + o;
    return j >= 0 && j < static_cast<std::ptrdiff_t>(u.size()) &&
           u.mask[j] != NodeMask::exterior;
  };
  if (scheme_ == Scheme::wide_stencil) {
    for (int k = 0; k < ndir_; ++k)
      if (!check(off_[k]) || !check(-off_[k])) return false;
  } else {
    for (int a = 0; a < dim_; ++a)
      if (!check(axis_off_[a]) || !check(-axis_off_[a])) return false;
    for (const auto& m : mixed_)
      if (!check(m.pp) || !check(m.pm) || !check(m.mp) || !check(m.mm)) return false;
  }
  return true;
}

bool Stencil::neighbors_above(const GridField& u, std::size_t idx, double thr) const {
  const double* v = u.values.data();
  if (scheme_ == Scheme::wide_stencil) {
    for (int k = 0; k < ndir_; ++k)
      if (v[idx + off_[k]] <= thr || v[idx - off_[k]] <= thr) return false;
  } else {
    for (int a = 0; a < dim_; ++a)
      if (v[idx + axis_off_[a]] <= thr || v[idx - axis_off_[a]] <= thr) return false;
    for (const auto& m : mixed_)
      if (v[idx + m.pp] <= thr || v[idx + m.pm] <= thr || v[idx + m.mp] <= thr ||
          v[idx + m.mm] <= thr)
        return false;
  }
  return true;
}

Vec Stencil::gradient(const GridField& u, std::size_t idx) const {
  const double* v = u.values.data();
  Vec g(dim_);
  for (int a = 0; a < dim_; ++a)
    g[a] = (v[idx + axis_off_[a]] - v[idx - axis_off_[a]]) / (2.0 * h_);
  return g;
}

SymMatrix Stencil::central_hessian(const GridField& u, std::size_t idx) const {
  const double* v = u.values.data();
  const double c = v[idx];
  SymMatrix m(dim_);
  const double ih2 = 1.0 / (h_ * h_);
  for (int a = 0; a < dim_; ++a)
    m.at(a, a) = (v[idx + axis_off_[a]] - 2.0 * c + v[idx - axis_off_[a]]) * ih2;
  for (const auto& mp : mixed_)
    m.at(mp.i, mp.j) =
        (v[idx + mp.pp] - v[idx + mp.pm] - v[idx + mp.mp] + v[idx + mp.mm]) * (0.25 * ih2);
  return m;
}

double Stencil::evaluate_central(const GridField& u, std::size_t idx) const {
  return dp_->prob.op.eval(central_hessian(u, idx), gradient(u, idx), u.coord(idx));
}

double Stencil::evaluate_wide(const GridField& u, std::size_t idx) const {
  const double* v = u.values.data();
  const double c = v[idx];
  double delta[16];
  const int need = dp_->prob.op.wide_fast ? fast_ndir_ : ndir_;
  for (int k = 0; k < need; ++k)
    delta[k] = (v[idx + off_[k]] - 2.0 * c + v[idx - off_[k]]) * inv_h2_[k];
  const Vec x = u.coord(idx);
  Vec g(dim_);
  for (int a = 0; a < dim_; ++a)
    g[a] = (v[idx + axis_off_[a]] - v[idx - axis_off_[a]]) / (2.0 * h_);
  const OperatorSpec& op = dp_->prob.op;
  if (op.wide_fast) return op.wide_fast(delta, need, g, x);

  double best = 0.0;
  bool first = true;
  for (const auto& fr : frames_) {
    SymMatrix m(dim_);
    for (int t = 0; t < fr.count; ++t) {
      const int k = fr.dir[t];
      const Vec& e = unit_[k];
      for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j) m.at(i, j) += delta[k] * e[i] * e[j];
    }
    const double val = op.eval(m, g, x);
    if (first) {
      best = val;
      first = false;
    } else if (op.concavity == Concavity::convex) {
      best = std::max(best, val);
    } else if (op.concavity == Concavity::concave) {
      best = std::min(best, val);
    }
    if (op.concavity == Concavity::neither) break;  // axis frame only
  }
  return best;
}

double Stencil::evaluate(const GridField& u, std::size_t idx) const {
  return scheme_ == Scheme::wide_stencil ? evaluate_wide(u, idx)
                                         : evaluate_central(u, idx);
}

double Stencil::residual(const GridField& u, std::size_t idx) const {
  return evaluate(u, idx) - dp_->prob.f(u.coord(idx));
}

double evaluate_F(const GridField& u, const DiscreteProblem& dp, std::size_t idx) {
  Stencil st(u, dp);
  if (!st.stencil_ok(u, idx)) throw StencilError("evaluate_F: stencil escapes mask");
  return st.evaluate(u, idx);
}

SweepInfo relax_field(GridField& u, const DiscreteProblem& dp,
                      const std::vector<std::size_t>& active, const RelaxOpts& opts) {
  Stencil st(u, dp);
  SweepInfo info;
  if (active.empty()) {
    info.converged = true;
    return info;
  }
  const double step = opts.omega * st.theta();
  double unorm = std::max(1.0, u.max_abs());

  for (long sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double max_update = 0.0;
    for (std::size_t idx : active) {
      const double r = st.residual(u, idx);
      double unew = u.values[idx] + step * r;
      if (opts.clamp_nonneg && unew < 0.0) unew = 0.0;
      if (opts.upper_first_pass && sweep == 1 && unew > opts.upper_first_pass->values[idx])
        unew = opts.upper_first_pass->values[idx];
      max_update = std::max(max_update, std::fabs(unew - u.values[idx]));
      u.values[idx] = unew;
    }
    const double res = max_update / step;
    if (opts.record_history && (sweep % 100 == 0 || sweep == 1)) info.history.push_back(res);
    if (sweep % 64 == 0) unorm = std::max(1.0, u.max_abs());
    if (res <= opts.tol * unorm) {
      info.sweeps = sweep;
      info.converged = true;
      break;
    }
  }
  if (!info.converged)
    throw NonConvergence("relax_field: sweep cap exceeded", info.history);

  // true residual after convergence; at clamped zeros only F > f counts
  double res = 0.0;
  for (std::size_t idx : active) {
    const double r = st.residual(u, idx);
    if (opts.clamp_nonneg && u.values[idx] <= 0.0)
      res = std::max(res, std::max(r, 0.0));
    else
      res = std::max(res, std::fabs(r));
  }
  info.residual = res;
  return info;
}

GridField solve_interior(const DiscreteProblem& dp, const GridField& domain,
                         const RelaxOpts& opts) {
  GridField u = domain;
  Stencil st(u, dp);
  std::vector<std::size_t> active;
  for (std::size_t idx = 0; idx < u.size(); ++idx)
    if (u.mask[idx] == NodeMask::interior) active.push_back(idx);
  for (std::size_t idx : active)
    if (!st.stencil_ok(u, idx))
      throw StencilError("solve_interior: interior stencil escapes mask");
  relax_field(u, dp, active, opts);
  return u;
}

}  // namespace fbx
