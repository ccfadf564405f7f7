#include "fbxlab/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "fbxlab/barriers.hpp"
#include "fbxlab/errors.hpp"

namespace fbx {

namespace {

std::array<std::ptrdiff_t, 3> strides(const GridField& g) {
  return {static_cast<std::ptrdiff_t>(g.n[1]) * g.n[2], g.n[2], 1};
}

bool node_positive(const GridField& u, std::size_t idx, double thr) {
  return u.mask[idx] != NodeMask::exterior && u.values[idx] > thr;
}

DiscreteProblem wide_variant(const DiscreteProblem& dp) {
  DiscreteProblem w = dp;
  w.scheme = Scheme::wide_stencil;
  if (w.directions.empty()) w.directions = default_directions(dp.prob.op.dim);
  return w;
}

}  // namespace

std::pair<double, Vec> one_sided_gradient(const GridField& u, std::size_t idx) {
  const auto s = strides(u);
  const double u0 = u.values[idx];
  Vec g(u.dim);
  for (int a = 0; a < u.dim; ++a) {
    const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(idx);
    const std::ptrdiff_t ip = i + s[a], im = i - s[a];
    const bool has_p = ip >= 0 && ip < static_cast<std::ptrdiff_t>(u.size()) &&
                       u.mask[ip] != NodeMask::exterior;
    const bool has_m = im >= 0 && im < static_cast<std::ptrdiff_t>(u.size()) &&
                       u.mask[im] != NodeMask::exterior;
    const double up = has_p ? u.values[ip] : u0;
    const double um = has_m ? u.values[im] : u0;
    g[a] = (up >= um) ? (up - u0) / u.h : (u0 - um) / u.h;
  }
  const double slope = g.norm();
  Vec dir = slope > 0 ? (1.0 / slope) * g : Vec::axis(u.dim, u.dim - 1);
  return {slope, dir};
}

std::vector<std::size_t> free_boundary_nodes(const GridField& u, double thr) {
  const auto s = strides(u);
  std::vector<std::size_t> out;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (u.mask[idx] != NodeMask::interior || u.values[idx] <= thr) continue;
    bool fb = false;
    for (int a = 0; a < u.dim && !fb; ++a) {
      for (int sgn = -1; sgn <= 1 && !fb; sgn += 2) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(idx) + sgn * s[a];
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(u.size())) continue;
        if (u.mask[j] == NodeMask::exterior) continue;
        if (u.values[j] <= thr) fb = true;
      }
    }
    if (fb) out.push_back(idx);
  }
  return out;
}

namespace {

ResidualReport verify_impl(const GridField& w, const DiscreteProblem& dp, bool super) {
  ResidualReport rep;
  const double thr = dp.fb_threshold(w.h);
  const Stencil st(w, dp);
  const double slope_cutoff = std::sqrt(w.h);
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    if (w.mask[idx] != NodeMask::interior || w.values[idx] <= thr) continue;
    if (st.stencil_ok(w, idx) && st.neighbors_above(w, idx, thr)) {
      const double r = st.residual(w, idx);
      const double viol = super ? std::max(r, 0.0) : std::max(-r, 0.0);
      if (viol > rep.interior_violation) {
        rep.interior_violation = viol;
        rep.worst_interior_node = idx;
      }
    }
  }
  for (std::size_t idx : free_boundary_nodes(w, thr)) {
    FbRecord rec;
    rec.node = idx;
    auto [slope, dir] = one_sided_gradient(w, idx);
    rec.slope = slope;
    rec.direction = dir;
    rec.g_value = dp.prob.law.g(w.coord(idx), dir);
    rec.excess = super ? std::max(slope - rec.g_value, 0.0)
                       : std::max(rec.g_value - slope, 0.0);
    if (slope >= slope_cutoff) {
      rec.tag = FbTag::gradient;
    } else if (w.max_on_ball(w.coord(idx), w.h * 1.7321) <= slope_cutoff * w.h) {
      rec.tag = FbTag::vanishing;
    } else {
      rec.tag = FbTag::neither;
    }
    rep.max_fb_excess = std::max(rep.max_fb_excess, rec.excess);
    rep.fb.push_back(rec);
  }
  return rep;
}

}  // namespace

ResidualReport verify_supersolution(const GridField& w, const DiscreteProblem& dp) {
  return verify_impl(w, dp, true);
}
ResidualReport verify_subsolution(const GridField& w, const DiscreteProblem& dp) {
  return verify_impl(w, dp, false);
}

GridField obstacle_replace(const GridField& w, const DiscreteProblem& dp, double tol,
                           SweepInfo* info, const std::vector<std::size_t>* local_seed,
                           double local_radius) {
  GridField out = w;
  DiscreteProblem wd = wide_variant(dp);
  std::vector<std::size_t> active;
  if (local_seed && local_radius > 0) {
    // nodes of the positivity set within reach of the seed set
    std::vector<Vec> centers;
    centers.reserve(local_seed->size());
    for (auto idx : *local_seed) centers.push_back(w.coord(idx));
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
      if (w.mask[idx] != NodeMask::interior || w.values[idx] <= 0.0) continue;
      const Vec x = w.coord(idx);
      for (const Vec& c : centers) {
        if ((x - c).norm() <= local_radius) {
          active.push_back(idx);
          break;
        }
      }
    }
  } else {
    for (std::size_t idx = 0; idx < w.size(); ++idx)
      if (w.mask[idx] == NodeMask::interior && w.values[idx] > 0.0) active.push_back(idx);
  }
  RelaxOpts opts;
  opts.tol = tol;
  opts.clamp_nonneg = true;
  opts.upper_first_pass = &w;
  SweepInfo si = relax_field(out, wd, active, opts);
  if (info) *info = si;
  return out;
}

GridField min_supersolutions(const GridField& w1, const GridField& w2) {
  if (w1.dim != w2.dim || w1.n != w2.n || std::fabs(w1.h - w2.h) > 1e-15)
    throw GridMismatch("min_supersolutions: incompatible grids");
  GridField out = w1;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = std::min(w1.values[i], w2.values[i]);
  return out;
}

CarveResult carve(const GridField& w, std::size_t fb_node, const DiscreteProblem& dp,
                  const CarveParams& params, double d2_estimate) {
  CarveResult res{w, false, ""};
  const double h = w.h;
  const Vec x0 = w.coord(fb_node);
  const double r = params.ball_factor * h;
  const double sigma = params.sigma;
  const double margin = params.margin_factor * h * (1.0 + d2_estimate);

  auto [slope, nu] = one_sided_gradient(w, fb_node);
  const double gval = dp.prob.law.g(x0, nu);
  if (slope > gval - margin) {
    res.skip_reason = "no subsolution violation at margin";
    return res;
  }
  // gradient estimate needs the axis neighbors; exterior contact disqualifies
  {
    const auto s = strides(w);
    for (int a = 0; a < w.dim; ++a) {
      const std::ptrdiff_t ip = static_cast<std::ptrdiff_t>(fb_node) + s[a];
      const std::ptrdiff_t im = static_cast<std::ptrdiff_t>(fb_node) - s[a];
      if (ip < 0 || ip >= static_cast<std::ptrdiff_t>(w.size()) ||
          im < 0 || im >= static_cast<std::ptrdiff_t>(w.size()) ||
          (w.mask[ip] == NodeMask::exterior && w.mask[im] == NodeMask::exterior))
        throw PreconditionError("carve: gradient estimate unreliable at this node");
    }
  }

  const double reach = stencil_reach(w.dim, h);
  const auto omega = [](double t) { return std::clamp((0.5 - t) / 0.25, 0.0, 1.0); };
  const auto plane = [&](const Vec& x) {
    return slope * std::max(0.0, (x - x0).dot(nu) + sigma * r);
  };
  const auto in_domain = [&](const Vec& x) {
    const Vec y = (1.0 / r) * (x - x0);
    return y.dot(nu) > -sigma + 2.0 * sigma * omega(y.norm());
  };

  GridField v = w;
  std::vector<std::size_t> ball, active;
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    if (w.mask[idx] == NodeMask::exterior) continue;
    const Vec x = w.coord(idx);
    if ((x - x0).norm() > r) continue;
    ball.push_back(idx);
    const bool inner = (x - x0).norm() <= r - reach;
    if (w.mask[idx] == NodeMask::dirichlet) {
      // keep the datum
    } else if (!inner) {
      // frozen ring carries the planar data; feasibility w <= data + slack
      const double data = plane(x);
      if (w.values[idx] > data + 0.5 * slope * sigma * r + 10.0 * h * h) {
        res.skip_reason = "ring data below current supersolution";
        return res;
      }
      v.values[idx] = data;
    } else if (!in_domain(x)) {
      v.values[idx] = 0.0;
    } else {
      v.values[idx] = std::min(w.values[idx], plane(x));
      active.push_back(idx);
    }
  }
  if (active.empty()) {
    res.skip_reason = "carve ball has no active nodes";
    return res;
  }

  DiscreteProblem wd = wide_variant(dp);
  RelaxOpts opts;
  opts.tol = params.tol;
  opts.clamp_nonneg = true;
  relax_field(v, wd, active, opts);

  bool changed = false;
  for (std::size_t idx : ball) {
    const double m = std::min(w.values[idx], v.values[idx]);
    if (m < res.field.values[idx]) changed = true;
    res.field.values[idx] = m;
  }
  res.carved = changed;
  if (!changed) res.skip_reason = "comparison function did not cut";
  return res;
}

double estimate_hessian_sup(const GridField& u, const DiscreteProblem& dp) {
  const auto s = strides(u);
  const double ih2 = 1.0 / (u.h * u.h);
  const double thr = dp.fb_threshold(u.h);
  double m = 0.0;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (u.mask[idx] != NodeMask::interior || u.values[idx] <= thr) continue;
    bool clean = true;
    double local = 0.0;
    for (int a = 0; a < u.dim; ++a) {
      const std::ptrdiff_t ip = static_cast<std::ptrdiff_t>(idx) + s[a];
      const std::ptrdiff_t im = static_cast<std::ptrdiff_t>(idx) - s[a];
      if (ip < 0 || im < 0 || ip >= static_cast<std::ptrdiff_t>(u.size())) {
        clean = false;
        break;
      }
      if (u.mask[ip] == NodeMask::exterior || u.mask[im] == NodeMask::exterior ||
          u.values[ip] <= thr || u.values[im] <= thr) {
        clean = false;
        break;
      }
      local = std::max(local,
                       std::fabs((u.values[ip] - 2.0 * u.values[idx] + u.values[im]) * ih2));
    }
    if (clean) m = std::max(m, local);
  }
  return std::min(m, 10.0);
}

PerronResult perron_solve(const DiscreteProblem& dp, double h,
                          const std::function<double(const Vec&)>& phi,
                          const GridField* minorant, PerronOpts opts) {
  PerronResult result;
  PerronReport& rep = result.report;
  const int d = dp.prob.op.dim;

  GridField grid = make_ball_grid(d, h, phi);
  double datum_bound = 0.0, f_bound = 0.0, minorant_bound = 0.0;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (grid.mask[idx] == NodeMask::dirichlet)
      datum_bound = std::max(datum_bound, grid.values[idx]);
    if (grid.mask[idx] != NodeMask::exterior)
      f_bound = std::max(f_bound, std::fabs(dp.prob.f(grid.coord(idx))));
  }
  if (minorant) {
    minorant_bound = minorant->max_abs();
    ResidualReport sub = verify_subsolution(*minorant, dp);
    if (sub.interior_violation > 1e-6 || sub.fb_violations(3 * h) > 0)
      throw PreconditionError("perron_solve: minorant fails the strict-minorant check");
  }

  const BarrierSpec w0 =
      exponential_supersolution(dp.prob, f_bound, minorant_bound, datum_bound);
  GridField w = grid;
  for (std::size_t idx = 0; idx < w.size(); ++idx) {
    if (w.mask[idx] == NodeMask::interior) w.values[idx] = w0.value(w.coord(idx));
    // dirichlet nodes already hold phi <= datum_bound <= w0
  }
  rep.stages.push_back("exponential-supersolution");
  rep.stages.push_back("impose-datum");

  GridField prev = w;
  auto track_monotone = [&](const GridField& cur) {
    double inc = 0.0;
    for (std::size_t i = 0; i < cur.size(); ++i)
      inc = std::max(inc, cur.values[i] - prev.values[i]);
    rep.max_monotonicity_violation = std::max(rep.max_monotonicity_violation, inc);
    prev = cur;
  };

  SweepInfo si;
  w = obstacle_replace(w, dp, opts.tol_inner, &si);
  rep.stages.push_back("obstacle-replace");
  track_monotone(w);

  const double thr = dp.fb_threshold(h);
  for (int pass = 1; pass <= opts.max_passes; ++pass) {
    const double d2 = estimate_hessian_sup(w, dp);
    const double margin = opts.carve.margin_factor * h * (1.0 + d2);
    auto fb = free_boundary_nodes(w, thr);
    std::vector<std::size_t> carved_now;
    int carves = 0;
    for (std::size_t node : fb) {
      if (w.values[node] <= thr) continue;  // zeroed by a previous carve this pass
      auto [slope, nu] = one_sided_gradient(w, node);
      if (slope > dp.prob.law.g(w.coord(node), nu) - margin) continue;
      if (minorant && minorant->max_on_ball(w.coord(node), opts.carve.ball_factor * h) > 0)
        continue;  // carving here would cut below the strict minorant
      CarveResult cr = carve(w, node, dp, opts.carve, d2);
      if (cr.carved) {
        w = std::move(cr.field);
        carved_now.push_back(node);
        ++carves;
      }
    }
    rep.carve_passes = pass;
    rep.carves_total += carves;
    if (carves == 0) break;
    track_monotone(w);
    if (opts.local_relax) {
      w = obstacle_replace(w, dp, opts.tol_inner, &si, &carved_now,
                           3.0 * opts.carve.ball_factor * h);
    } else {
      w = obstacle_replace(w, dp, opts.tol_inner, &si);
    }
    track_monotone(w);
    if (pass == opts.max_passes) {
      rep.converged = false;
      rep.note = "carve/replace pass cap reached";
    }
  }

  w = obstacle_replace(w, dp, opts.tol_final, &si);
  track_monotone(w);
  rep.stages.push_back("final-obstacle-replace");
  rep.interior_residual = si.residual;

  DiscreteProblem verify_dp = dp;
  verify_dp.scheme = Scheme::wide_stencil;
  rep.supersolution = verify_supersolution(w, verify_dp);
  rep.subsolution = verify_subsolution(w, verify_dp);
  if (minorant) {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w.values[i] < minorant->values[i] - 1e-12) {
        rep.note = "ordering vs minorant violated";
        rep.converged = false;
      }
  }

  result.u = std::move(w);
  result.fb_nodes = free_boundary_nodes(result.u, thr);
  return result;
}

double lipschitz_norm(const GridField& u, double rho) {
  const auto s = strides(u);
  double best = 0.0;
  // offsets within distance 2h (1- and 2-step combinations)
  std::vector<std::array<int, 3>> offs;
  for (int i = -2; i <= 2; ++i)
    for (int j = (u.dim > 1 ? -2 : 0); j <= (u.dim > 1 ? 2 : 0); ++j)
      for (int k = (u.dim > 2 ? -2 : 0); k <= (u.dim > 2 ? 2 : 0); ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        if (i * i + j * j + k * k > 4) continue;
        if (std::make_tuple(i, j, k) < std::make_tuple(0, 0, 0)) continue;  // half shell
        offs.push_back({i, j, k});
      }
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (u.mask[idx] == NodeMask::exterior) continue;
    const Vec x = u.coord(idx);
    if (x.norm() > rho) continue;
    int ci, cj, ck;
    u.unpack(idx, ci, cj, ck);
    for (const auto& o : offs) {
      const int ni = ci + o[0], nj = cj + o[1], nk = ck + o[2];
      if (!u.in_bounds(ni, nj, nk)) continue;
      const std::size_t jdx = u.index(ni, nj, nk);
      if (u.mask[jdx] == NodeMask::exterior) continue;
      if (u.coord(jdx).norm() > rho) continue;
      const double dist = u.h * std::sqrt(double(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]));
      best = std::max(best, std::fabs(u.values[idx] - u.values[jdx]) / dist);
    }
  }
  return best;
}

double nondegeneracy_constant(const GridField& u, const std::vector<std::size_t>& fb_nodes,
                              const std::vector<double>& radii) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t node : fb_nodes) {
    const Vec x = u.coord(node);
    for (double r : radii) {
      const double sup = u.max_on_ball(x, r);
      worst = std::min(worst, sup / r);
    }
  }
  return worst;
}

double harnack_ratio(const GridField& u, const DiscreteProblem& dp, const Vec& center,
                     double rho) {
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  double fnorm = 0.0;
  bool any = false;
  for (std::size_t idx = 0; idx < u.size(); ++idx) {
    if (u.mask[idx] == NodeMask::exterior) continue;
    const Vec x = u.coord(idx);
    const double dist = (x - center).norm();
    if (dist > 2.0 * rho) continue;
    if (u.values[idx] <= 0.0)
      throw PreconditionError("harnack_ratio: u is not positive on B_2rho");
    fnorm = std::max(fnorm, std::fabs(dp.prob.f(x)));
    if (dist <= rho) {
      sup = std::max(sup, u.values[idx]);
      inf = std::min(inf, u.values[idx]);
      any = true;
    }
  }
  if (!any) throw ResolutionError("harnack_ratio: no nodes in B_rho");
  return sup / (inf + fnorm);
}

Vec fb_location_estimate(const GridField& u, std::size_t fb_node) {
  auto [slope, nu] = one_sided_gradient(u, fb_node);
  Vec x = u.coord(fb_node);
  if (slope > 0) x -= (u.values[fb_node] / slope) * nu;
  return x;
}

}  // namespace fbx
