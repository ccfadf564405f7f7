#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fbxlab/discrete.hpp"
#include "fbxlab/grid.hpp"

namespace fbx {

// One-sided gradient at a free boundary node: per axis, the difference taken
// toward the larger neighbor (into the positivity set).
std::pair<double, Vec> one_sided_gradient(const GridField& u, std::size_t idx);

// Free boundary nodes: positive nodes with a non-positive axis neighbor.
std::vector<std::size_t> free_boundary_nodes(const GridField& u, double fb_threshold);

enum class FbTag { gradient = 0, vanishing = 1, neither = 2 };

struct FbRecord {
  std::size_t node = 0;
  double slope = 0.0;
  Vec direction;
  double g_value = 0.0;
  double excess = 0.0;  // positive part of the violated inequality
  FbTag tag = FbTag::gradient;
};

struct ResidualReport {
  double interior_violation = 0.0;      // sup of the violated side, positive part
  std::size_t worst_interior_node = 0;
  std::vector<FbRecord> fb;
  double max_fb_excess = 0.0;

  std::size_t fb_violations(double tol) const {
    std::size_t c = 0;
    for (const auto& r : fb)
      if (r.excess > tol) ++c;
    return c;
  }
};

// Supersolution check: (F_h - f)_+ on strictly positive interior nodes, and
// (slope - g)_+ at free boundary nodes, plus the admissibility dichotomy tag.
ResidualReport verify_supersolution(const GridField& w, const DiscreteProblem& dp);
// Mirror with the inequalities flipped (also accepts strict minorants).
ResidualReport verify_subsolution(const GridField& w, const DiscreteProblem& dp);

// Obstacle replacement: projected damped sweeps starting from w on its own
// positivity set, keeping Dirichlet values and zeros fixed.
GridField obstacle_replace(const GridField& w, const DiscreteProblem& dp,
                           double tol = 1e-8, SweepInfo* info = nullptr,
                           const std::vector<std::size_t>* local_seed = nullptr,
                           double local_radius = 0.0);

GridField min_supersolutions(const GridField& w1, const GridField& w2);

struct CarveParams {
  double ball_factor = 8.0;    // carve ball radius r = factor * h
  double sigma = 0.25;         // cone opening
  double margin_factor = 1.5;  // violation margin = factor * h * (1 + |D2| est)
  double tol = 1e-8;
};

struct CarveResult {
  GridField field;
  bool carved = false;
  std::string skip_reason;
};

// Local comparison with the plane-data solution on the cone domain; output is
// the node-wise minimum, vanishing near the carved node.
CarveResult carve(const GridField& w, std::size_t fb_node, const DiscreteProblem& dp,
                  const CarveParams& params, double d2_estimate = 0.0);

struct PerronOpts {
  CarveParams carve;
  double tol_final = 1e-8;
  double tol_inner = 1e-6;
  int max_passes = 400;
  bool local_relax = true;  // localized re-solves between carve passes
};

struct PerronReport {
  std::vector<std::string> stages;
  double interior_residual = 0.0;
  ResidualReport supersolution;
  ResidualReport subsolution;
  int carve_passes = 0;
  int carves_total = 0;
  double max_monotonicity_violation = 0.0;  // pipeline must only decrease
  bool converged = true;
  std::string note;
};

struct PerronResult {
  GridField u;
  std::vector<std::size_t> fb_nodes;
  PerronReport report;
};

// The Perron pipeline: exponential supersolution start, boundary datum
// imposed, then [obstacle replacement -> carve all violating FB nodes] until
// no violation exceeds the margin.
PerronResult perron_solve(const DiscreteProblem& dp, double h,
                          const std::function<double(const Vec&)>& phi,
                          const GridField* minorant = nullptr, PerronOpts opts = {});

// Max over node pairs at distance <= 2h inside B_rho of |du| / distance.
double lipschitz_norm(const GridField& u, double rho);

// min over FB nodes and radii of sup_{B_r} u / r.
double nondegeneracy_constant(const GridField& u, const std::vector<std::size_t>& fb_nodes,
                              const std::vector<double>& radii);

// sup_{B_rho} u / (inf_{B_rho} u + ||f||_{inf, B_2rho}); requires u > 0 on B_2rho.
double harnack_ratio(const GridField& u, const DiscreteProblem& dp, const Vec& center,
                     double rho);

// Sub-grid free boundary location along the one-sided gradient direction.
Vec fb_location_estimate(const GridField& u, std::size_t fb_node);

// Rough sup-norm bound on second differences over positive interior nodes.
double estimate_hessian_sup(const GridField& u, const DiscreteProblem& dp);

}  // namespace fbx
