#pragma once

#include <cstdint>
#include <vector>

#include "fbxlab/grid.hpp"
#include "fbxlab/operators.hpp"

namespace fbx {

enum class Scheme { central_hessian, wide_stencil };

// Lattice directions for the wide stencil (one per +/- pair, axes first).
std::vector<Vec> default_directions(int dim);

struct DiscreteProblem {
  Problem prob;
  Scheme scheme = Scheme::central_hessian;
  std::vector<Vec> directions;       // wide-stencil direction set
  double fb_threshold_factor = 1.0;  // fb_threshold = factor * h^2

  double fb_threshold(double h) const { return fb_threshold_factor * h * h; }
};

DiscreteProblem make_discrete(const Problem& prob,
                              Scheme scheme = Scheme::central_hessian);

// Precomputed index offsets and direction frames for one grid layout.
//
// The wide-stencil evaluation assembles, for each orthogonal frame of stencil
// directions, the frame-diagonal matrix sum_v (Delta_v u) v^ (x) v^ and applies
// F to it; perturbing any Delta_v upward perturbs the matrix by a PSD rank-one
// term, so F is nondecreasing in every neighbor value. Concave operators take
// the minimum over frames, convex the maximum, others the axis frame.
class Stencil {
 public:
  Stencil(const GridField& g, const DiscreteProblem& dp);

  double evaluate(const GridField& u, std::size_t idx) const;       // F_h(u)(x)
  double residual(const GridField& u, std::size_t idx) const;      // F_h(u) - f
  Vec gradient(const GridField& u, std::size_t idx) const;          // centered
  SymMatrix central_hessian(const GridField& u, std::size_t idx) const;

  // True if every value the scheme reads at idx is a non-exterior node.
  bool stencil_ok(const GridField& u, std::size_t idx) const;
  // True if every stencil neighbor value exceeds thr.
  bool neighbors_above(const GridField& u, std::size_t idx, double thr) const;

  double theta() const { return theta_; }
  int ndir() const { return ndir_; }

 private:
  double evaluate_wide(const GridField& u, std::size_t idx) const;
  double evaluate_central(const GridField& u, std::size_t idx) const;

  const DiscreteProblem* dp_;
  int dim_;
  double h_;
  Scheme scheme_;
  int ndir_ = 0;
  int fast_ndir_ = 0;
  std::array<std::ptrdiff_t, 16> off_{};    // per direction
  std::array<double, 16> inv_h2_{};         // 1/(h|v|)^2 per direction
  std::array<Vec, 16> unit_{};              // v/|v|
  struct Frame {
    int count = 0;
    int dir[3] = {0, 0, 0};
  };
  std::vector<Frame> frames_;
  std::array<std::ptrdiff_t, 3> axis_off_{};
  // mixed-derivative offsets for the central scheme: (+i+j, +i-j, -i+j, -i-j)
  struct MixedPair {
    int i, j;
    std::ptrdiff_t pp, pm, mp, mm;
  };
  std::vector<MixedPair> mixed_;
  double theta_ = 0.0;
};

// One F_h evaluation (throws StencilError if the stencil leaves the mask).
double evaluate_F(const GridField& u, const DiscreteProblem& dp, std::size_t idx);

struct RelaxOpts {
  double tol = 1e-8;
  long max_sweeps = 1000000;
  double omega = 1.5;                  // relaxation on top of the damping step
  bool clamp_nonneg = false;
  const GridField* upper_first_pass = nullptr;  // clamp u <= bound, first sweep only
  bool record_history = false;
};

struct SweepInfo {
  long sweeps = 0;
  double residual = 0.0;  // final true residual sup-norm over active nodes
  bool converged = false;
  std::vector<double> history;
};

// Damped in-place sweeps u <- u + omega * theta * (F_h(u) - f) over the active
// set, theta = h^2 / (2 d Lambda + h Lip). Throws NonConvergence at the cap.
SweepInfo relax_field(GridField& u, const DiscreteProblem& dp,
                      const std::vector<std::size_t>& active, const RelaxOpts& opts);

// Solve F(D^2 u, grad u, x) = f on the interior of the given grid, Dirichlet
// values taken from the field. Returns the converged field.
GridField solve_interior(const DiscreteProblem& dp, const GridField& domain,
                         const RelaxOpts& opts = {});

}  // namespace fbx
