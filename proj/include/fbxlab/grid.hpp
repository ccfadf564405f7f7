#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbxlab/vec.hpp"

namespace fbx {

enum class NodeMask : std::uint8_t {
  exterior = 0,
  interior = 1,
  dirichlet = 2,
  oblique_flat = 3,  // flat part of the half-ball boundary (oblique condition)
};

// Scalar field on a uniform Cartesian grid over a box, with a per-node mask.
struct GridField {
  int dim = 0;
  std::array<int, 3> n = {1, 1, 1};  // nodes per axis (trailing axes = 1)
  Vec lo;                            // coordinate of node (0,0,0)
  double h = 0.0;
  std::vector<double> values;
  std::vector<NodeMask> mask;

  std::size_t size() const { return values.size(); }
  std::size_t index(int i, int j = 0, int k = 0) const {
    return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k;
  }
  void unpack(std::size_t idx, int& i, int& j, int& k) const {
    k = static_cast<int>(idx % n[2]);
    idx /= n[2];
    j = static_cast<int>(idx % n[1]);
    i = static_cast<int>(idx / n[1]);
  }
  Vec coord(std::size_t idx) const {
    int i, j, k;
    unpack(idx, i, j, k);
    Vec x = lo;
    x[0] += i * h;
    if (dim > 1) x[1] += j * h;
    if (dim > 2) x[2] += k * h;
    return x;
  }
  bool in_bounds(int i, int j = 0, int k = 0) const {
    return i >= 0 && i < n[0] && j >= 0 && j < n[1] && k >= 0 && k < n[2];
  }

  double max_abs() const;
  double max_on_ball(const Vec& center, double r) const;  // over non-exterior nodes

  // Nearest node index to a point (clamped to the box).
  std::size_t nearest(const Vec& x) const;
  // Multilinear interpolation of values (mask ignored).
  double interp(const Vec& x) const;
};

// Grid over [-1,1]^d (plus a margin ring) with the unit ball masked in:
// interior where |x| < 1 - reach, dirichlet on the shell up to |x| <= 1.
// phi is evaluated at dirichlet node positions.
GridField make_ball_grid(int dim, double h, const std::function<double(const Vec&)>& phi);

// Half-ball of radius 1/2 in {x_d >= 0}: interior, oblique_flat on {x_d = 0},
// dirichlet on the curved part. data is evaluated at curved nodes.
GridField make_halfball_grid(int dim, double h, const std::function<double(const Vec&)>& data);

// Rasterize a closed-form function on an existing grid layout (values only).
void fill_from(GridField& g, const std::function<double(const Vec&)>& f);

// Stencil reach used when classifying interior nodes (diagonal directions).
double stencil_reach(int dim, double h);

// Flat binary export: magic "FBXF", u32 dim, u32 per-axis counts, f64 h,
// f64 values row-major; a text sidecar (path + ".txt") summarizes the mask.
void write_field_binary(const GridField& g, const std::string& path);
GridField read_field_binary(const std::string& path);

// Plain CSV: header row, one line per node (coords, value, mask).
void write_field_csv(const GridField& g, const std::string& path);

}  // namespace fbx
