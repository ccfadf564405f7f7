#include "fbxlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "fbxlab/errors.hpp"

namespace fbx {

double GridField::max_abs() const {
  double m = 0;
  for (std::size_t i = 0; i < size(); ++i)
    if (mask[i] != NodeMask::exterior) m = std::max(m, std::fabs(values[i]));
  return m;
}

double GridField::max_on_ball(const Vec& center, double r) const {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    if (mask[i] == NodeMask::exterior) continue;
    if ((coord(i) - center).norm() <= r) m = std::max(m, values[i]);
  }
  return m;
}

std::size_t GridField::nearest(const Vec& x) const {
  int iv[3] = {0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    int i = static_cast<int>(std::lround((x[a] - lo[a]) / h));
    iv[a] = std::clamp(i, 0, n[a] - 1);
  }
  return index(iv[0], iv[1], iv[2]);
}

double GridField::interp(const Vec& x) const {
  int base[3] = {0, 0, 0};
  double w[3] = {0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    double t = (x[a] - lo[a]) / h;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, n[a] - 2);
    base[a] = i;
    w[a] = std::clamp(t - i, 0.0, 1.0);
  }
  double acc = 0;
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    int iv[3] = {base[0], base[1], base[2]};
    for (int a = 0; a < dim; ++a) {
      if (c & (1 << a)) {
        iv[a] += 1;
        weight *= w[a];
      } else {
        weight *= 1.0 - w[a];
      }
    }
    acc += weight * values[index(iv[0], iv[1], iv[2])];
  }
  return acc;
}

double stencil_reach(int dim, double h) {
  return (dim == 1 ? h : std::sqrt(2.0) * h) * (1.0 - 1e-9);
}

GridField make_ball_grid(int dim, double h, const std::function<double(const Vec&)>& phi) {
  if (dim < 1 || dim > 3) throw InvalidInput("make_ball_grid: dim must be 1..3");
  GridField g;
  g.dim = dim;
  g.h = h;
  const int half = static_cast<int>(std::ceil((1.0 + 2.0 * h) / h));
  g.lo = Vec::zero(dim);
  for (int a = 0; a < dim; ++a) {
    g.n[a] = 2 * half + 1;
    g.lo[a] = -half * h;
  }
  g.values.assign(static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2], 0.0);
  g.mask.assign(g.values.size(), NodeMask::exterior);
  const double reach = stencil_reach(dim, h);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec x = g.coord(idx);
    const double r = x.norm();
    if (r < 1.0 - reach) {
      g.mask[idx] = NodeMask::interior;
    } else if (r <= 1.0 + 1e-9) {
      g.mask[idx] = NodeMask::dirichlet;
      g.values[idx] = phi ? phi(x) : 0.0;
    }
  }
  return g;
}

GridField make_halfball_grid(int dim, double h, const std::function<double(const Vec&)>& data) {
  if (dim < 1 || dim > 3) throw InvalidInput("make_halfball_grid: dim must be 1..3");
  GridField g;
  g.dim = dim;
  g.h = h;
  const double R = 0.5;
  const int half = static_cast<int>(std::ceil((R + 2.0 * h) / h));
  g.lo = Vec::zero(dim);
  for (int a = 0; a < dim; ++a) {
    if (a == dim - 1) {
      g.n[a] = half + 1;
      g.lo[a] = 0.0;
    } else {
      g.n[a] = 2 * half + 1;
      g.lo[a] = -half * h;
    }
  }
  // layout uses axis order as-is; trailing unused axes have n = 1
  if (dim == 1) {
    g.n[1] = g.n[2] = 1;
  } else if (dim == 2) {
    g.n[2] = 1;
  }
  g.values.assign(static_cast<std::size_t>(g.n[0]) * g.n[1] * g.n[2], 0.0);
  g.mask.assign(g.values.size(), NodeMask::exterior);
  const double reach = stencil_reach(dim, h);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec x = g.coord(idx);
    const double r = x.norm();
    const double xd = x[dim - 1];
    if (xd < -1e-12) continue;
    const bool flat = std::fabs(xd) <= 1e-12;
    if (r < R - reach) {
      g.mask[idx] = flat ? NodeMask::oblique_flat : NodeMask::interior;
    } else if (r <= R + 1e-9) {
      g.mask[idx] = NodeMask::dirichlet;
      g.values[idx] = data ? data(x) : 0.0;
    }
  }
  return g;
}

void fill_from(GridField& g, const std::function<double(const Vec&)>& f) {
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (g.mask[idx] != NodeMask::exterior) g.values[idx] = f(g.coord(idx));
}

void write_field_binary(const GridField& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path);
  out.write("FBXF", 4);
  const std::uint32_t dim = g.dim;
  out.write(reinterpret_cast<const char*>(&dim), 4);
  for (int a = 0; a < g.dim; ++a) {
    const std::uint32_t na = g.n[a];
    out.write(reinterpret_cast<const char*>(&na), 4);
  }
  out.write(reinterpret_cast<const char*>(&g.h), 8);
  out.write(reinterpret_cast<const char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * 8));

  std::ofstream side(path + ".txt");
  std::size_t ni = 0, nd = 0, ne = 0, nf = 0;
  for (auto m : g.mask) {
    if (m == NodeMask::interior) ++ni;
    else if (m == NodeMask::dirichlet) ++nd;
    else if (m == NodeMask::oblique_flat) ++nf;
    else ++ne;
  }
  side << "dim " << g.dim << "\n";
  side << "n";
  for (int a = 0; a < g.dim; ++a) side << " " << g.n[a];
  side << "\nh " << g.h << "\nlo";
  char buf[64];
  for (int a = 0; a < g.dim; ++a) {
    std::snprintf(buf, sizeof buf, " %.17g", g.lo[a]);
    side << buf;
  }
  side << "\nmask interior " << ni << " dirichlet " << nd << " flat " << nf
       << " exterior " << ne << "\n";
  side << "maskdata";
  for (auto m : g.mask) side << " " << static_cast<int>(m);
  side << "\n";
}

GridField read_field_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "FBXF", 4) != 0) throw Error("bad magic in " + path);
  GridField g;
  std::uint32_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  g.dim = static_cast<int>(dim);
  if (g.dim < 1 || g.dim > 3) throw Error("bad dim in " + path);
  std::size_t total = 1;
  for (int a = 0; a < g.dim; ++a) {
    std::uint32_t na = 0;
    in.read(reinterpret_cast<char*>(&na), 4);
    g.n[a] = static_cast<int>(na);
    total *= na;
  }
  in.read(reinterpret_cast<char*>(&g.h), 8);
  g.values.resize(total);
  in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(total * 8));
  if (!in) throw Error("truncated field file " + path);

  g.mask.assign(total, NodeMask::interior);
  g.lo = Vec::zero(g.dim);
  std::ifstream side(path + ".txt");
  if (side) {
    std::string key;
    while (side >> key) {
      if (key == "lo") {
        for (int a = 0; a < g.dim; ++a) side >> g.lo[a];
      } else if (key == "maskdata") {
        for (std::size_t i = 0; i < total; ++i) {
          int m;
          side >> m;
          g.mask[i] = static_cast<NodeMask>(m);
        }
      } else if (key == "dim" || key == "h") {
        double ignored;
        side >> ignored;
      } else if (key == "n") {
        for (int a = 0; a < g.dim; ++a) {
          int ignored;
          side >> ignored;
        }
      } else if (key == "mask") {
        std::string w;
        std::size_t c;
        for (int t = 0; t < 4; ++t) side >> w >> c;
      }
    }
  }
  return g;
}

void write_field_csv(const GridField& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  for (int a = 0; a < g.dim; ++a) out << "x" << a << ",";
  out << "value,mask\n";
  char buf[64];
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Vec x = g.coord(idx);
    for (int a = 0; a < g.dim; ++a) {
      std::snprintf(buf, sizeof buf, "%.12g,", x[a]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.12g,%d\n", g.values[idx], static_cast<int>(g.mask[idx]));
    out << buf;
  }
}

}  // namespace fbx
