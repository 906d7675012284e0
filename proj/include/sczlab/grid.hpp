#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sczlab/errors.hpp"

namespace sczlab {

// Points always carry three slots; axes beyond the domain dimension stay zero.
using Point = std::array<double, 3>;

inline double dist2(const Point& a, const Point& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return dx * dx + dy * dy + dz * dz;
}

inline double dist(const Point& a, const Point& b) { return std::sqrt(dist2(a, b)); }

inline double norm(const Point& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

// Volume of the unit ball, d = 1..3.
inline double unit_ball_volume(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 3.14159265358979323846;
    case 3: return 4.0 * 3.14159265358979323846 / 3.0;
    default: throw DomainTooSmallError("unit_ball_volume: dimension must be 1, 2 or 3");
  }
}

struct Ball {
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

// Uniform Cartesian grid on [-L, L]^d with n nodes per axis, spacing h = 2L/(n-1).
// Flat indices are row-major: axis 0 varies slowest.
class GridDomain {
 public:
  GridDomain(int d, double L, int n) : d_(d), n_(n), L_(L), h_(2.0 * L / (n - 1)) {
    if (d < 1 || d > 3) throw DomainTooSmallError("GridDomain: dimension must be 1, 2 or 3");
    if (n < 2) throw DomainTooSmallError("GridDomain: need at least 2 nodes per axis");
    if (!(L > 0.0)) throw DomainTooSmallError("GridDomain: half-width must be positive");
  }

  int dim() const { return d_; }
  double half_width() const { return L_; }
  int nodes_per_axis() const { return n_; }
  double spacing() const { return h_; }
  double box_diameter() const { return 2.0 * L_ * std::sqrt(static_cast<double>(d_)); }

  std::size_t num_nodes() const {
    std::size_t t = 1;
    for (int a = 0; a < d_; ++a) t *= static_cast<std::size_t>(n_);
    return t;
  }

  double axis_coord(int i) const { return -L_ + static_cast<double>(i) * h_; }

  std::array<int, 3> multi_index(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = d_ - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
    return idx;
  }

  std::size_t flat_index(const std::array<int, 3>& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < d_; ++a) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx[a]);
    return f;
  }

  Point coord(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < d_; ++a) p[a] = axis_coord(idx[a]);
    return p;
  }

  // Nearest grid node, clamped into the box.
  std::size_t nearest_node(const Point& p) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < d_; ++a) {
      int i = static_cast<int>(std::lround((p[a] + L_) / h_));
      idx[a] = std::clamp(i, 0, n_ - 1);
    }
    return flat_index(idx);
  }

  bool same_layout(const GridDomain& o) const { return d_ == o.d_ && n_ == o.n_ && L_ == o.L_; }

  // Visits every node whose coordinate lies in the closed ball, clipped to the box.
  // f receives (flat index, node coordinate).
  template <class F>
  void for_each_node_in_ball(const Ball& b, F&& f) const {
    const double r2 = b.radius * b.radius;
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < d_; ++a) {
      lo[a] = std::clamp(static_cast<int>(std::floor((b.center[a] - b.radius + L_) / h_)) - 1, 0, n_ - 1);
      hi[a] = std::clamp(static_cast<int>(std::ceil((b.center[a] + b.radius + L_) / h_)) + 1, 0, n_ - 1);
    }
    Point p{0.0, 0.0, 0.0};
    std::array<int, 3> idx{0, 0, 0};
    for (int i0 = lo[0]; i0 <= hi[0]; ++i0) {
      idx[0] = i0;
      p[0] = axis_coord(i0);
      if (d_ == 1) {
        if (dist2(p, b.center) <= r2) f(flat_index(idx), p);
        continue;
      }
      for (int i1 = lo[1]; i1 <= hi[1]; ++i1) {
        idx[1] = i1;
        p[1] = axis_coord(i1);
        if (d_ == 2) {
          if (dist2(p, b.center) <= r2) f(flat_index(idx), p);
          continue;
        }
        for (int i2 = lo[2]; i2 <= hi[2]; ++i2) {
          idx[2] = i2;
          p[2] = axis_coord(i2);
          if (dist2(p, b.center) <= r2) f(flat_index(idx), p);
        }
      }
    }
  }

 private:
  int d_, n_;
  double L_, h_;
};

// Scalar field sampled at the grid nodes.
class GridFunction {
 public:
  GridFunction() : domain_(1, 1.0, 2) , values_(2, 0.0) {}
  explicit GridFunction(const GridDomain& dom, double fill = 0.0)
      : domain_(dom), values_(dom.num_nodes(), fill) {}
  GridFunction(const GridDomain& dom, const std::function<double(const Point&)>& fn)
      : domain_(dom), values_(dom.num_nodes()) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] = fn(dom.coord(i));
  }

  const GridDomain& domain() const { return domain_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

 private:
  GridDomain domain_;
  std::vector<double> values_;
};

struct BallFamily {
  std::vector<Ball> balls;
  std::string policy;      // "random", "dyadic", "exhaustive", ...
  std::uint64_t seed = 0;  // recorded for reproducibility
};

inline std::size_t ball_node_count(const GridDomain& dom, const Ball& b) {
  std::size_t c = 0;
  dom.for_each_node_in_ball(b, [&](std::size_t, const Point&) { ++c; });
  return c;
}

// Midpoint-rule integral of f over the clipped ball: sum of node values times h^d.
inline double ball_integral(const GridFunction& f, const Ball& b) {
  const auto& dom = f.domain();
  double s = 0.0;
  std::size_t c = 0;
  dom.for_each_node_in_ball(b, [&](std::size_t i, const Point&) {
    s += f[i];
    ++c;
  });
  if (c == 0) throw EmptyBallError("ball_integral: no grid node inside ball");
  return s * std::pow(dom.spacing(), dom.dim());
}

inline double ball_average(const GridFunction& f, const Ball& b) {
  const auto& dom = f.domain();
  double s = 0.0;
  std::size_t c = 0;
  dom.for_each_node_in_ball(b, [&](std::size_t i, const Point&) {
    s += f[i];
    ++c;
  });
  if (c == 0) throw EmptyBallError("ball_average: no grid node inside ball");
  return s / static_cast<double>(c);
}

inline double ball_min(const GridFunction& f, const Ball& b) {
  double m = std::numeric_limits<double>::infinity();
  std::size_t c = 0;
  f.domain().for_each_node_in_ball(b, [&](std::size_t i, const Point&) {
    m = std::min(m, f[i]);
    ++c;
  });
  if (c == 0) throw EmptyBallError("ball_min: no grid node inside ball");
  return m;
}

inline double ball_max(const GridFunction& f, const Ball& b) {
  double m = -std::numeric_limits<double>::infinity();
  std::size_t c = 0;
  f.domain().for_each_node_in_ball(b, [&](std::size_t i, const Point&) {
    m = std::max(m, f[i]);
    ++c;
  });
  if (c == 0) throw EmptyBallError("ball_max: no grid node inside ball");
  return m;
}

// Discrete volume of the clipped ball and the fraction lost to clipping/discretisation.
inline double discrete_ball_volume(const GridDomain& dom, const Ball& b) {
  return static_cast<double>(ball_node_count(dom, b)) * std::pow(dom.spacing(), dom.dim());
}

inline double clipping_fraction(const GridDomain& dom, const Ball& b) {
  const double ideal = unit_ball_volume(dom.dim()) * std::pow(b.radius, dom.dim());
  if (ideal <= 0.0) return 0.0;
  return std::max(0.0, 1.0 - discrete_ball_volume(dom, b) / ideal);
}

// || f ||_{L^p(w)} by the midpoint rule; p = infinity gives ess-sup |f| w (max over nodes).
inline double weighted_lp_norm(const GridFunction& f, const GridFunction& w, double p) {
  if (!f.domain().same_layout(w.domain()))
    throw DomainTooSmallError("weighted_lp_norm: mismatched grids");
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] < 0.0) throw NegativeWeightError("weighted_lp_norm: negative weight value");
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::fabs(f[i]) * w[i]);
    return m;
  }
  if (p < 1.0) throw LabError("weighted_lp_norm: p must be >= 1");
  const double hd = std::pow(f.domain().spacing(), f.domain().dim());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::fabs(f[i]), p) * w[i];
  return std::pow(s * hd, 1.0 / p);
}

inline double lp_norm(const GridFunction& f, double p) {
  GridFunction one(f.domain(), 1.0);
  return weighted_lp_norm(f, one, p);
}

// Node indices in the annulus R < |x0 - y| <= 2R.
inline std::vector<std::size_t> annulus_nodes(const GridDomain& dom, const Point& x0, double R) {
  if (!(R > dom.spacing()))
    throw UnresolvedAnnulusError("annulus_nodes: annulus width below grid resolution");
  std::vector<std::size_t> out;
  const double r2lo = R * R, r2hi = 4.0 * R * R;
  dom.for_each_node_in_ball(Ball{x0, 2.0 * R}, [&](std::size_t i, const Point& p) {
    const double d2 = dist2(p, x0);
    if (d2 > r2lo && d2 <= r2hi) out.push_back(i);
  });
  if (out.empty()) throw UnresolvedAnnulusError("annulus_nodes: no grid node in annulus");
  return out;
}

// --- serialization: one JSON header line, then raw node values (native doubles) ---

inline void write_grid_function(const std::string& path, const GridFunction& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw LabError("write_grid_function: cannot open " + path);
  char header[160];
  std::snprintf(header, sizeof(header), "{\"d\":%d,\"L\":%.17g,\"n\":%d,\"ordering\":\"row-major\"}\n",
                f.domain().dim(), f.domain().half_width(), f.domain().nodes_per_axis());
  os << header;
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw LabError("write_grid_function: write failed for " + path);
}

inline GridFunction read_grid_function(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LabError("read_grid_function: cannot open " + path);
  std::string header;
  std::getline(is, header);
  int d = 0, n = 0;
  double L = 0.0;
  if (std::sscanf(header.c_str(), "{\"d\":%d,\"L\":%lg,\"n\":%d,", &d, &L, &n) != 3 ||
      header.find("\"ordering\":\"row-major\"") == std::string::npos)
    throw LabError("read_grid_function: bad header in " + path);
  GridFunction f((GridDomain(d, L, n)));
  is.read(reinterpret_cast<char*>(f.values().data()),
          static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(f.size() * sizeof(double)))
    throw LabError("read_grid_function: truncated payload in " + path);
  return f;
}

}  // namespace sczlab
