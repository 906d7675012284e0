#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sczlab/errors.hpp"
#include "sczlab/fit.hpp"
#include "sczlab/grid.hpp"
#include "sczlab/measures.hpp"
#include "sczlab/prng.hpp"

namespace sczlab {

// Slowly varying scale function with declared regularity constants:
//   C0^{-1} rho(x) (1 + |x-y|/rho(x))^{-k0} <= rho(y)
//   rho(y) <= C0 rho(x) (1 + |x-y|/rho(x))^{k0/(k0+1)}
struct CriticalRadius {
  std::function<double(const Point&)> rho;
  double C0 = 1.0;
  double k0 = 0.0;
  std::string name = "custom";

  double operator()(const Point& x) const {
    const double r = rho(x);
    if (!(r > 0.0) || !std::isfinite(r))
      throw NonPositiveRhoError("CriticalRadius: rho must be finite and positive");
    return r;
  }

  static CriticalRadius constant(double c) {
    if (!(c > 0.0)) throw NonPositiveRhoError("CriticalRadius::constant: scale must be positive");
    return {[c](const Point&) { return c; }, 1.0, 0.0, "constant"};
  }

  // rho(x) = min(1, 1/|x|); correct scale for a quadratic confining potential.
  static CriticalRadius inverse_norm_capped() {
    auto fn = [](const Point& x) {
      const double n = norm(x);
      return n <= 1.0 ? 1.0 : 1.0 / n;
    };
    return {fn, 1.2, 1.0, "inverse-norm-capped"};
  }
};

// Lattice search for constants making the two-sided regularity bound hold on a
// sampled pair set.  Chooses the k0 needing the smallest C0 (ties toward small
// k0), then rounds C0 up to the lattice.  Fails when even the cap is too small.
struct RadiusValidation {
  bool ok = false;
  double k0 = 0.0;
  double C0 = 0.0;
  double required_C0 = 0.0;
  std::vector<std::pair<double, double>> per_k0;  // (k0, required C0) across the lattice
  Point worst_x{0, 0, 0};
  Point worst_y{0, 0, 0};
  std::uint64_t seed = 0;

  // required C0 at a given lattice k0 (for checking a declared fit)
  double required_at(double k0_query) const {
    for (const auto& [k, c] : per_k0)
      if (std::fabs(k - k0_query) < 1e-12) return c;
    throw LabError("RadiusValidation: k0 not on the search lattice");
  }
};

namespace detail {

inline std::vector<double> c0_lattice(double cap) {
  std::vector<double> v = arithmetic_lattice(1.0, 2.0, 0.05);
  for (double x = 2.0 * 1.1; x <= cap * (1 + 1e-12); x *= 1.1) v.push_back(x);
  if (v.back() < cap) v.push_back(cap);
  return v;
}

}  // namespace detail

inline RadiusValidation validate_critical_radius(
    const std::function<double(const Point&)>& rho, int d, double L, int num_random_pairs,
    std::uint64_t seed, double C0_cap = 1000.0) {
  Rng rng(seed);

  // Point set: a sweep along each axis plus random points; pairs are oriented
  // both ways so both inequalities get exercised with either point as base.
  std::vector<Point> pts;
  const int sweep = 81;
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < sweep; ++i) {
      Point p{0, 0, 0};
      p[a] = -L + 2.0 * L * i / (sweep - 1);
      pts.push_back(p);
    }
  for (int i = 0; i < num_random_pairs; ++i) pts.push_back(rng.point_in_box(d, L));

  struct Pair {
    Point x, y;
    double rx, ry, u;  // u = |x - y| / rho(x)
  };
  std::vector<Pair> pairs;
  pairs.reserve(4 * pts.size());
  auto push_pair = [&](const Point& x, const Point& y) {
    const double rx = rho(x), ry = rho(y);
    if (!(rx > 0.0) || !(ry > 0.0))
      throw NonPositiveRhoError("validate_critical_radius: rho must be positive");
    pairs.push_back({x, y, rx, ry, dist(x, y) / rx});
  };
  // axis-sweep all pairs (1-d sweeps are small), random points paired up + jittered
  const std::size_t n_sweep = static_cast<std::size_t>(d) * sweep;
  for (std::size_t i = 0; i < n_sweep; ++i)
    for (std::size_t j = 0; j < n_sweep; ++j)
      if (i != j) push_pair(pts[i], pts[j]);
  for (std::size_t i = n_sweep; i < pts.size(); ++i) {
    const Point x = pts[i];
    const Point y = pts[n_sweep + (i - n_sweep + 1) % (pts.size() - n_sweep)];
    push_pair(x, y);
    push_pair(y, x);
    Point z = x;  // nearby partner to probe the local regime
    const double step = rng.log_uniform(1e-3 * L, L);
    z[rng.uniform_int(0, d - 1)] += (rng.uniform() < 0.5 ? -step : step);
    for (int a = 0; a < d; ++a) z[a] = std::clamp(z[a], -L, L);
    push_pair(x, z);
    push_pair(z, x);
  }

  const auto k0s = arithmetic_lattice(0.0, 8.0, 0.25);
  const auto lattice = detail::c0_lattice(C0_cap);
  RadiusValidation out;
  out.seed = seed;
  // smallest lattice C0 wins; among equal C0 the smallest k0 does
  double best_C0 = std::numeric_limits<double>::infinity();
  double best_req = std::numeric_limits<double>::infinity();
  double best_k0 = 0.0;
  const Pair* best_worst = nullptr;
  for (double k0 : k0s) {
    double req = 1.0;
    const Pair* worst = nullptr;
    for (const auto& p : pairs) {
      const double lower_need = p.rx * std::pow(1.0 + p.u, -k0) / p.ry;
      const double upper_need = p.ry / (p.rx * std::pow(1.0 + p.u, k0 / (k0 + 1.0)));
      const double need = std::max(lower_need, upper_need);
      if (need > req) {
        req = need;
        worst = &p;
      }
    }
    out.per_k0.emplace_back(k0, req);
    const double C0_here = (req <= C0_cap)
                               ? *std::lower_bound(lattice.begin(), lattice.end(), req - 1e-12)
                               : std::numeric_limits<double>::infinity();
    const double cmp = std::isinf(C0_here) ? req : C0_here;
    const double best_cmp = std::isinf(best_C0) ? best_req : best_C0;
    if (cmp < best_cmp - 1e-15) {
      best_C0 = C0_here;
      best_req = req;
      best_k0 = k0;
      best_worst = worst;
    }
  }

  out.k0 = best_k0;
  out.required_C0 = best_req;
  if (best_worst) {
    out.worst_x = best_worst->x;
    out.worst_y = best_worst->y;
  }
  if (std::isfinite(best_C0)) {
    out.C0 = best_C0;
    out.ok = true;
  }
  return out;
}

// For |x - y| <= rho(x) the ratio rho(y)/rho(x) stays inside
// [((2^k0) C0)^{-1}, 2^{k0/(k0+1)} C0].
struct SimilarityCheck {
  double ratio_yx = 0.0;  // rho(y)/rho(x)
  double ratio_xy = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool within = false;
};

inline SimilarityCheck rho_similarity(const CriticalRadius& cr, const Point& x, const Point& y) {
  const double rx = cr(x), ry = cr(y);
  if (dist(x, y) > rx)
    throw LabError("rho_similarity: |x-y| exceeds rho(x); bound only claimed locally");
  SimilarityCheck s;
  s.ratio_yx = ry / rx;
  s.ratio_xy = rx / ry;
  s.lo = 1.0 / (std::pow(2.0, cr.k0) * cr.C0);
  s.hi = std::pow(2.0, cr.k0 / (cr.k0 + 1.0)) * cr.C0;
  s.within = s.ratio_yx >= s.lo && s.ratio_yx <= s.hi;
  return s;
}

// Greedy cover of the grid by balls B(x_k, rho(x_k)); overlap of the sigma-dilated
// family is counted exactly and fitted against C sigma^{N1}.
struct CoveringReport {
  std::vector<Ball> balls;
  std::vector<double> sigmas;
  std::vector<std::size_t> max_overlap;
  double N1 = 0.0;
  double C = 0.0;
  bool covers = false;
};

inline CoveringReport build_covering(const CriticalRadius& cr, const GridDomain& dom) {
  CoveringReport rep;
  std::vector<char> covered(dom.num_nodes(), 0);
  for (std::size_t i = 0; i < dom.num_nodes(); ++i) {
    if (covered[i]) continue;
    const Point c = dom.coord(i);
    const Ball b{c, cr(c)};
    rep.balls.push_back(b);
    dom.for_each_node_in_ball(b, [&](std::size_t j, const Point&) { covered[j] = 1; });
  }
  rep.covers = std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });

  rep.sigmas = {1.0, 2.0, 4.0, 8.0};
  std::vector<std::size_t> count(dom.num_nodes());
  for (double sigma : rep.sigmas) {
    std::fill(count.begin(), count.end(), 0);
    for (const auto& b : rep.balls)
      dom.for_each_node_in_ball(Ball{b.center, sigma * b.radius},
                                [&](std::size_t j, const Point&) { ++count[j]; });
    rep.max_overlap.push_back(*std::max_element(count.begin(), count.end()));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rep.sigmas.size(); ++i) {
    lx.push_back(std::log(rep.sigmas[i]));
    ly.push_back(std::log(static_cast<double>(rep.max_overlap[i])));
  }
  const auto line = least_squares_line(lx, ly);
  rep.N1 = std::max(0.0, line.slope);
  for (std::size_t i = 0; i < rep.sigmas.size(); ++i)
    rep.C = std::max(rep.C, static_cast<double>(rep.max_overlap[i]) /
                                std::pow(rep.sigmas[i], rep.N1));
  return rep;
}

// Scale function of a measure: the radius where mu(B(x,r)) / r^{d-2} crosses 1.
inline double rho_from_measure_at(const MeasureModel& mu, const Point& x, double r_lo,
                                  double r_hi) {
  const int d = mu.dim();
  auto ratio = [&](double r) { return mu.ball_measure(x, r) / std::pow(r, d - 2); };
  if (!(ratio(r_lo) <= 1.0 && ratio(r_hi) > 1.0))
    throw NoBracketError("rho_from_measure: crossing not bracketed on [r_lo, r_hi]");
  double lo = r_lo, hi = r_hi;
  for (int it = 0; it < 200 && (hi - lo) > 1e-9 * lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) <= 1.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  const double q = ratio(root);
  if (!(q >= 0.5 && q <= 2.0))
    throw NoBracketError("rho_from_measure: ratio at the root is not of unit size");
  return root;
}

inline CriticalRadius rho_from_measure(const MeasureModel& mu, double r_lo, double r_hi) {
  auto m = mu;  // capture by value; MeasureModel is cheap to copy
  return {[m, r_lo, r_hi](const Point& x) { return rho_from_measure_at(m, x, r_lo, r_hi); },
          0.0, 0.0, "rho-of-" + mu.describe()};
}

}  // namespace sczlab
