#pragma once

#include <functional>

#include "sczlab/grid.hpp"
#include "sczlab/prng.hpp"

namespace sczlab {

// Random centers in the box, log-uniform radii.  Radii start at 2h so every
// ball holds at least one node.
inline BallFamily random_family(const GridDomain& dom, std::size_t count, std::uint64_t seed,
                                double r_lo = 0.0, double r_hi = 0.0) {
  if (r_lo <= 0.0) r_lo = 2.0 * dom.spacing();
  if (r_hi <= 0.0) r_hi = 0.45 * dom.half_width();
  BallFamily fam;
  fam.policy = "random";
  fam.seed = seed;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    fam.balls.push_back({rng.point_in_box(dom.dim(), dom.half_width()),
                         rng.log_uniform(r_lo, r_hi)});
  return fam;
}

// Random centers with radii capped at rho(center): the sub-critical regime.
inline BallFamily subcritical_family(const GridDomain& dom,
                                     const std::function<double(const Point&)>& rho,
                                     std::size_t count, std::uint64_t seed) {
  const double r_min = 2.0 * dom.spacing();
  BallFamily fam;
  fam.policy = "subcritical";
  fam.seed = seed;
  Rng rng(seed);
  std::size_t guard = 0;
  while (fam.balls.size() < count) {
    if (++guard > 100 * count)
      throw LabError("subcritical_family: rho below grid resolution almost everywhere");
    const Point c = rng.point_in_box(dom.dim(), dom.half_width());
    const double cap = rho(c);
    if (cap < r_min) continue;
    fam.balls.push_back({c, rng.log_uniform(r_min, cap)});
  }
  return fam;
}

// Centers on a coarse sub-lattice, dyadic radii: deterministic coverage.
inline BallFamily dyadic_family(const GridDomain& dom, int centers_per_axis, int levels) {
  BallFamily fam;
  fam.policy = "dyadic";
  for (int l = 0; l < levels; ++l) {
    const double r = 2.0 * dom.spacing() * std::pow(2.0, l);
    if (r > dom.half_width()) break;
    for (int i = 0; i < centers_per_axis; ++i) {
      Point p{0, 0, 0};
      for (int a = 0; a < dom.dim(); ++a)
        p[a] = -dom.half_width() +
               2.0 * dom.half_width() * ((i + a * 7) % centers_per_axis) /
                   std::max(1, centers_per_axis - 1);
      fam.balls.push_back({p, r});
    }
  }
  return fam;
}

}  // namespace sczlab
