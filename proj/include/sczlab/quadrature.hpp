#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sczlab/errors.hpp"

namespace sczlab {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (positive half; node 0 last).
inline constexpr double gk_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double k15_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights aligned with the odd Kronrod nodes (indices 1,3,5) and node 0.
inline constexpr double g7_w[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                                   0.417959183673469};

struct PanelResult {
  double integral;
  double error;
};

template <class F>
PanelResult gk15_panel(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), half = 0.5 * (b - a);
  double k15 = 0.0, g7 = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = gk_nodes[i];
    double fv;
    if (i == 7) {
      fv = f(c);
      k15 += k15_w[i] * fv;
      g7 += g7_w[3] * fv;
    } else {
      const double fp = f(c + half * x), fm = f(c - half * x);
      k15 += k15_w[i] * (fp + fm);
      if (i % 2 == 1) g7 += g7_w[i / 2] * (fp + fm);
    }
  }
  k15 *= half;
  g7 *= half;
  const double diff = std::fabs(k15 - g7);
  return {k15, std::pow(200.0 * diff, 1.5)};
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-12, double rel_tol = 1e-10, int max_panels = 4000) {
  struct Seg {
    double a, b, integral, error;
  };
  auto first = detail::gk15_panel(f, a, b);
  std::vector<Seg> segs{{a, b, first.integral, first.error}};
  for (int it = 0; it < max_panels; ++it) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    double worst_err = -1.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total += segs[i].integral;
      err += segs[i].error;
      if (segs[i].error > worst_err) {
        worst_err = segs[i].error;
        worst = i;
      }
    }
    if (err <= abs_tol || err <= rel_tol * std::fabs(total)) return total;
    const Seg s = segs[worst];
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b))
      throw QuadratureFailureError("integrate: interval collapsed before reaching tolerance");
    auto left = detail::gk15_panel(f, s.a, m);
    auto right = detail::gk15_panel(f, m, s.b);
    segs[worst] = {s.a, m, left.integral, left.error};
    segs.push_back({m, s.b, right.integral, right.error});
  }
  throw QuadratureFailureError("integrate: panel budget exhausted before reaching tolerance");
}

// Semi-infinite integral via u-substitution t = a + u/(1-u) on [0, 1).
inline double integrate_to_infinity(const std::function<double(double)>& f, double a,
                                    double abs_tol = 1e-12, double rel_tol = 1e-10) {
  auto g = [&](double u) {
    const double om = 1.0 - u;
    const double t = a + u / om;
    return f(t) / (om * om);
  };
  return integrate(g, 0.0, 1.0 - 1e-14, abs_tol, rel_tol);
}

}  // namespace sczlab
