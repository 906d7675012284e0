#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sczlab/errors.hpp"
#include "sczlab/fit.hpp"
#include "sczlab/grid.hpp"

namespace sczlab {

struct Atom {
  Point location{0, 0, 0};
  double mass = 0.0;
};

// Nonnegative measure: a smooth part (analytic ball evaluator, or a sampled
// density integrated on its grid) plus point masses.
class MeasureModel {
 public:
  static MeasureModel lebesgue(int d, double scale) {
    MeasureModel m;
    m.d_ = d;
    m.name_ = "lebesgue";
    m.smooth_ball_ = [d, scale](const Point&, double r) {
      return scale * unit_ball_volume(d) * std::pow(r, d);
    };
    if (d == 3) {
      m.smooth_singular_ = [scale](const Point&, double R, int power) {
        const double pi = 3.14159265358979323846;
        return power == 1 ? scale * 2.0 * pi * R * R : scale * 4.0 * pi * R;
      };
    }
    m.density_value_ = [scale](const Point&) { return scale; };
    return m;
  }

  // d = 3 density |y|^2; ball integrals in closed form.
  static MeasureModel radial_square() {
    MeasureModel m;
    m.d_ = 3;
    m.name_ = "radial-square";
    const double pi = 3.14159265358979323846;
    m.smooth_ball_ = [pi](const Point& x, double r) {
      const double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      return x2 * (4.0 * pi / 3.0) * r * r * r + (4.0 * pi / 5.0) * std::pow(r, 5);
    };
    m.smooth_singular_ = [pi](const Point& x, double R, int power) {
      const double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
      if (power == 1) return x2 * 2.0 * pi * R * R + pi * std::pow(R, 4);
      return x2 * 4.0 * pi * R + (4.0 * pi / 3.0) * R * R * R;
    };
    m.density_value_ = [](const Point& y) { return y[0] * y[0] + y[1] * y[1] + y[2] * y[2]; };
    return m;
  }

  // Generic density sampled on a grid; ball integrals by the midpoint rule.
  static MeasureModel from_density(GridFunction V, std::string name = "grid-density") {
    MeasureModel m;
    m.d_ = V.domain().dim();
    m.name_ = std::move(name);
    m.grid_density_ = std::make_shared<GridFunction>(std::move(V));
    return m;
  }

  MeasureModel& add_atom(const Point& p, double mass) {
    atoms_.push_back({p, mass});
    return *this;
  }

  int dim() const { return d_; }
  const std::string& describe() const { return name_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool analytic() const { return static_cast<bool>(smooth_ball_); }

  double ball_measure(const Point& x, double r) const {
    double total = 0.0;
    if (smooth_ball_) {
      total = smooth_ball_(x, r);
    } else if (grid_density_) {
      total = ball_integral(*grid_density_, Ball{x, r});
    }
    for (const auto& a : atoms_)
      if (dist(a.location, x) <= r) total += a.mass;
    return total;
  }

  // int_{B(x,R)} |x-y|^{-power} dmu(y), power in {1, 2}.  Grid densities get the
  // singular node removed; the removed cell is bounded analytically and must
  // stay below a tenth of the total.
  double singular_integral(const Point& x, double R, int power) const {
    if (power != 1 && power != 2) throw LabError("singular_integral: power must be 1 or 2");
    double total = 0.0;
    if (smooth_singular_) {
      total = smooth_singular_(x, R, power);
    } else if (grid_density_) {
      if (d_ != 3) throw LabError("singular_integral: grid densities supported in d = 3 only");
      const auto& V = *grid_density_;
      const auto& dom = V.domain();
      const double h = dom.spacing();
      double s = 0.0;
      double near_density = 0.0;
      dom.for_each_node_in_ball(Ball{x, R}, [&](std::size_t i, const Point& p) {
        const double r = dist(p, x);
        if (r < 0.5 * h) {
          near_density = std::max(near_density, V[i]);
          return;  // singular cell handled by the analytic bound below
        }
        s += V[i] / std::pow(r, power) * h * h * h;
      });
      const double pi = 3.14159265358979323846;
      const double cell_bound = (power == 1) ? near_density * 2.0 * pi * 0.25 * h * h
                                             : near_density * 4.0 * pi * 0.5 * h;
      if (cell_bound > 0.1 * (s + cell_bound))
        throw SingularityUnresolvedError(
            "singular_integral: excluded cell dominates the estimate");
      total = s;
    }
    for (const auto& a : atoms_) {
      const double r = dist(a.location, x);
      if (r > R) continue;
      if (r == 0.0)
        throw SingularityUnresolvedError("singular_integral: atom sits at the pole");
      total += a.mass / std::pow(r, power);
    }
    return total;
  }

 private:
  int d_ = 3;
  std::string name_ = "empty";
  std::function<double(const Point&, double)> smooth_ball_;
  std::function<double(const Point&, double, int)> smooth_singular_;
  std::function<double(const Point&)> density_value_;
  std::shared_ptr<GridFunction> grid_density_;
  std::vector<Atom> atoms_;
};

// mu(B(x,r)) / r^{d-2} <= C (r/R)^delta mu(B(x,R)) / R^{d-2} for r <= R,
// with delta from a fixed lattice and C capped; plus the doubling constant
// D = sup mu(B(x,2r)) / (mu(B(x,r)) + r^{d-2}) rounded up to a power of two.
struct GrowthCertification {
  bool ok = false;
  double delta = 0.0;
  double C = 0.0;
  double D = 0.0;
  Point witness_x{0, 0, 0};
  double witness_r = 0.0;
  double witness_R = 0.0;
};

inline GrowthCertification certify_growth(const MeasureModel& mu,
                                          const std::vector<Point>& points, double r_lo,
                                          double r_hi, int ladder = 17, double C_cap = 4.0) {
  if (points.empty() || !(r_lo > 0.0) || !(r_hi > r_lo))
    throw LabError("certify_growth: bad sample plan");
  const int d = mu.dim();
  std::vector<double> radii = geometric_lattice(r_lo, r_hi, std::pow(r_hi / r_lo, 1.0 / (ladder - 1)));

  struct PairSample {
    Point x;
    double r, R, lhs, rhs_base;  // lhs = ratio(r), rhs_base = ratio(R)
  };
  std::vector<PairSample> pairs;
  for (const auto& x : points) {
    std::vector<double> ratio(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
      ratio[i] = mu.ball_measure(x, radii[i]) / std::pow(radii[i], d - 2);
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
      for (std::size_t j = i + 1; j < radii.size(); ++j)
        pairs.push_back({x, radii[i], radii[j], ratio[i], ratio[j]});
  }

  GrowthCertification out;
  const auto deltas = arithmetic_lattice(0.25, 4.0, 0.25);
  for (double delta : deltas) {
    double req = 0.0;
    const PairSample* worst = nullptr;
    for (const auto& p : pairs) {
      const double c = p.lhs / (std::pow(p.r / p.R, delta) * p.rhs_base);
      if (c > req) {
        req = c;
        worst = &p;
      }
    }
    req = std::max(req, 1.0);
    if (req <= C_cap) {
      out.ok = true;
      out.delta = delta;
      out.C = req;
    } else if (!out.ok) {
      // keep the first failing witness (smallest delta) for the report
      if (worst && out.witness_r == 0.0) {
        out.witness_x = worst->x;
        out.witness_r = worst->r;
        out.witness_R = worst->R;
      }
    }
  }

  double Draw = 0.0;
  for (const auto& x : points)
    for (double r : radii) {
      const double q = mu.ball_measure(x, 2.0 * r) /
                       (mu.ball_measure(x, r) + std::pow(r, d - 2));
      Draw = std::max(Draw, q);
    }
  out.D = round_up_pow2(Draw);
  return out;
}

// Sup over samples of the two singular-integral ratios
//   C1 = int_{B} dmu/|x-y|   * R   / mu(B)         (d = 3)
//   C2 = int_{B} dmu/|x-y|^2 * R^2 / mu(B)
struct IntegralEstimates {
  double C1 = 0.0;
  double C2 = 0.0;
};

inline IntegralEstimates check_integral_estimates(const MeasureModel& mu,
                                                  const std::vector<Point>& points,
                                                  const std::vector<double>& radii) {
  IntegralEstimates out;
  for (const auto& x : points)
    for (double R : radii) {
      const double m = mu.ball_measure(x, R);
      if (!(m > 0.0)) continue;
      out.C1 = std::max(out.C1, mu.singular_integral(x, R, 1) * R / m);
      out.C2 = std::max(out.C2, mu.singular_integral(x, R, 2) * R * R / m);
    }
  if (out.C1 == 0.0 && out.C2 == 0.0)
    throw LabError("check_integral_estimates: all sampled balls had zero measure");
  return out;
}

// For r >= rho(x): mu(B(x,r)) <= C (r/rho(x))^N (mu(B(x,rho(x))) + rho(x)^{d-2}).
// Doubling forces N >= log2(D); smaller N is rejected up front.
struct ExtraDecayReport {
  double N = 0.0;
  double C = 0.0;
};

inline ExtraDecayReport check_extra_decay(const MeasureModel& mu,
                                          const std::function<double(const Point&)>& rho,
                                          double N, double D,
                                          const std::vector<Point>& points, double r_hi) {
  if (N < std::log2(std::max(2.0, D)))
    throw LabError("check_extra_decay: N below log2 of the doubling constant");
  const int d = mu.dim();
  ExtraDecayReport out;
  out.N = N;
  for (const auto& x : points) {
    const double rx = rho(x);
    if (!(rx > 0.0)) throw NonPositiveRhoError("check_extra_decay: rho must be positive");
    const double base = mu.ball_measure(x, rx) + std::pow(rx, d - 2);
    const auto ladder = geometric_lattice(rx, std::max(r_hi, 2.0 * rx), 1.3);
    for (double r : ladder) {
      const double q = mu.ball_measure(x, r) / (std::pow(r / rx, N) * base);
      out.C = std::max(out.C, q);
    }
  }
  return out;
}

}  // namespace sczlab
