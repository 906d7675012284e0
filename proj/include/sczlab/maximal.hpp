#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sczlab/critical_radius.hpp"
#include "sczlab/errors.hpp"
#include "sczlab/prng.hpp"
#include "sczlab/weights.hpp"

namespace sczlab {

enum class MaximalKind { Local, ExpCentered, ExpUncentered, SharpLocal };

struct MaximalSpec {
  MaximalKind kind = MaximalKind::ExpCentered;
  double c = 0.0;
  double m = 0.0;

  void validate() const {
    if (c < 0.0 || m < 0.0) throw ConfigError("MaximalSpec: negative exponent");
    if ((kind == MaximalKind::Local || kind == MaximalKind::SharpLocal) && (c != 0.0 || m != 0.0))
      throw ConfigError("MaximalSpec: local kinds take no exponential parameters");
  }
};

namespace detail {

// Dyadic radii from one spacing up to the box diameter, diameter appended.
inline std::vector<double> dyadic_ladder(const GridDomain& dom) {
  std::vector<double> radii;
  const double diam = dom.box_diameter();
  for (double r = dom.spacing(); r <= diam; r *= 2.0) radii.push_back(r);
  if (radii.empty() || radii.back() < diam) radii.push_back(diam);
  return radii;
}

// 1-d node index range of a ball; bounds replicate for_each_node_in_ball so
// prefix-sum averages agree with the generic path node for node.
struct AxisWindow {
  int lo = 0;
  int hi = -1;
};

inline AxisWindow axis_window(const GridDomain& dom, double cc, double r) {
  const int n = dom.nodes_per_axis();
  const double L = dom.half_width(), h = dom.spacing(), r2 = r * r;
  AxisWindow win;
  win.lo = std::clamp(static_cast<int>(std::floor((cc - r + L) / h)) - 1, 0, n - 1);
  win.hi = std::clamp(static_cast<int>(std::ceil((cc + r + L) / h)) + 1, 0, n - 1);
  auto outside = [&](int i) {
    const double dx = dom.axis_coord(i) - cc;
    return dx * dx > r2;
  };
  while (win.lo <= win.hi && outside(win.lo)) ++win.lo;
  while (win.hi >= win.lo && outside(win.hi)) --win.hi;
  return win;
}

}  // namespace detail

// Nodewise supremum over the radius ladder (dyadic plus the critical radius)
// of the kind's ball expression.  Uncentered kinds take the sup over every
// node-centered ball covering the point, with rho read at the ball center.
inline GridFunction apply_maximal(const GridFunction& f,
                                  const std::function<double(const Point&)>& rho,
                                  const MaximalSpec& spec) {
  spec.validate();
  const auto& dom = f.domain();
  const std::size_t N = dom.num_nodes();
  const bool d1 = dom.dim() == 1;

  GridFunction absf(dom);
  for (std::size_t i = 0; i < N; ++i) absf[i] = std::fabs(f[i]);
  std::vector<double> pre;
  if (d1) {
    pre.assign(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) pre[i + 1] = pre[i] + absf[i];
  }

  auto mean_abs = [&](const Point& ctr, double r) -> double {
    if (d1) {
      const auto w = detail::axis_window(dom, ctr[0], r);
      if (w.hi < w.lo) return 0.0;
      return (pre[static_cast<std::size_t>(w.hi) + 1] - pre[static_cast<std::size_t>(w.lo)]) /
             static_cast<double>(w.hi - w.lo + 1);
    }
    double s = 0.0;
    std::size_t cnt = 0;
    dom.for_each_node_in_ball({ctr, r}, [&](std::size_t i, const Point&) {
      s += absf[i];
      ++cnt;
    });
    return cnt ? s / static_cast<double>(cnt) : 0.0;
  };

  auto scatter_max = [&](const Point& ctr, double r, double val, GridFunction& dst) {
    if (!(val > 0.0)) return;
    if (d1) {
      const auto w = detail::axis_window(dom, ctr[0], r);
      for (int i = w.lo; i <= w.hi; ++i)
        if (val > dst[static_cast<std::size_t>(i)]) dst[static_cast<std::size_t>(i)] = val;
      return;
    }
    dom.for_each_node_in_ball({ctr, r}, [&](std::size_t i, const Point&) {
      if (val > dst[i]) dst[i] = val;
    });
  };

  auto checked_rho = [&](const Point& x) {
    const double rx = rho(x);
    if (!(rx > 0.0) || !std::isfinite(rx))
      throw NonPositiveRhoError("apply_maximal: rho must be finite and positive");
    return rx;
  };

  auto factor = [&](double r, double rx) {
    return std::exp(-spec.c * std::pow(1.0 + r / rx, spec.m));
  };

  const auto ladder = detail::dyadic_ladder(dom);
  GridFunction out(dom, 0.0);

  if (spec.kind == MaximalKind::ExpCentered) {
    for (std::size_t i = 0; i < N; ++i) {
      const Point x = dom.coord(i);
      const double rx = checked_rho(x);
      double best = 0.0;
      for (double r : ladder) best = std::max(best, factor(r, rx) * mean_abs(x, r));
      best = std::max(best, factor(rx, rx) * mean_abs(x, rx));
      out[i] = best;
    }
    return out;
  }

  if (spec.kind == MaximalKind::Local || spec.kind == MaximalKind::ExpUncentered) {
    const bool local = spec.kind == MaximalKind::Local;
    for (std::size_t j = 0; j < N; ++j) {
      const Point xc = dom.coord(j);
      const double rc = checked_rho(xc);
      for (double r : ladder) {
        if (local && r > rc * (1.0 + 1e-12)) break;
        scatter_max(xc, r, (local ? 1.0 : factor(r, rc)) * mean_abs(xc, r), out);
      }
      scatter_max(xc, rc, (local ? 1.0 : factor(rc, rc)) * mean_abs(xc, rc), out);
    }
    return out;
  }

  // sharp kind: sub-critical oscillation plus the critical-ball average
  GridFunction osc(dom, 0.0), crit(dom, 0.0);
  for (std::size_t j = 0; j < N; ++j) {
    const Point xc = dom.coord(j);
    const double rc = checked_rho(xc);
    for (double r : ladder) {
      if (!(r < rc)) break;
      const Ball b{xc, r};
      double s = 0.0;
      std::size_t cnt = 0;
      dom.for_each_node_in_ball(b, [&](std::size_t i, const Point&) {
        s += f[i];
        ++cnt;
      });
      if (cnt == 0) continue;
      const double fb = s / static_cast<double>(cnt);
      double dev = 0.0;
      dom.for_each_node_in_ball(b, [&](std::size_t i, const Point&) { dev += std::fabs(f[i] - fb); });
      scatter_max(xc, r, dev / static_cast<double>(cnt), osc);
    }
    scatter_max(xc, rc, mean_abs(xc, rc), crit);
  }
  for (std::size_t i = 0; i < N; ++i) out[i] = osc[i] + crit[i];
  return out;
}

// Uncentered versus centered exponential maximal functions under the
// parameter map that makes the uncentered one controlled.
struct CenteredComparison {
  GridFunction ratio;
  double max_ratio = 0.0;
  Point witness{0.0, 0.0, 0.0};
};

inline CenteredComparison compare_centered_uncentered(const GridFunction& f,
                                                      const CriticalRadius& crho, double c1,
                                                      double m1, double c2, double m2) {
  if (m1 < (crho.k0 + 1.0) * m2 * (1.0 - 1e-12))
    throw ParameterRelationViolatedError("compare_centered_uncentered: need m1 >= (k0+1) m2");
  if (c1 < c2 * std::pow(2.0 * crho.C0, m2) * (1.0 - 1e-12))
    throw ParameterRelationViolatedError("compare_centered_uncentered: need c1 >= c2 (2 C0)^m2");
  const GridFunction u = apply_maximal(f, crho.rho, {MaximalKind::ExpUncentered, c1, m1});
  const GridFunction v = apply_maximal(f, crho.rho, {MaximalKind::ExpCentered, c2, m2});
  CenteredComparison rep;
  rep.ratio = GridFunction(f.domain(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(v[i] > 0.0)) continue;
    rep.ratio[i] = u[i] / v[i];
    if (rep.ratio[i] > rep.max_ratio) {
      rep.max_ratio = rep.ratio[i];
      rep.witness = f.domain().coord(i);
    }
  }
  return rep;
}

// Weighted bounded-oscillation norm: sub-critical oscillation and critical
// averages, each ball weighted by its weight sup, against the sharp-function
// characterization (the two agree within a factor of 2 by construction).
struct BMOReport {
  double norm = 0.0;
  double osc_part = 0.0;
  double avg_part = 0.0;
  double msharp_winf = 0.0;
  double equiv_ratio = 1.0;          // msharp_winf / norm, in [1, 2]
  double best_constant_ratio = 1.0;  // mean |f - f_B| over best-constant deviation, in [1, 2]
};

inline BMOReport bmo_norm(const GridFunction& f, const GridFunction& w,
                          const std::function<double(const Point&)>& rho) {
  const auto& dom = f.domain();
  if (!w.domain().same_layout(dom)) throw DomainTooSmallError("bmo_norm: mismatched grids");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) throw NegativeWeightError("bmo_norm: weight has a negative node value");
    if (w[i] == 0.0) throw ZeroWeightNodeError("bmo_norm: weight vanishes at a node");
  }
  const auto ladder = detail::dyadic_ladder(dom);
  BMOReport rep;
  std::vector<double> vals;
  for (std::size_t j = 0; j < dom.num_nodes(); ++j) {
    const Point xc = dom.coord(j);
    const double rc = rho(xc);
    if (!(rc > 0.0)) throw NonPositiveRhoError("bmo_norm: rho must be positive");
    for (double r : ladder) {
      if (!(r < rc)) break;
      vals.clear();
      double s = 0.0, maxw = 0.0;
      dom.for_each_node_in_ball({xc, r}, [&](std::size_t i, const Point&) {
        vals.push_back(f[i]);
        s += f[i];
        maxw = std::max(maxw, w[i]);
      });
      if (vals.empty()) continue;
      const double n = static_cast<double>(vals.size());
      const double fb = s / n;
      double dev = 0.0;
      for (double v : vals) dev += std::fabs(v - fb);
      dev /= n;
      rep.osc_part = std::max(rep.osc_part, maxw * dev);
      std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
      const double med = vals[vals.size() / 2];
      double devm = 0.0;
      for (double v : vals) devm += std::fabs(v - med);
      devm /= n;
      if (devm > 0.0) rep.best_constant_ratio = std::max(rep.best_constant_ratio, dev / devm);
    }
    double s = 0.0, maxw = 0.0;
    std::size_t cnt = 0;
    dom.for_each_node_in_ball({xc, rc}, [&](std::size_t i, const Point&) {
      s += std::fabs(f[i]);
      maxw = std::max(maxw, w[i]);
      ++cnt;
    });
    if (cnt) rep.avg_part = std::max(rep.avg_part, maxw * s / static_cast<double>(cnt));
  }
  rep.norm = std::max(rep.osc_part, rep.avg_part);
  const GridFunction sharp = apply_maximal(f, rho, {MaximalKind::SharpLocal, 0.0, 0.0});
  for (std::size_t i = 0; i < sharp.size(); ++i)
    rep.msharp_winf = std::max(rep.msharp_winf, sharp[i] * w[i]);
  rep.equiv_ratio = rep.norm > 0.0 ? rep.msharp_winf / rep.norm : 1.0;
  return rep;
}

// Probe families for operator-norm lower bounds.  Deterministic in the seed.
inline std::vector<GridFunction> make_probes(const GridDomain& dom, const std::string& kind,
                                             std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  const double h = dom.spacing(), L = dom.half_width();
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Point ctr = rng.point_in_box(dom.dim(), L);
    if (kind == "gaussians") {
      const double width = rng.log_uniform(2.0 * h, 0.5 * L);
      out.emplace_back(dom, [&](const Point& x) {
        return std::exp(-dist2(x, ctr) / (2.0 * width * width));
      });
    } else if (kind == "indicators") {
      const double r = rng.log_uniform(2.0 * h, 0.45 * L);
      out.emplace_back(dom, [&](const Point& x) { return dist(x, ctr) <= r ? 1.0 : 0.0; });
    } else if (kind == "dyadic_bumps") {
      const int levels = std::max(1, static_cast<int>(std::floor(std::log2(0.45 * L / (2.0 * h)))));
      const double r = 2.0 * h * std::pow(2.0, rng.uniform_int(0, levels));
      out.emplace_back(dom, [&](const Point& x) { return std::max(0.0, 1.0 - dist(x, ctr) / r); });
    } else {
      throw ConfigError("make_probes: unknown probe kind '" + kind + "'");
    }
  }
  return out;
}

// Largest Rayleigh-type quotient over the probes: a certified lower bound on
// the L^p(w) operator norm, never a claim of the true sup.
struct NormEstimate {
  double value = 0.0;
  std::size_t argmax = 0;
  std::vector<double> per_probe;
};

inline NormEstimate empirical_operator_norm(
    const std::function<GridFunction(const GridFunction&)>& T, double p, const GridFunction& w,
    const std::vector<GridFunction>& probes) {
  if (probes.empty()) throw LabError("empirical_operator_norm: no probes");
  NormEstimate est;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const double nf = weighted_lp_norm(probes[k], w, p);
    if (!(nf > 0.0)) throw LabError("empirical_operator_norm: zero probe");
    const double ratio = weighted_lp_norm(T(probes[k]), w, p) / nf;
    est.per_probe.push_back(ratio);
    if (ratio > est.value) {
      est.value = ratio;
      est.argmax = k;
    }
  }
  return est;
}

// Both directions of the maximal characterization: the operator at the mapped
// larger rate is probe-stable on L^p(w), and boundedness maps back into the
// weight class with the inverse parameter map.
struct BoundednessReport {
  double h_constant = 0.0;
  double c2 = 0.0;
  std::vector<std::size_t> probe_counts;
  std::vector<double> norms;
  std::vector<double> growths;
  bool dir1_pass = false;
  double m1_prime = 0.0;
  double c1_prime = 0.0;
  double h_prime_constant = 0.0;
  bool dir2_pass = false;
  bool pass = false;
};

inline BoundednessReport maximal_boundedness_experiment(const GridFunction& w,
                                                        const CriticalRadius& crho, double p,
                                                        double c1, double m1,
                                                        std::size_t base_probes = 8,
                                                        std::size_t doublings = 3,
                                                        std::uint64_t seed = 404) {
  const auto& dom = w.domain();
  BoundednessReport rep;
  const BallFamily family = random_family(dom, 400, seed + 1);
  WeightClassSpec hs;
  hs.kind = WeightKind::H;
  hs.p = p;
  hs.c = c1;
  hs.m = m1;
  rep.h_constant = class_constant(w, crho.rho, hs, family).constant;

  rep.c2 = 1.05 * c1 * std::pow(8.0 * crho.C0, m1);
  const MaximalSpec ms{MaximalKind::ExpCentered, rep.c2, m1};
  const std::size_t total = base_probes << doublings;
  const auto probes = make_probes(dom, "gaussians", total, seed);
  std::vector<double> ratios;
  for (const auto& f : probes) {
    const double nf = weighted_lp_norm(f, w, p);
    ratios.push_back(weighted_lp_norm(apply_maximal(f, crho.rho, ms), w, p) / nf);
  }
  for (std::size_t sz = base_probes; sz <= total; sz *= 2) {
    rep.probe_counts.push_back(sz);
    rep.norms.push_back(*std::max_element(ratios.begin(), ratios.begin() + sz));
  }
  rep.dir1_pass = true;
  for (std::size_t i = 0; i + 1 < rep.norms.size(); ++i) {
    rep.growths.push_back((rep.norms[i + 1] - rep.norms[i]) / rep.norms[i]);
    if (!(rep.growths.back() < 0.10)) rep.dir1_pass = false;
  }

  rep.m1_prime = (crho.k0 + 1.0) * m1;
  rep.c1_prime = rep.c2 * std::pow(2.0 * crho.C0, m1);
  hs.c = rep.c1_prime;
  hs.m = rep.m1_prime;
  rep.h_prime_constant = class_constant(w, crho.rho, hs, family).constant;
  rep.dir2_pass = std::isfinite(rep.h_prime_constant) && rep.h_prime_constant > 0.0;
  rep.pass = rep.dir1_pass && rep.dir2_pass;
  return rep;
}

// Truncated geometric majorant built from the weighted uncentered maximal
// operator.  The norm placeholder is a probe lower bound inflated by 1.5; the
// three majorant properties are then verified directly by the caller.
struct RdFReport {
  GridFunction majorant;
  GridFunction tail_field;  // last iterate over (2 norm)^{K-1}, for the nodewise check
  double t_norm = 0.0;
  std::size_t k_terms = 0;
  double tail_norm_bound = 0.0;
};

inline RdFReport rdf_iteration(const GridFunction& h, const GridFunction& w,
                               const CriticalRadius& crho, double p, double c1, double m1,
                               std::size_t k_terms = 12, std::uint64_t seed = 505) {
  if (p <= 1.0) throw ConfigError("rdf_iteration: needs p > 1");
  if (k_terms < 1) throw ConfigError("rdf_iteration: needs at least one term");
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h[i] < 0.0) throw LabError("rdf_iteration: h must be nonnegative");
  const auto& dom = h.domain();
  GridFunction wf = detail::positive_weight(w, nullptr);
  GridFunction sigma(dom), wpow(dom);
  const double e = 1.0 / (p - 1.0);
  for (std::size_t i = 0; i < wf.size(); ++i) {
    sigma[i] = std::pow(wf[i], -e);
    wpow[i] = std::pow(wf[i], e);
  }
  const MaximalSpec ms{MaximalKind::ExpUncentered, c1, m1};
  auto Tt = [&](const GridFunction& g) {
    GridFunction arg(dom);
    for (std::size_t i = 0; i < g.size(); ++i) arg[i] = g[i] * sigma[i];
    GridFunction mg = apply_maximal(arg, crho.rho, ms);
    for (std::size_t i = 0; i < mg.size(); ++i) mg[i] *= wpow[i];
    return mg;
  };

  auto probes = make_probes(dom, "gaussians", 6, seed);
  if (h.max_abs() > 0.0) probes.push_back(h);
  const double t_norm = 1.5 * empirical_operator_norm(Tt, p, sigma, probes).value;
  if (!(t_norm > 0.0)) throw NormEstimateZeroError("rdf_iteration: operator norm estimate is zero");

  RdFReport rep;
  rep.t_norm = t_norm;
  rep.k_terms = k_terms;
  rep.majorant = h;
  GridFunction cur = h;
  double denom = 1.0;
  for (std::size_t k = 1; k < k_terms; ++k) {
    cur = Tt(cur);
    denom *= 2.0 * t_norm;
    for (std::size_t i = 0; i < cur.size(); ++i) rep.majorant[i] += cur[i] / denom;
  }
  rep.tail_field = Tt(cur);
  for (std::size_t i = 0; i < rep.tail_field.size(); ++i) rep.tail_field[i] /= denom;
  rep.tail_norm_bound =
      std::pow(2.0, 1.0 - static_cast<double>(k_terms)) * weighted_lp_norm(h, sigma, p);
  return rep;
}

// Endpoint experiment: probes with unit weighted sup norm pushed through an
// operator, oscillation norms collected, weight admissibility gated by the
// fitted growth rate of its inverse power.
struct EndpointReport {
  double c_threshold = 0.0;
  double c_required = 0.0;
  double h1_constant = 0.0;
  std::vector<double> bmo_norms;
  double max_bmo_half = 0.0;
  double max_bmo_full = 0.0;
  double growth = 0.0;
  bool stable = false;
};

inline EndpointReport endpoint_bmo_experiment(
    const std::function<GridFunction(const GridFunction&)>& T, const GridFunction& w,
    const CriticalRadius& crho, double kernel_c1, double kernel_m1, double inverse_power = 1.0,
    bool pointwise = true, std::size_t probe_count = 8, std::uint64_t seed = 606) {
  const auto& dom = w.domain();
  EndpointReport rep;
  rep.c_threshold =
      (pointwise ? 1.0 : inverse_power) * kernel_c1 * std::pow(2.0, -kernel_m1);

  GridFunction wf = detail::positive_weight(w, nullptr);
  GridFunction wi(dom);
  for (std::size_t i = 0; i < wf.size(); ++i) wi[i] = std::pow(wf[i], -inverse_power);
  const BallFamily family = random_family(dom, 300, seed + 1);
  std::vector<double> A, logq;
  std::vector<double> quot;
  for (const auto& b : family.balls) {
    const auto s = detail::ball_sums(wi, nullptr, b);
    if (s.count == 0) continue;
    const double q = (s.sum_w / static_cast<double>(s.count)) / s.min_w;
    A.push_back(std::pow(1.0 + b.radius / crho(b.center), kernel_m1));
    quot.push_back(q);
    logq.push_back(std::log(q));
  }
  if (A.size() < 2) throw EmptyFamilyError("endpoint_bmo_experiment: too few usable balls");
  rep.c_required = std::max(0.0, least_squares_line(A, logq).slope);
  for (std::size_t i = 0; i < quot.size(); ++i)
    rep.h1_constant = std::max(rep.h1_constant, quot[i] * std::exp(-rep.c_required * A[i]));
  if (rep.c_required >= rep.c_threshold)
    throw WeightOutOfRangeError("endpoint_bmo_experiment: inverse weight grows above the kernel threshold");

  const auto bumps = make_probes(dom, "gaussians", 2 * probe_count, seed);
  for (const auto& g : bumps) {
    const double gmax = g.max_abs();
    GridFunction f(dom);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g[i] / (gmax * wf[i]);
    rep.bmo_norms.push_back(bmo_norm(T(f), wf, crho.rho).norm);
  }
  rep.max_bmo_half = *std::max_element(rep.bmo_norms.begin(), rep.bmo_norms.begin() + probe_count);
  rep.max_bmo_full = *std::max_element(rep.bmo_norms.begin(), rep.bmo_norms.end());
  rep.growth = (rep.max_bmo_full - rep.max_bmo_half) / rep.max_bmo_half;
  rep.stable = rep.growth < 0.10;
  return rep;
}

}  // namespace sczlab
