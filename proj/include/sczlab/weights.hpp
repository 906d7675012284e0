#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sczlab/errors.hpp"
#include "sczlab/families.hpp"
#include "sczlab/fit.hpp"
#include "sczlab/grid.hpp"

namespace sczlab {

enum class WeightKind { Ap, ApRhoTheta, ApLoc, H, RH, Doubling };

struct WeightClassSpec {
  WeightKind kind = WeightKind::H;
  double p = 2.0;
  double theta = 0.0;  // ApRhoTheta
  double c = 0.0;      // H, RH, Doubling
  double m = 0.0;
  double eta = 1.5;    // RH
  double kappa = 1.0;  // Doubling

  void validate() const {
    if (p < 1.0) throw ConfigError("WeightClassSpec: p must be >= 1");
    if (theta < 0.0 || c < 0.0 || m < 0.0) throw ConfigError("WeightClassSpec: negative exponent");
    if (kind == WeightKind::RH && eta <= 1.0) throw ConfigError("WeightClassSpec: eta must be > 1");
    if (kind == WeightKind::Doubling && kappa < 1.0)
      throw ConfigError("WeightClassSpec: kappa must be >= 1");
  }
};

struct ClassReport {
  double constant = 0.0;
  Ball witness;
  std::string family;
  bool divergence = false;
  std::size_t floored_nodes = 0;
  double max_clipping = 0.0;
};

namespace detail {

// negative values are an input error; zeros are floored so the dual power exists
inline GridFunction positive_weight(const GridFunction& w, std::size_t* floored) {
  GridFunction out = w;
  std::size_t n = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < 0.0) throw NegativeWeightError("weight has a negative node value");
    if (out[i] == 0.0) {
      out[i] = 1e-300;
      ++n;
    }
  }
  if (floored) *floored = n;
  return out;
}

struct BallSums {
  double sum_w = 0.0, sum_aux = 0.0, min_w = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
};

inline BallSums ball_sums(const GridFunction& w, const GridFunction* aux, const Ball& b) {
  BallSums s;
  w.domain().for_each_node_in_ball(b, [&](std::size_t i, const Point&) {
    s.sum_w += w[i];
    if (aux) s.sum_aux += (*aux)[i];
    s.min_w = std::min(s.min_w, w[i]);
    ++s.count;
  });
  return s;
}

}  // namespace detail

// Sup over the family of the normalized per-ball class expression.
inline ClassReport class_constant(const GridFunction& w_in,
                                  const std::function<double(const Point&)>& rho,
                                  const WeightClassSpec& spec, const BallFamily& family) {
  spec.validate();
  if (family.balls.empty()) throw EmptyFamilyError("class_constant: empty ball family");
  ClassReport rep;
  rep.family = family.policy;
  const GridFunction w = detail::positive_weight(w_in, &rep.floored_nodes);
  const auto& dom = w.domain();

  const bool p1 = spec.p == 1.0;
  GridFunction aux;  // dual power for Ap-type kinds, eta power for RH
  bool use_aux = false;
  if (spec.kind == WeightKind::RH) {
    aux = GridFunction(dom);
    for (std::size_t i = 0; i < w.size(); ++i) aux[i] = std::pow(w[i], spec.eta);
    use_aux = true;
  } else if (!p1 && spec.kind != WeightKind::Doubling) {
    aux = GridFunction(dom);
    const double e = -1.0 / (spec.p - 1.0);
    for (std::size_t i = 0; i < w.size(); ++i) aux[i] = std::pow(w[i], e);
    use_aux = true;
  }

  std::size_t used = 0;
  for (const auto& b : family.balls) {
    const double rx = rho(b.center);
    if (!(rx > 0.0)) throw NonPositiveRhoError("class_constant: rho must be positive");
    if (spec.kind == WeightKind::ApLoc && b.radius > rx * (1.0 + 1e-12)) continue;

    double value = 0.0;
    if (spec.kind == WeightKind::Doubling) {
      const auto outer = detail::ball_sums(w, nullptr, b);
      if (outer.count == 0) continue;
      for (double f : {0.5, 0.25, 0.125}) {
        const Ball inner{b.center, f * b.radius};
        const auto in = detail::ball_sums(w, nullptr, inner);
        if (in.count == 0 || in.sum_w <= 0.0) continue;
        const double q = outer.sum_w /
                         (std::pow(1.0 / f, dom.dim() * spec.kappa) *
                          std::exp(spec.c * std::pow(1.0 + b.radius / rx, spec.m)) * in.sum_w);
        value = std::max(value, q);
      }
    } else {
      const auto s = detail::ball_sums(w, use_aux ? &aux : nullptr, b);
      if (s.count == 0) continue;
      const double n = static_cast<double>(s.count);
      double numer;
      if (spec.kind == WeightKind::RH) {
        numer = std::pow(s.sum_aux / n, 1.0 / spec.eta) / (s.sum_w / n);
      } else if (p1) {
        numer = (s.sum_w / n) / s.min_w;
      } else {
        numer = std::pow(s.sum_w / n, 1.0 / spec.p) *
                std::pow(s.sum_aux / n, (spec.p - 1.0) / spec.p);
      }
      const double u = 1.0 + b.radius / rx;
      double denom = 1.0;
      if (spec.kind == WeightKind::ApRhoTheta) denom = std::pow(u, spec.theta);
      if (spec.kind == WeightKind::H || spec.kind == WeightKind::RH)
        denom = std::exp(spec.c * std::pow(u, spec.m));
      value = numer / denom;
    }

    ++used;
    rep.max_clipping = std::max(rep.max_clipping, clipping_fraction(dom, b));
    if (value > rep.constant) {
      rep.constant = value;
      rep.witness = b;
    }
  }
  if (used == 0) throw EmptyFamilyError("class_constant: no usable ball in the family");
  return rep;
}

// Family-doubling stability: the sup over the first half versus the whole
// family, both drawn from one stream.
struct StabilityReport {
  double constant_half = 0.0;
  double constant_full = 0.0;
  double rel_change = 0.0;
  bool stable = false;
};

inline StabilityReport stable_class_constant(const GridFunction& w,
                                             const std::function<double(const Point&)>& rho,
                                             const WeightClassSpec& spec, const GridDomain& dom,
                                             std::size_t count, std::uint64_t seed,
                                             double r_lo = 0.0, double r_hi = 0.0,
                                             double tol = 0.05) {
  BallFamily full = random_family(dom, 2 * count, seed, r_lo, r_hi);
  BallFamily half = full;
  half.balls.resize(count);
  StabilityReport rep;
  rep.constant_half = class_constant(w, rho, spec, half).constant;
  rep.constant_full = class_constant(w, rho, spec, full).constant;
  rep.rel_change = (rep.constant_full - rep.constant_half) / rep.constant_full;
  rep.stable = rep.rel_change < tol;
  return rep;
}

// Normalized A_p product on the balls B(0, 2 l): the exponential-weight
// counterexample.  Reports the ladder, the least-squares log-slope, and the
// fitted lower-bound constant against l^{-d} (e^l - 1)^{1/p}.
struct GrowthTable {
  std::vector<double> ells;
  std::vector<double> products;
  double log_slope = 0.0;       // least squares d(log P)/d(ell)
  double lower_bound_c = 0.0;   // min P(l) / (l^{-d} (e^l - 1)^{1/p})
};

inline GrowthTable ap_rho_divergence(const GridFunction& w_in, double p,
                                     const std::vector<double>& ells) {
  if (ells.size() < 2) throw LabError("ap_rho_divergence: need at least two radii");
  const auto& dom = w_in.domain();
  for (double l : ells)
    if (2.0 * l > dom.half_width())
      throw DomainTooSmallError("ap_rho_divergence: ball B(0,2l) leaves the box");
  GridFunction w = detail::positive_weight(w_in, nullptr);
  GridFunction sigma(dom);
  if (p > 1.0)
    for (std::size_t i = 0; i < w.size(); ++i) sigma[i] = std::pow(w[i], -1.0 / (p - 1.0));

  GrowthTable t;
  t.ells = ells;
  std::vector<double> logs;
  t.lower_bound_c = std::numeric_limits<double>::infinity();
  for (double l : ells) {
    const Ball b{Point{0, 0, 0}, 2.0 * l};
    const auto s = detail::ball_sums(w, p > 1.0 ? &sigma : nullptr, b);
    if (s.count == 0) throw EmptyBallError("ap_rho_divergence: empty ladder ball");
    const double n = static_cast<double>(s.count);
    const double P = (p > 1.0) ? std::pow(s.sum_w / n, 1.0 / p) *
                                     std::pow(s.sum_aux / n, (p - 1.0) / p)
                               : (s.sum_w / n) / s.min_w;
    t.products.push_back(P);
    logs.push_back(std::log(P));
    const double bound = std::pow(l, -dom.dim()) * std::pow(std::exp(l) - 1.0, 1.0 / p);
    t.lower_bound_c = std::min(t.lower_bound_c, P / bound);
  }
  t.log_slope = least_squares_line(ells, logs).slope;
  return t;
}

// Divergence of a constant along a dyadic radius ladder: consecutive log-log
// slopes that both steepen markedly and exceed 1 flag super-polynomial growth.
struct DivergenceProbe {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> slopes;
  bool divergent = false;
};

inline DivergenceProbe divergence_probe(const std::vector<double>& radii,
                                        const std::vector<double>& values) {
  if (radii.size() != values.size() || radii.size() < 3)
    throw LabError("divergence_probe: need >= 3 ladder points");
  DivergenceProbe pr;
  pr.radii = radii;
  pr.values = values;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    pr.slopes.push_back((std::log(values[i + 1]) - std::log(values[i])) /
                        (std::log(radii[i + 1]) - std::log(radii[i])));
  const double first = std::max(pr.slopes.front(), 0.05);
  const double last = pr.slopes.back();
  pr.divergent = last > 1.0 && last >= 1.5 * first;
  return pr;
}

// The three-class comparison on one family: polynomial class, exponential
// class, and the sub-critical class, with the two per-ball domination steps
// that prove the inclusions.
struct InclusionReport {
  double a_theta_constant = 0.0;  // at theta_used
  double theta_used = 0.0;
  bool a_theta_divergent = false;
  double h_constant = 0.0;  // at (c, m_used)
  double m_used = 0.0;
  double a_loc_constant = 0.0;
  bool poly_step_ok = false;  // H expr <= K(theta,c,m) * A^theta expr per ball
  bool loc_step_ok = false;   // A^loc expr <= e^{c 2^m} * H expr per sub-critical ball
};

inline InclusionReport check_inclusions(const GridFunction& w,
                                        const std::function<double(const Point&)>& rho,
                                        double p, double c, const BallFamily& family,
                                        double theta = 2.0, double m = 1.0) {
  InclusionReport rep;
  rep.theta_used = theta;
  rep.m_used = m;
  WeightClassSpec s;
  s.p = p;

  s.kind = WeightKind::ApRhoTheta;
  s.theta = theta;
  rep.a_theta_constant = class_constant(w, rho, s, family).constant;

  s.kind = WeightKind::H;
  s.c = c;
  s.m = m;
  rep.h_constant = class_constant(w, rho, s, family).constant;

  s.kind = WeightKind::ApLoc;
  rep.a_loc_constant = class_constant(w, rho, s, family).constant;

  // sup_{t >= 1} t^theta e^{-c t^m}: the factor by which exp domination beats
  // the polynomial factor, evaluated at the calculus maximum
  double K = 1.0;
  if (c > 0.0 && m > 0.0) {
    const double tstar = std::max(1.0, std::pow(theta / (c * m), 1.0 / m));
    K = std::pow(tstar, theta) * std::exp(-c * std::pow(tstar, m));
  }
  rep.poly_step_ok = true;
  rep.loc_step_ok = true;
  const double bump = std::exp(c * std::pow(2.0, m));
  for (const auto& b : family.balls) {
    const double u = 1.0 + b.radius / rho(b.center);
    const double h_over_theta = std::pow(u, theta) * std::exp(-c * std::pow(u, m));
    if (h_over_theta > K * (1.0 + 1e-12)) rep.poly_step_ok = false;
    if (b.radius <= rho(b.center) && std::exp(c * std::pow(u, m)) > bump * (1.0 + 1e-12))
      rep.loc_step_ok = false;
  }

  // divergence of the polynomial-class constant along a dyadic ladder
  const auto& dom = w.domain();
  std::vector<double> radii, vals;
  for (double r = 4.0 * dom.spacing(); r <= 0.9 * dom.half_width(); r *= 2.0) radii.push_back(r);
  if (radii.size() >= 3) {
    s.kind = WeightKind::ApRhoTheta;
    for (double r : radii) {
      BallFamily one;
      one.policy = "ladder";
      one.balls.push_back({Point{0, 0, 0}, r});
      vals.push_back(class_constant(w, rho, s, one).constant);
    }
    rep.a_theta_divergent = divergence_probe(radii, vals).divergent;
  }
  return rep;
}

// Lemma-level structure checks on a shared family: p-monotonicity, the dual
// weight identity, the two-weight factorization, and the induced doubling.
struct StructureReport {
  double h_p = 0.0;
  double h_q = 0.0;  // q = p + 1 on the same family; must not exceed h_p
  bool monotone_ok = false;
  double dual_gap = 0.0;  // max relative gap of the per-ball duality identity
  bool dual_ok = false;
  double factorization_constant = 0.0;
  double doubling_constant = 0.0;
  bool holder_floor_ok = false;  // per-ball product >= 1
  bool involution_ok = false;    // sigma(sigma(w)) == w nodewise
};

inline StructureReport structure_lemmas(const GridFunction& w_in,
                                        const std::function<double(const Point&)>& rho,
                                        double p, double c, double m, const BallFamily& family,
                                        const GridFunction* w1 = nullptr,
                                        const GridFunction* w2 = nullptr, double c1 = 0.0,
                                        double c2 = 0.0, double m12 = 1.0) {
  if (p <= 1.0) throw ConfigError("structure_lemmas: duality needs p > 1");
  StructureReport rep;
  GridFunction w = detail::positive_weight(w_in, nullptr);
  const auto& dom = w.domain();

  WeightClassSpec s;
  s.kind = WeightKind::H;
  s.p = p;
  s.c = c;
  s.m = m;
  rep.h_p = class_constant(w, rho, s, family).constant;
  s.p = p + 1.0;
  rep.h_q = class_constant(w, rho, s, family).constant;
  rep.monotone_ok = rep.h_q <= rep.h_p * (1.0 + 1e-9);

  // dual weight: per-ball expressions of w at p and sigma at p' coincide
  const double pp = p / (p - 1.0);
  GridFunction sigma(dom);
  for (std::size_t i = 0; i < w.size(); ++i) sigma[i] = std::pow(w[i], 1.0 - pp);
  GridFunction sigma_aux(dom);
  for (std::size_t i = 0; i < w.size(); ++i) sigma_aux[i] = std::pow(sigma[i], -1.0 / (pp - 1.0));
  rep.holder_floor_ok = true;
  for (const auto& b : family.balls) {
    const auto a = detail::ball_sums(w, &sigma, b);
    if (a.count == 0) continue;
    const double n = static_cast<double>(a.count);
    const double ew = std::pow(a.sum_w / n, 1.0 / p) * std::pow(a.sum_aux / n, (p - 1.0) / p);
    const double es = std::pow(a.sum_aux / n, 1.0 / pp) * std::pow(a.sum_w / n, (pp - 1.0) / pp);
    rep.dual_gap = std::max(rep.dual_gap, std::fabs(ew - es) / ew);
    if (ew < 1.0 - 1e-9) rep.holder_floor_ok = false;
  }
  rep.dual_ok = rep.dual_gap < 1e-9;

  // sigma_aux is sigma run through the dual construction again at p'
  rep.involution_ok = true;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (std::fabs(sigma_aux[i] - w[i]) > 1e-9 * std::max(1.0, std::fabs(w[i])))
      rep.involution_ok = false;

  if (w1 && w2) {
    GridFunction prod(dom);
    for (std::size_t i = 0; i < prod.size(); ++i)
      prod[i] = (*w1)[i] * std::pow((*w2)[i], 1.0 - p);
    s.p = p;
    s.c = c1 + c2 * (p - 1.0);
    s.m = m12;
    rep.factorization_constant = class_constant(prod, rho, s, family).constant;
  }

  WeightClassSpec dbl;
  dbl.kind = WeightKind::Doubling;
  dbl.kappa = p;
  dbl.c = c * p;
  dbl.m = m;
  rep.doubling_constant = class_constant(w, rho, dbl, family).constant;
  return rep;
}

// Reverse Hölder sweep over an eta lattice, the exponent bookkeeping of the
// openness argument checked per ball, and the dilated-eta constant.
struct ReverseHolderReport {
  std::vector<double> etas;
  std::vector<double> constants;  // envelope at the fitted rate
  std::vector<double> cstars;     // fitted growth rates
  double m_tilde = 0.0;
  double eta_used = 0.0;
  double beta = 0.0;
  double q = 0.0;
  double c2 = 0.0;
  double m2 = 0.0;
  double c_tilde = 0.0;
  bool per_ball_ok = false;
  double openness_constant = 0.0;
};

inline ReverseHolderReport reverse_holder_suite(const GridFunction& w_in,
                                                const std::function<double(const Point&)>& rho,
                                                double p, double c, double m, double k0,
                                                const BallFamily& family) {
  if (family.balls.empty()) throw EmptyFamilyError("reverse_holder_suite: empty family");
  ReverseHolderReport rep;
  rep.m_tilde = m * k0 / (k0 + 1.0) + m;
  GridFunction w = detail::positive_weight(w_in, nullptr);
  const auto& dom = w.domain();

  // per-ball eta-mean over mean ratios, abscissa A = (1 + r/rho)^{m_tilde}
  auto sweep_eta = [&](double eta, double* cstar_out) {
    GridFunction weta(dom);
    for (std::size_t i = 0; i < w.size(); ++i) weta[i] = std::pow(w[i], eta);
    std::vector<double> A, q;
    for (const auto& b : family.balls) {
      const auto s = detail::ball_sums(w, &weta, b);
      if (s.count == 0) continue;
      const double n = static_cast<double>(s.count);
      A.push_back(std::pow(1.0 + b.radius / rho(b.center), rep.m_tilde));
      q.push_back(std::pow(s.sum_aux / n, 1.0 / eta) / (s.sum_w / n));
    }
    if (A.size() < 2) throw EmptyFamilyError("reverse_holder_suite: too few usable balls");
    const auto line = least_squares_line(A, [&] {
      std::vector<double> lq(q.size());
      for (std::size_t i = 0; i < q.size(); ++i) lq[i] = std::log(q[i]);
      return lq;
    }());
    const double cstar = std::max(0.0, line.slope);
    double C = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      C = std::max(C, q[i] * std::exp(-cstar * A[i]));
    if (cstar_out) *cstar_out = cstar;
    return C;
  };

  for (double eta : arithmetic_lattice(1.05, 2.0, 0.05)) {
    double cstar = 0.0;
    rep.etas.push_back(eta);
    rep.constants.push_back(sweep_eta(eta, &cstar));
    rep.cstars.push_back(cstar);
  }

  // openness bookkeeping at a fixed eta from the lattice
  rep.eta_used = 1.5;
  const std::size_t iu = 9;  // lattice index of 1.5
  const double c1 = rep.cstars[iu], m1 = rep.m_tilde;
  const double C_RH = rep.constants[iu];
  rep.q = rep.eta_used * (p - 1.0) + 1.0;
  rep.c2 = (c1 + c * p) * rep.eta_used / rep.q;
  rep.m2 = std::max(m, m1);

  WeightClassSpec hs;
  hs.kind = WeightKind::H;
  hs.p = p;
  hs.c = c;
  hs.m = m;
  const double C_H = class_constant(w, rho, hs, family).constant;

  GridFunction weta(dom), sigma(dom);
  for (std::size_t i = 0; i < w.size(); ++i) {
    weta[i] = std::pow(w[i], rep.eta_used);
    sigma[i] = std::pow(w[i], -1.0 / (p - 1.0));
  }
  rep.per_ball_ok = true;
  const double K = std::pow(C_RH, rep.eta_used / rep.q) *
                   std::pow(C_H, rep.eta_used * p / rep.q);
  for (const auto& b : family.balls) {
    const auto s = detail::ball_sums(weta, &sigma, b);
    if (s.count == 0) continue;
    const double n = static_cast<double>(s.count);
    const double expr = std::pow(s.sum_w / n, 1.0 / rep.q) *
                        std::pow(s.sum_aux / n, (rep.q - 1.0) / rep.q);
    const double u = 1.0 + b.radius / rho(b.center);
    const double bound = K * std::exp(rep.c2 * std::pow(u, rep.m2));
    if (expr > bound * (1.0 + 1e-9)) rep.per_ball_ok = false;
  }

  // dilated exponent: envelope constant of RH_{eta beta} at the combined rate
  rep.beta = 1.25;
  rep.c_tilde = c1 + c / rep.eta_used;
  {
    const double etab = rep.eta_used * rep.beta;
    GridFunction wb(dom);
    for (std::size_t i = 0; i < w.size(); ++i) wb[i] = std::pow(w[i], etab);
    double C = 0.0;
    for (const auto& b : family.balls) {
      const auto s = detail::ball_sums(w, &wb, b);
      if (s.count == 0) continue;
      const double n = static_cast<double>(s.count);
      const double qv = std::pow(s.sum_aux / n, 1.0 / etab) / (s.sum_w / n);
      const double u = 1.0 + b.radius / rho(b.center);
      C = std::max(C, qv * std::exp(-rep.c_tilde * std::pow(u, rep.m2)));
    }
    rep.openness_constant = C;
  }
  return rep;
}

}  // namespace sczlab
