#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sczlab/maximal.hpp"

using namespace sczlab;

namespace {

GridFunction random_field(const GridDomain& dom, std::uint64_t seed) {
  Rng rng(seed);
  GridFunction f(dom);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
  return f;
}

}  // namespace

TEST_CASE("exponential maximal of a constant is the smallest-ball factor") {
  GridDomain dom(1, 4.0, 401);
  GridFunction one(dom, 1.0);
  auto rho1 = [](const Point&) { return 1.0; };
  const double expected = std::exp(-(1.0 + dom.spacing()));
  auto out = apply_maximal(one, rho1, {MaximalKind::ExpCentered, 1.0, 1.0});
  for (std::size_t i = 0; i < out.size(); ++i)
    REQUIRE(out[i] == Catch::Approx(expected).epsilon(1e-12));

  auto loc = apply_maximal(one, rho1, {MaximalKind::Local, 0.0, 0.0});
  for (std::size_t i = 0; i < loc.size(); ++i) REQUIRE(loc[i] == Catch::Approx(1.0).margin(1e-15));

  GridFunction negk(dom, -3.0);
  auto sh = apply_maximal(negk, rho1, {MaximalKind::SharpLocal, 0.0, 0.0});
  for (std::size_t i = 0; i < sh.size(); ++i) REQUIRE(sh[i] == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("local maximal of an indicator matches the brute-force ladder sup") {
  GridDomain dom(1, 6.0, 241);
  GridFunction f(dom, [](const Point& p) { return std::fabs(p[0]) <= 1.0 ? 1.0 : 0.0; });
  auto rho10 = [](const Point&) { return 10.0; };
  auto out = apply_maximal(f, rho10, {MaximalKind::Local, 0.0, 0.0});

  const Point target{2.0, 0.0, 0.0};
  const std::size_t ti = dom.nearest_node(target);
  auto radii = detail::dyadic_ladder(dom);
  std::vector<double> use;
  for (double r : radii)
    if (r <= 10.0 * (1.0 + 1e-12)) use.push_back(r);
  use.push_back(10.0);
  double best = 0.0;
  for (std::size_t j = 0; j < dom.num_nodes(); ++j) {
    const Point xc = dom.coord(j);
    for (double r : use) {
      if (dist(xc, dom.coord(ti)) > r) continue;
      double s = 0.0;
      std::size_t cnt = 0;
      dom.for_each_node_in_ball({xc, r}, [&](std::size_t i, const Point&) {
        s += f[i];
        ++cnt;
      });
      if (cnt) best = std::max(best, s / static_cast<double>(cnt));
    }
  }
  REQUIRE(out[ti] == Catch::Approx(best).epsilon(1e-12));
  REQUIRE(best > 0.0);
}

TEST_CASE("maximal operator algebra on shared ladders") {
  GridDomain dom(1, 2.0, 201);
  auto crho = CriticalRadius::inverse_norm_capped();
  GridFunction f = random_field(dom, 31);
  GridFunction g = random_field(dom, 32);

  SECTION("positive homogeneity is exact for power-of-two scales") {
    GridFunction f2(dom);
    for (std::size_t i = 0; i < f.size(); ++i) f2[i] = 2.0 * f[i];
    auto a = apply_maximal(f, crho.rho, {MaximalKind::ExpUncentered, 0.7, 1.2});
    auto b = apply_maximal(f2, crho.rho, {MaximalKind::ExpUncentered, 0.7, 1.2});
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(b[i] == 2.0 * a[i]);
  }

  SECTION("nodewise sublinearity") {
    GridFunction s(dom);
    for (std::size_t i = 0; i < f.size(); ++i) s[i] = f[i] + g[i];
    auto mf = apply_maximal(f, crho.rho, {MaximalKind::ExpCentered, 0.3, 1.0});
    auto mg = apply_maximal(g, crho.rho, {MaximalKind::ExpCentered, 0.3, 1.0});
    auto ms = apply_maximal(s, crho.rho, {MaximalKind::ExpCentered, 0.3, 1.0});
    for (std::size_t i = 0; i < ms.size(); ++i)
      REQUIRE(ms[i] <= (mf[i] + mg[i]) * (1.0 + 1e-12));
  }

  SECTION("larger damping rate is dominated, centered below uncentered") {
    auto m_lo = apply_maximal(f, crho.rho, {MaximalKind::ExpCentered, 0.4, 1.0});
    auto m_hi = apply_maximal(f, crho.rho, {MaximalKind::ExpCentered, 0.9, 1.0});
    auto m_un = apply_maximal(f, crho.rho, {MaximalKind::ExpUncentered, 0.4, 1.0});
    for (std::size_t i = 0; i < m_lo.size(); ++i) {
      REQUIRE(m_hi[i] <= m_lo[i]);
      REQUIRE(m_lo[i] <= m_un[i]);
    }
  }

  SECTION("local kinds refuse exponential parameters") {
    REQUIRE_THROWS_AS(apply_maximal(f, crho.rho, {MaximalKind::Local, 1.0, 0.0}), ConfigError);
  }
}

TEST_CASE("uncentered scatter covers every node in two dimensions") {
  GridDomain dom(2, 2.0, 41);
  GridFunction one(dom, 1.0);
  auto rho1 = [](const Point&) { return 1.0; };
  const double expected = std::exp(-0.5 * (1.0 + dom.spacing()));
  auto out = apply_maximal(one, rho1, {MaximalKind::ExpUncentered, 0.5, 1.0});
  for (std::size_t i = 0; i < out.size(); ++i)
    REQUIRE(out[i] == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bmo norm of constants, homogeneity, and the sharp-function sandwich") {
  GridDomain dom(1, 4.0, 401);
  auto crho = CriticalRadius::inverse_norm_capped();
  GridFunction one(dom, 1.0);

  GridFunction k(dom, -2.5);
  auto rk = bmo_norm(k, one, crho.rho);
  REQUIRE(rk.norm == Catch::Approx(2.5).margin(1e-12));
  REQUIRE(rk.osc_part == Catch::Approx(0.0).margin(1e-12));

  GridFunction z(dom, 0.0);
  REQUIRE(bmo_norm(z, one, crho.rho).norm == 0.0);

  GridFunction f = random_field(dom, 33);
  GridFunction w(dom, [](const Point& p) { return 1.0 + p[0] * p[0]; });
  auto r1 = bmo_norm(f, w, crho.rho);
  GridFunction f2(dom);
  for (std::size_t i = 0; i < f.size(); ++i) f2[i] = 2.0 * f[i];
  auto r2 = bmo_norm(f2, w, crho.rho);
  REQUIRE(r2.norm == 2.0 * r1.norm);
  REQUIRE(r1.equiv_ratio >= 1.0 - 1e-9);
  REQUIRE(r1.equiv_ratio <= 2.0 * (1.0 + 1e-9));
  REQUIRE(r1.best_constant_ratio >= 1.0 - 1e-9);
  REQUIRE(r1.best_constant_ratio <= 2.0 * (1.0 + 1e-9));

  GridFunction wz = one;
  wz[5] = 0.0;
  REQUIRE_THROWS_AS(bmo_norm(f, wz, crho.rho), ZeroWeightNodeError);
}

TEST_CASE("empirical operator norm on reference operators") {
  GridDomain dom(1, 4.0, 201);
  GridFunction one(dom, 1.0);
  auto probes = make_probes(dom, "gaussians", 5, 41);
  auto ident = [](const GridFunction& g) { return g; };
  auto est = empirical_operator_norm(ident, 2.0, one, probes);
  REQUIRE(est.value == Catch::Approx(1.0).margin(1e-14));

  auto twice = [](const GridFunction& g) {
    GridFunction t = g;
    for (std::size_t i = 0; i < t.size(); ++i) t[i] *= 2.0;
    return t;
  };
  REQUIRE(empirical_operator_norm(twice, 2.0, one, probes).value ==
          Catch::Approx(2.0).margin(1e-13));

  auto rho1 = [](const Point&) { return 1.0; };
  auto local = [&](const GridFunction& g) {
    return apply_maximal(g, rho1, {MaximalKind::Local, 0.0, 0.0});
  };
  auto inds = make_probes(dom, "indicators", 5, 42);
  REQUIRE(empirical_operator_norm(local, 2.0, one, inds).value >= 1.0);

  REQUIRE_THROWS_AS(empirical_operator_norm(ident, 2.0, one, {}), LabError);
  std::vector<GridFunction> zero{GridFunction(dom, 0.0)};
  REQUIRE_THROWS_AS(empirical_operator_norm(ident, 2.0, one, zero), LabError);
  REQUIRE_THROWS_AS(make_probes(dom, "squares", 3, 43), ConfigError);

  auto a = make_probes(dom, "dyadic_bumps", 4, 44);
  auto b = make_probes(dom, "dyadic_bumps", 4, 44);
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) REQUIRE(a[k][i] == b[k][i]);
}

TEST_CASE("centered and uncentered maximal functions compare under the parameter map") {
  GridDomain dom(1, 4.0, 401);
  auto c1rho = CriticalRadius::constant(1.0);
  GridFunction one(dom, 1.0);
  auto rep = compare_centered_uncentered(one, c1rho, 2.0, 1.0, 1.0, 1.0);
  REQUIRE(rep.max_ratio == Catch::Approx(std::exp(-(1.0 + dom.spacing()))).epsilon(1e-10));
  REQUIRE(rep.max_ratio <= 1.0);

  REQUIRE_THROWS_AS(compare_centered_uncentered(one, c1rho, 1.9, 1.0, 1.0, 1.0),
                    ParameterRelationViolatedError);

  auto crho = CriticalRadius::inverse_norm_capped();
  REQUIRE_THROWS_AS(compare_centered_uncentered(one, crho, 2.4, 1.0, 1.0, 1.0),
                    ParameterRelationViolatedError);
  GridFunction ind(dom, [](const Point& p) { return std::fabs(p[0]) <= 1.0 ? 1.0 : 0.0; });
  auto rep2 = compare_centered_uncentered(ind, crho, 2.4, 2.0, 1.0, 1.0);
  REQUIRE(std::isfinite(rep2.max_ratio));
  REQUIRE(rep2.max_ratio > 0.0);
}

TEST_CASE("majorant iteration keeps the three series properties") {
  GridDomain dom(1, 8.0, 401);
  auto crho = CriticalRadius::inverse_norm_capped();
  GridFunction w(dom, [](const Point& p) { return std::exp(std::fabs(p[0])); });
  GridFunction h(dom, [](const Point& p) { return std::exp(-p[0] * p[0]); });
  const double p = 2.0, c1 = 1.0, m1 = 2.0;
  auto rep = rdf_iteration(h, w, crho, p, c1, m1, 12, 51);
  REQUIRE(rep.k_terms == 12);
  REQUIRE(rep.t_norm > 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) REQUIRE(rep.majorant[i] >= h[i]);

  GridFunction sigma(dom), wpow(dom);
  for (std::size_t i = 0; i < w.size(); ++i) {
    sigma[i] = 1.0 / w[i];
    wpow[i] = w[i];
  }
  REQUIRE(weighted_lp_norm(rep.majorant, sigma, p) <=
          2.0 * weighted_lp_norm(h, sigma, p) + rep.tail_norm_bound);

  GridFunction arg(dom);
  for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = rep.majorant[i] * sigma[i];
  GridFunction tr = apply_maximal(arg, crho.rho, {MaximalKind::ExpUncentered, c1, m1});
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double lhs = tr[i] * wpow[i];
    const double rhs = 2.0 * rep.t_norm * rep.majorant[i] + rep.tail_field[i];
    REQUIRE(lhs <= rhs * (1.0 + 1e-9));
  }

  GridFunction z(dom, 0.0);
  auto rz = rdf_iteration(z, w, crho, p, c1, m1, 6, 52);
  REQUIRE(rz.majorant.max_abs() == 0.0);

  GridFunction neg(dom, -1.0);
  REQUIRE_THROWS_AS(rdf_iteration(neg, w, crho, p, c1, m1, 6, 53), LabError);
}

TEST_CASE("maximal boundedness experiment passes in the classical regime") {
  GridDomain dom(1, 8.0, 401);
  auto c1rho = CriticalRadius::constant(1.0);
  GridFunction one(dom, 1.0);
  auto rep = maximal_boundedness_experiment(one, c1rho, 2.0, 1.0, 1.0, 4, 2, 61);
  REQUIRE(rep.c2 == Catch::Approx(1.05 * 8.0));
  REQUIRE(rep.m1_prime == Catch::Approx(1.0));
  REQUIRE(rep.c1_prime == Catch::Approx(rep.c2 * 2.0));
  REQUIRE(rep.norms.size() == 3);
  REQUIRE(rep.dir1_pass);
  REQUIRE(rep.dir2_pass);
  REQUIRE(rep.pass);
}

TEST_CASE("endpoint experiment gates the weight and reports probe norms") {
  GridDomain dom(1, 12.0, 601);
  auto c1rho = CriticalRadius::constant(1.0);
  GridFunction w(dom, [](const Point& p) { return std::exp(-0.05 * std::fabs(p[0])); });
  auto ident = [](const GridFunction& g) { return g; };
  auto rep = endpoint_bmo_experiment(ident, w, c1rho, 1.0, 1.0, 1.0, true, 6, 71);
  REQUIRE(rep.c_threshold == Catch::Approx(0.5));
  REQUIRE(rep.c_required < 0.5);
  REQUIRE(rep.bmo_norms.size() == 12);
  for (double b : rep.bmo_norms) {
    REQUIRE(std::isfinite(b));
    REQUIRE(b > 0.0);
  }
  REQUIRE(rep.max_bmo_full >= rep.max_bmo_half);

  GridFunction steep(dom, [](const Point& p) { return std::exp(-1.2 * std::fabs(p[0])); });
  REQUIRE_THROWS_AS(endpoint_bmo_experiment(ident, steep, c1rho, 1.0, 1.0, 1.0, true, 6, 72),
                    WeightOutOfRangeError);
}
