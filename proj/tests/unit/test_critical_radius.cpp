#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sczlab/critical_radius.hpp"

using namespace sczlab;

TEST_CASE("constant scale validates with trivial constants") {
  auto v = validate_critical_radius([](const Point&) { return 5.0; }, 1, 10.0, 200, 11);
  REQUIRE(v.ok);
  REQUIRE(v.k0 == 0.0);
  REQUIRE(v.C0 == 1.0);
  REQUIRE(v.required_C0 == Catch::Approx(1.0));
}

TEST_CASE("capped inverse-norm scale validates; the k0 = 1 fit needs 2/sqrt(3)") {
  auto cr = CriticalRadius::inverse_norm_capped();
  auto v = validate_critical_radius(cr.rho, 1, 10.0, 500, 12);
  REQUIRE(v.ok);
  REQUIRE(v.C0 <= 1.2);
  // the axis sweep contains the extremal pair (2, 1)
  REQUIRE(v.required_at(1.0) == Catch::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-9));
  REQUIRE(v.required_at(1.0) <= cr.C0);
}

TEST_CASE("exponential growth fits no lattice point") {
  auto v = validate_critical_radius([](const Point& x) { return std::exp(norm(x)); }, 1, 10.0,
                                    300, 13);
  REQUIRE_FALSE(v.ok);
  REQUIRE(v.required_C0 > 1000.0);
  REQUIRE(dist(v.worst_x, v.worst_y) > 0.0);
}

TEST_CASE("similarity of nearby scales") {
  auto cr = CriticalRadius::inverse_norm_capped();
  auto s = rho_similarity(cr, Point{1, 0, 0}, Point{1.5, 0, 0});
  REQUIRE(s.ratio_yx == Catch::Approx(2.0 / 3.0));
  REQUIRE(s.ratio_xy == Catch::Approx(1.5));
  REQUIRE(s.within);
  REQUIRE(s.lo == Catch::Approx(1.0 / 2.4));
  REQUIRE(s.hi == Catch::Approx(std::sqrt(2.0) * 1.2));

  auto t = rho_similarity(cr, Point{3, 0, 0}, Point{3, 0, 0});
  REQUIRE(t.ratio_yx == 1.0);
  REQUIRE(t.within);

  REQUIRE_THROWS_AS(rho_similarity(cr, Point{3, 0, 0}, Point{4, 0, 0}), LabError);
}

TEST_CASE("one huge ball covers everything") {
  GridDomain dom(1, 10.0, 201);
  auto rep = build_covering(CriticalRadius::constant(20.0), dom);
  REQUIRE(rep.covers);
  REQUIRE(rep.balls.size() == 1);
  REQUIRE(rep.max_overlap[0] == 1);
}

TEST_CASE("unit balls cover the line with few centers") {
  GridDomain dom(1, 10.0, 201);
  auto rep = build_covering(CriticalRadius::constant(1.0), dom);
  REQUIRE(rep.covers);
  REQUIRE(rep.balls.size() <= 21);
}

TEST_CASE("covering overlap obeys its own fitted envelope") {
  GridDomain dom(1, 20.0, 801);
  auto rep = build_covering(CriticalRadius::inverse_norm_capped(), dom);
  REQUIRE(rep.covers);
  REQUIRE(rep.N1 >= 0.0);
  for (std::size_t i = 0; i < rep.sigmas.size(); ++i)
    REQUIRE(static_cast<double>(rep.max_overlap[i]) <=
            rep.C * std::pow(rep.sigmas[i], rep.N1) * (1 + 1e-9));
  REQUIRE(rep.max_overlap[3] >= rep.max_overlap[0]);
}

TEST_CASE("scale of lebesgue from the crossing radius") {
  auto mu = MeasureModel::lebesgue(3, 1.0);
  const double want = std::sqrt(3.0 / (4.0 * 3.14159265358979323846));
  REQUIRE(rho_from_measure_at(mu, Point{7, -3, 2}, 0.01, 40.0) ==
          Catch::Approx(want).epsilon(1e-6));
  auto cr = rho_from_measure(mu, 0.01, 40.0);
  REQUIRE(cr(Point{0, 0, 0}) == Catch::Approx(want).epsilon(1e-6));
}

TEST_CASE("pure atom has no crossing") {
  auto mu = MeasureModel::lebesgue(3, 0.0).add_atom(Point{0, 0, 0}, 1.0);
  REQUIRE_THROWS_AS(rho_from_measure_at(mu, Point{0, 0, 0}, 0.01, 40.0), NoBracketError);
}
