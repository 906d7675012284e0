#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sczlab/measures.hpp"

using namespace sczlab;

namespace {
const double pi = 3.14159265358979323846;
}

TEST_CASE("lebesgue ball measure and singular integrals in closed form") {
  auto mu = MeasureModel::lebesgue(3, 1.0);
  REQUIRE(mu.ball_measure(Point{1, 2, 3}, 0.5) ==
          Catch::Approx(4.0 * pi / 3.0 * 0.125).epsilon(1e-14));
  REQUIRE(mu.singular_integral(Point{0, 0, 0}, 2.0, 1) == Catch::Approx(2 * pi * 4).epsilon(1e-14));
  REQUIRE(mu.singular_integral(Point{0, 0, 0}, 2.0, 2) == Catch::Approx(4 * pi * 2).epsilon(1e-14));
}

TEST_CASE("grid density agrees with the analytic radial-square model") {
  auto exact = MeasureModel::radial_square();
  GridDomain dom(3, 2.0, 81);
  GridFunction V(dom, [](const Point& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2]; });
  auto grid = MeasureModel::from_density(V);

  const Point x{0.3, 0, 0};
  REQUIRE(grid.ball_measure(x, 0.7) == Catch::Approx(exact.ball_measure(x, 0.7)).epsilon(0.05));
  REQUIRE(grid.singular_integral(x, 0.7, 1) ==
          Catch::Approx(exact.singular_integral(x, 0.7, 1)).epsilon(0.05));
  REQUIRE(grid.singular_integral(x, 0.7, 2) ==
          Catch::Approx(exact.singular_integral(x, 0.7, 2)).epsilon(0.08));

  // small-ball averages recover the density
  const Point y{0.5, 0.5, 0};
  const double mean = grid.ball_measure(y, 0.15) / (4.0 * pi / 3.0 * std::pow(0.15, 3));
  REQUIRE(mean == Catch::Approx(0.5).epsilon(0.1));
}

TEST_CASE("growth certification of lebesgue hits the exact lattice point") {
  auto mu = MeasureModel::lebesgue(3, 1.0);
  std::vector<Point> pts{{0, 0, 0}, {1, 0.5, -0.3}, {-2, 1, 0}};
  // radius span wide enough that delta = 2.25 overshoots the C cap
  auto g = certify_growth(mu, pts, 0.02, 16.0);
  REQUIRE(g.ok);
  REQUIRE(g.delta == 2.0);
  REQUIRE(g.C == Catch::Approx(1.0).epsilon(1e-12));
  REQUIRE(g.D == 8.0);
}

TEST_CASE("an atom defeats growth certification with a witness") {
  auto mu = MeasureModel::lebesgue(3, 1.0).add_atom(Point{0, 0, 0}, 1.0);
  std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}};
  auto g = certify_growth(mu, pts, 0.05, 8.0);
  REQUIRE_FALSE(g.ok);
  REQUIRE(g.witness_r > 0.0);
  REQUIRE(g.witness_R > g.witness_r);
}

TEST_CASE("integral estimate constants for lebesgue") {
  auto mu = MeasureModel::lebesgue(3, 2.5);
  auto est = check_integral_estimates(mu, {{0, 0, 0}, {1, 1, 1}}, {0.1, 0.5, 2.0});
  REQUIRE(est.C1 == Catch::Approx(1.5).epsilon(1e-12));
  REQUIRE(est.C2 == Catch::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("atom at the pole is rejected") {
  auto mu = MeasureModel::lebesgue(3, 1.0).add_atom(Point{1, 0, 0}, 0.5);
  REQUIRE_THROWS_AS(mu.singular_integral(Point{1, 0, 0}, 1.0, 1), SingularityUnresolvedError);
  REQUIRE(mu.singular_integral(Point{0, 0, 0}, 2.0, 1) ==
          Catch::Approx(2 * pi * 4 + 0.5).epsilon(1e-12));
}

TEST_CASE("extra decay beyond the critical radius") {
  auto mu = MeasureModel::lebesgue(3, 1.0);
  auto rho = [](const Point&) { return 1.0; };
  auto rep = check_extra_decay(mu, rho, 3.0, 8.0, {{0, 0, 0}, {2, -1, 0}}, 20.0);
  const double expect = (4.0 * pi / 3.0) / (4.0 * pi / 3.0 + 1.0);
  REQUIRE(rep.C == Catch::Approx(expect).epsilon(1e-9));
  REQUIRE_THROWS_AS(check_extra_decay(mu, rho, 2.0, 8.0, {{0, 0, 0}}, 20.0), LabError);
}
