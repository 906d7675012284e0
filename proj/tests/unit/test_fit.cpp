#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sczlab/fit.hpp"

using namespace sczlab;

TEST_CASE("least squares recovers an exact line") {
  std::vector<double> xs{0, 1, 2, 3, 4}, ys;
  for (double x : xs) ys.push_back(2 * x + 1);
  auto f = least_squares_line(xs, ys);
  REQUIRE(f.slope == Catch::Approx(2.0).epsilon(1e-13));
  REQUIRE(f.intercept == Catch::Approx(1.0).epsilon(1e-13));
  REQUIRE(f.r2 == Catch::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("exponential decay fit on exact data") {
  std::vector<double> A{0.5, 1.0, 2.0, 3.5, 5.0}, q;
  for (double a : A) q.push_back(3.0 * std::exp(-0.7 * a));
  auto f = fit_exponential_decay(A, q);
  REQUIRE(f.c == Catch::Approx(0.7).epsilon(1e-12));
  REQUIRE(f.C == Catch::Approx(3.0).epsilon(1e-12));
  REQUIRE(f.r2 == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("growth clamps the rate to zero") {
  std::vector<double> A{1, 2, 3}, q{1.0, 2.0, 4.0};
  auto f = fit_exponential_decay(A, q);
  REQUIRE(f.c == 0.0);
  REQUIRE(f.C == Catch::Approx(4.0));
}

TEST_CASE("lattices and pow2 rounding") {
  auto lat = arithmetic_lattice(0.0, 8.0, 0.25);
  REQUIRE(lat.size() == 33);
  REQUIRE(lat.front() == 0.0);
  REQUIRE(lat.back() == Catch::Approx(8.0));
  auto geo = geometric_lattice(1.0, 1000.0, 1.1);
  REQUIRE(geo.front() == 1.0);
  REQUIRE(geo.back() == Catch::Approx(1000.0));
  for (std::size_t i = 1; i < geo.size(); ++i) REQUIRE(geo[i] > geo[i - 1]);
  REQUIRE(round_up_pow2(7.98) == 8.0);
  REQUIRE(round_up_pow2(8.0) == 8.0);
  REQUIRE(round_up_pow2(0.3) == 1.0);
}
