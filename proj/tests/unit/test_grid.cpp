#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstring>

#include "sczlab/grid.hpp"
#include "sczlab/prng.hpp"

using namespace sczlab;

TEST_CASE("index round trip and node coordinates") {
  GridDomain dom(3, 1.5, 7);
  REQUIRE(dom.num_nodes() == 343);
  REQUIRE(dom.spacing() == Catch::Approx(0.5));
  for (std::size_t i : {std::size_t(0), std::size_t(100), std::size_t(342)}) {
    auto idx = dom.multi_index(i);
    REQUIRE(dom.flat_index(idx) == i);
  }
  // row-major: axis 0 slowest
  REQUIRE(dom.coord(0)[0] == Catch::Approx(-1.5));
  REQUIRE(dom.coord(1)[2] == Catch::Approx(-1.0));
  REQUIRE(dom.coord(49)[0] == Catch::Approx(-1.0));
  REQUIRE(dom.coord(49)[1] == Catch::Approx(-1.5));
}

TEST_CASE("nearest node snaps and clamps") {
  GridDomain dom(1, 2.0, 5);  // nodes -2,-1,0,1,2
  REQUIRE(dom.nearest_node(Point{0.4, 0, 0}) == 2);
  REQUIRE(dom.nearest_node(Point{0.6, 0, 0}) == 3);
  REQUIRE(dom.nearest_node(Point{9.0, 0, 0}) == 4);
  REQUIRE(dom.nearest_node(Point{-9.0, 0, 0}) == 0);
}

TEST_CASE("ball membership counts nodes exactly in 1-d") {
  GridDomain dom(1, 2.0, 5);  // h = 1
  REQUIRE(ball_node_count(dom, Ball{Point{0, 0, 0}, 1.0}) == 3);   // closed ball
  REQUIRE(ball_node_count(dom, Ball{Point{0, 0, 0}, 0.99}) == 1);
  REQUIRE(ball_node_count(dom, Ball{Point{2.0, 0, 0}, 1.0}) == 2); // clipped at the edge
}

TEST_CASE("disk node count approximates area in 2-d") {
  GridDomain dom(2, 1.0, 201);
  const double v = discrete_ball_volume(dom, Ball{Point{0, 0, 0}, 0.5});
  REQUIRE(v == Catch::Approx(3.14159265358979 * 0.25).epsilon(0.02));
}

TEST_CASE("ball averages and extrema") {
  GridDomain dom(1, 4.0, 401);
  GridFunction f(dom, [](const Point& p) { return p[0]; });
  Ball b{Point{0, 0, 0}, 1.0};
  REQUIRE(ball_average(f, b) == Catch::Approx(0.0).margin(1e-14));
  REQUIRE(ball_min(f, b) == Catch::Approx(-1.0));
  REQUIRE(ball_max(f, b) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(ball_average(f, Ball{Point{0.005, 0, 0}, 1e-4}), EmptyBallError);
}

TEST_CASE("lp norms follow the midpoint rule exactly for constants") {
  GridDomain dom(1, 3.0, 61);  // h = 0.1, n h = 6.1
  GridFunction one(dom, 1.0);
  REQUIRE(weighted_lp_norm(one, one, 1.0) == Catch::Approx(6.1));
  REQUIRE(weighted_lp_norm(one, one, 2.0) == Catch::Approx(std::sqrt(6.1)));
  GridFunction f(dom, [](const Point& p) { return p[0]; });
  REQUIRE(weighted_lp_norm(f, one, std::numeric_limits<double>::infinity()) ==
          Catch::Approx(3.0));
  GridFunction w = one;
  w[3] = -0.5;
  REQUIRE_THROWS_AS(weighted_lp_norm(f, w, 2.0), NegativeWeightError);
}

TEST_CASE("annulus picks the open-closed shell") {
  GridDomain dom(1, 4.0, 81);  // h = 0.1
  auto ids = annulus_nodes(dom, Point{0, 0, 0}, 1.0);
  REQUIRE(ids.size() == 20);  // 1 < |x| <= 2 on the 0.1 lattice
  for (auto i : ids) {
    const double r = std::fabs(dom.coord(i)[0]);
    REQUIRE(r > 1.0);
    REQUIRE(r <= 2.0 + 1e-12);
  }
  REQUIRE_THROWS_AS(annulus_nodes(dom, Point{0, 0, 0}, 0.05), UnresolvedAnnulusError);
}

TEST_CASE("clipping fraction detects balls leaving the box") {
  GridDomain dom(1, 2.0, 41);
  REQUIRE(clipping_fraction(dom, Ball{Point{0, 0, 0}, 1.0}) == Catch::Approx(0.0).margin(1e-12));
  const double f = clipping_fraction(dom, Ball{Point{2.0, 0, 0}, 1.0});
  REQUIRE(f > 0.4);
  REQUIRE(f < 0.5);
}

TEST_CASE("serialization round trip is bit exact") {
  GridDomain dom(2, 1.7, 19);
  Rng rng(42);
  GridFunction f(dom);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform(-5, 5) * std::exp(rng.uniform());
  const std::string path = "round_trip.gridfn";
  write_grid_function(path, f);
  GridFunction g = read_grid_function(path);
  REQUIRE(g.domain().same_layout(dom));
  REQUIRE(std::memcmp(g.values().data(), f.values().data(), f.size() * sizeof(double)) == 0);
  std::remove(path.c_str());
}

TEST_CASE("deterministic rng stream") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) REQUIRE(a.uniform() == b.uniform());
  Rng c(8);
  REQUIRE(Rng(7).uniform() != c.uniform());
}
