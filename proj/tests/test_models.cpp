#include "hypspec/models.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace hypspec;

TEST_CASE("conformal factor closed form") {
  Vec o = Vec::Zero(3);
  auto f0 = conformal_factor(BallPoint(o));
  REQUIRE(f0.value == 0.5);
  REQUIRE(f0.gradient.norm() == 0.0);

  Vec p(3);
  p << 0.6, 0.0, 0.0;
  auto f = conformal_factor(BallPoint(p));
  REQUIRE(f.value == Catch::Approx(0.32).epsilon(1e-15));
  REQUIRE(f.gradient[0] == Catch::Approx(-0.6).epsilon(1e-15));

  // value -> 0 as |x| -> 1-
  Vec q(3);
  q << 1.0 - 1e-9, 0.0, 0.0;
  REQUIRE(conformal_factor(BallPoint(q)).value < 2e-9);
  REQUIRE(conformal_factor(BallPoint(q)).value > 0.0);
}

TEST_CASE("conformal factor gradient matches finite differences") {
  auto gen = oracle::rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Vec x = oracle::random_in_ball(gen, 3, 0.9);
    auto value = [](const Vec& v) { return 0.5 * (1.0 - v.squaredNorm()); };
    Vec g = oracle::fd_gradient(value, x);
    Vec ga = conformal_factor(BallPoint(x)).gradient;
    REQUIRE((g - ga).norm() < 1e-8 * (1.0 + ga.norm()));
  }
}

TEST_CASE("ball distance radial oracle") {
  // d(0, (tanh(t/2), 0, 0)) = t
  for (double t : {0.5, 1.0, 2.0}) {
    Vec p(3);
    p << std::tanh(t / 2.0), 0.0, 0.0;
    REQUIRE(hyperbolic_distance(BallPoint(Vec::Zero(3)), BallPoint(p)) ==
            Catch::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("ball distance symmetry, identity and triangle inequality") {
  auto gen = oracle::rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    BallPoint p(oracle::random_in_ball(gen, 3));
    BallPoint q(oracle::random_in_ball(gen, 3));
    BallPoint r(oracle::random_in_ball(gen, 3));
    REQUIRE(hyperbolic_distance(p, p) == 0.0);
    REQUIRE(hyperbolic_distance(p, q) == Catch::Approx(hyperbolic_distance(q, p)).margin(1e-13));
    REQUIRE(hyperbolic_distance(p, r) <=
            hyperbolic_distance(p, q) + hyperbolic_distance(q, r) + 1e-10);
  }
}

TEST_CASE("half-space map fixes the normalisation origin -> (0,1)") {
  Vec anchor = Vec::Zero(3);
  anchor[2] = 1.0;
  auto h = ball_to_halfspace(BallPoint(Vec::Zero(3)), anchor);
  REQUIRE(h.y == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(h.x.norm() < 1e-14);
}

TEST_CASE("half-space map is an isometry") {
  auto gen = oracle::rng(17);
  Vec anchor = oracle::random_unit(gen, 3);
  BallHalfSpaceMap map(anchor);
  for (int trial = 0; trial < 1000; ++trial) {
    BallPoint p(oracle::random_in_ball(gen, 3, 0.99));
    BallPoint q(oracle::random_in_ball(gen, 3, 0.99));
    const double db = hyperbolic_distance(p, q);
    const double dh = hyperbolic_distance(map.to_halfspace(p), map.to_halfspace(q));
    REQUIRE(std::abs(db - dh) < 1e-10);
  }
}

TEST_CASE("half-space map roundtrip") {
  auto gen = oracle::rng(19);
  Vec anchor = oracle::random_unit(gen, 4);
  BallHalfSpaceMap map(anchor);
  for (int trial = 0; trial < 200; ++trial) {
    BallPoint p(oracle::random_in_ball(gen, 4, 0.999));
    BallPoint back = map.to_ball(map.to_halfspace(p));
    REQUIRE((back.x - p.x).norm() < 1e-12);
  }
}

TEST_CASE("boundary circle through the anchor maps into {y = 0}") {
  Vec anchor = Vec::Zero(3);
  anchor[2] = 1.0;
  BallHalfSpaceMap map(anchor);
  // A great circle through the anchor: (sin s, 0, cos s).
  for (int i = 1; i < 64; ++i) {
    const double s = 2.0 * M_PI * i / 64;
    Vec z(3);
    z << std::sin(s), 0.0, std::cos(s);
    if ((z - anchor).norm() < 1e-8) continue;
    Vec img = map.boundary_to_plane(z);
    // Images are finite points of the plane; the y-coordinate is zero by
    // construction, so check instead that interior points just above the
    // circle acquire small heights.
    Vec inside = z * (1.0 - 1e-10);
    auto h = map.to_halfspace(BallPoint(inside));
    REQUIRE(h.y < 1e-9 * (1.0 + h.x.squaredNorm()));
    REQUIRE((h.x - img).norm() < 1e-6 * (1.0 + img.norm()));
  }
}

TEST_CASE("near-anchor conversion is rejected") {
  Vec anchor = Vec::Zero(3);
  anchor[2] = 1.0;
  Vec p = anchor * (1.0 - 1e-15);
  REQUIRE_THROWS_AS(ball_to_halfspace(BallPoint(p), anchor), near_singular_transform_error);
}

TEST_CASE("half-space point validation") {
  REQUIRE_THROWS_AS(HalfSpacePoint(Vec::Zero(2), 0.0), domain_error);
  REQUIRE_THROWS_AS(HalfSpacePoint(Vec::Zero(2), -1.0), domain_error);
}

TEST_CASE("ball point near-boundary flag") {
  Vec p(2);
  p << 1.0 - 5e-15, 0.0;
  REQUIRE(BallPoint(p).near_boundary());
  p << 0.9, 0.0;
  REQUIRE(!BallPoint(p).near_boundary());
  p << 1.0, 0.0;
  REQUIRE_THROWS_AS(BallPoint(p), domain_error);
}
