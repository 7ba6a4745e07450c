#include "hypspec/radial.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace hypspec;

TEST_CASE("composite quadrature integrates the sinh weight exactly") {
  // int_a^b sinh = cosh(b) - cosh(a)
  QuadratureRule q(0.5, 7.0, 16, 10);
  const double got = q.integrate_weighted([](double) { return 1.0; }, 1.0);
  const double expect = std::cosh(7.0) - std::cosh(0.5);
  REQUIRE(std::abs(got - expect) < 1e-12 * expect);
}

TEST_CASE("quadrature is stable under panel doubling") {
  RadialProfile u = upsilon_profile(2, 2.0, 40.0);
  QuadratureRule rule = profile_rule(u);
  auto f = [&](double t) { return std::norm(u(t).f); };
  const double v1 = rule.integrate_weighted(f, 1.0);
  const double v2 = rule.refined().integrate_weighted(f, 1.0);
  REQUIRE(std::abs(v1 - v2) < 1e-8 * std::abs(v1));
}

TEST_CASE("psi solves its radial equation to rounding") {
  for (double t : {1.0, 5.0, 10.0}) REQUIRE(psi_residual(2, 2.0, t) < 1e-10);
  // m = 3 has vanishing alpha
  REQUIRE(radial_alpha(3, 2.0) == 0.0);
  REQUIRE(psi_residual(3, 7.3, 4.2) < 1e-10);

  auto gen = oracle::rng(23);
  std::uniform_real_distribution<double> tdist(0.1, 20.0);
  std::uniform_real_distribution<double> ldist(0.05, 10.0);
  std::uniform_int_distribution<int> mdist(2, 5);
  for (int i = 0; i < 1000; ++i) {
    const int m = mdist(gen);
    const double lambda = 0.25 * sq(m - 1.0) + ldist(gen);
    REQUIRE(psi_residual(m, lambda, tdist(gen)) < 1e-10);
  }
}

TEST_CASE("psi derivatives match finite differences") {
  RadialProfile p = psi_profile(2, 2.0);
  for (double t : {0.7, 2.0, 6.0}) {
    auto re = [&](double s) { return p(s).f.real(); };
    auto im = [&](double s) { return p(s).f.imag(); };
    const Complex fd1(oracle::fd1(re, t, 1e-5), oracle::fd1(im, t, 1e-5));
    REQUIRE(std::abs(fd1 - p(t).d1) < 1e-6 * std::abs(p(t).d1));
    const Complex fd2(oracle::fd2(re, t, 1e-4), oracle::fd2(im, t, 1e-4));
    REQUIRE(std::abs(fd2 - p(t).d2) < 1e-5 * std::abs(p(t).d2));
  }
}

TEST_CASE("psi modulus cancels the volume weight") {
  // |psi|^2 sinh^{m-1} = 1, hence the window norm has the closed form 3R/16.
  for (int m : {2, 3, 4, 5}) {
    RadialProfile p = psi_profile(m, 0.25 * sq(m - 1.0) + 1.3);
    for (double t : {0.3, 1.0, 4.0, 15.0, 80.0}) {
      const double v = std::norm(p(t).f) * sinh_pow(t, m - 1.0);
      REQUIRE(std::abs(v - 1.0) < 1e-12);
    }
  }
  const double R = 36.0;
  RadialProfile u = upsilon_profile(3, 1.8, R);
  const ProfileIntegrals I = profile_integrals(u);
  REQUIRE(I.norm_sq == Catch::Approx(3.0 * R / 16.0).epsilon(1e-10));
}

TEST_CASE("epsilon_R closed-form spot value and scaling") {
  // m = 3 (alpha = 0), lambda = 2 so beta^2 = 1, R = 2pi: 2*max{16, 16} = 32.
  REQUIRE(epsilon_R(3, 2.0, 2.0 * M_PI) == Catch::Approx(32.0).epsilon(1e-14));

  // When the beta^2 term dominates, epsilon_{2R}/epsilon_R -> 1/4.
  const double r1 = epsilon_R(2, 5.0, 200.0), r2 = epsilon_R(2, 5.0, 400.0);
  REQUIRE(r2 / r1 == Catch::Approx(0.25).epsilon(1e-10));

  // epsilon_R -> 0 along growing R for every (m, lambda) grid point.
  for (int m : {2, 3, 4, 5}) {
    for (double dl : {0.1, 1.0, 10.0}) {
      const double lambda = 0.25 * sq(m - 1.0) + dl;
      double prev = kInf;
      for (double R : {20.0, 40.0, 80.0, 160.0, 320.0, 640.0, 1280.0}) {
        const double e = epsilon_R(m, lambda, R);
        REQUIRE(e < prev);
        prev = e;
      }
      REQUIRE(prev < 0.01);
    }
  }
}

TEST_CASE("window estimate holds on sample cells") {
  LemmaEstReport r = verify_lemma_est(2, 2.0, 40.0);
  REQUIRE(r.pass);
  REQUIRE(r.ratio <= 1.0);

  // LHS/norm decreases like epsilon_R along an R sweep.
  double prev = kInf;
  for (double R : {20.0, 40.0, 80.0}) {
    LemmaEstReport rep = verify_lemma_est(3, 5.0, R);
    const double lhs_over_norm = rep.ratio * rep.eps_R;
    REQUIRE(lhs_over_norm < prev);
    REQUIRE(rep.pass);
    prev = lhs_over_norm;
  }
}

TEST_CASE("sweep measures a usable derivative constant") {
  LemmaEstSweep sweep = lemma_est_sweep(2, 2.0, {20.0, 40.0, 80.0, 160.0});
  REQUIRE(sweep.all_pass);
  REQUIRE(sweep.c_star > 0.0);
  for (const auto& row : sweep.rows) {
    REQUIRE(row.c1 <= sweep.c_star);
    REQUIRE(row.c2 <= sweep.c_star);
  }
}

TEST_CASE("mollified window keeps the factor-two budgets") {
  const int m = 2;
  const double lambda = 2.0, R = 40.0;
  const double c_star = lemma_est_sweep(m, lambda, {20.0, 40.0, 80.0}).c_star;

  for (MollifierKernel kind : {MollifierKernel::Bump, MollifierKernel::TruncatedGaussian}) {
    MollifyReport rep = mollify_report(m, lambda, R, R / 500.0, c_star, kind);
    CAPTURE(static_cast<int>(kind), rep.op_ratio, rep.norm_ratio, rep.c1_sigma, rep.c2_sigma);
    REQUIRE(rep.pass());
  }

  // sigma -> 0: ratios approach the sharp-window values.
  MollifyReport tight = mollify_report(m, lambda, R, R / 4000.0, c_star);
  REQUIRE(tight.op_ratio == Catch::Approx(1.0).margin(0.05));
  REQUIRE(tight.norm_ratio == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("mollification width is validated") {
  RadialProfile u = upsilon_profile(2, 2.0, 20.0);
  REQUIRE_THROWS_AS(mollify(u, 0.5), mollification_error);  // >= R/100
  REQUIRE_THROWS_AS(mollify(u, 0.0), input_error);
}

TEST_CASE("mollified windows of a doubling sequence stay disjoint") {
  double Rk = 20.0;
  RadialProfile prev = mollify(upsilon_profile(2, 2.0, Rk), Rk / 500.0);
  for (int k = 1; k < 4; ++k) {
    const double Rn = 20.0 * std::pow(2.05, k);
    RadialProfile next = mollify(upsilon_profile(2, 2.0, Rn), Rn / 500.0);
    REQUIRE(supports_disjoint(prev, next));
    prev = next;
  }
}

TEST_CASE("lambda at the spectral bottom is rejected") {
  REQUIRE_THROWS_AS(upsilon_profile(2, 0.25, 20.0), input_error);
  REQUIRE_THROWS_AS(psi_profile(3, 1.0), input_error);
}

TEST_CASE("isoperimetric profile closed forms for m = 2") {
  IsoperimetricProfile prof(2);
  // f'(t) = tanh(t/2), f(t) = 2 log cosh(t/2)
  for (double t : {0.5, 2.0, 10.0, 30.0}) {
    REQUIRE(prof.fp(t) == Catch::Approx(std::tanh(t / 2.0)).epsilon(1e-11));
    REQUIRE(prof.f(t) == Catch::Approx(2.0 * std::log(std::cosh(t / 2.0))).epsilon(1e-9));
  }
  REQUIRE(ball_cheeger(2, 2.0) == Catch::Approx(1.0 / std::tanh(1.0)).epsilon(1e-11));
  REQUIRE(std::abs(ball_cheeger(2, 2.0) - 1.3130352855) < 1e-9);
  REQUIRE(std::abs(ball_cheeger(2, 30.0) - 1.0) < 1e-6);
}

TEST_CASE("isoperimetric profile satisfies its equation") {
  for (int m : {2, 3, 4}) {
    IsoperimetricProfile prof(m);
    for (double t : {0.1, 1.0, 10.0}) {
      const auto [f, fp, fpp] = prof(t);
      REQUIRE(std::abs(fpp + (m - 1.0) * fp / std::tanh(t) - 1.0) < 1e-9);
      // second derivative against finite differences of the quadrature f'
      const double fd = oracle::fd1([&](double s) { return prof.fp(s); }, t, 1e-5);
      REQUIRE(std::abs(fd - fpp) < 2e-5 * (1.0 + std::abs(fpp)));
      // convexity and the sign of m coth f' - 1
      REQUIRE(fpp >= 0.0);
      REQUIRE(m * fp / std::tanh(t) - 1.0 >= -1e-12);
    }
    // ball ratio exceeds m-1 and approaches it from above
    REQUIRE(ball_cheeger(m, 2.0) > m - 1.0);
    REQUIRE(ball_cheeger(m, 30.0) == Catch::Approx(m - 1.0).epsilon(1e-6));
  }
}

TEST_CASE("bump and ramp profiles") {
  RadialProfile b = bump_profile(6.0, 10.0);
  REQUIRE(b(5.9).f == Complex(0.0));
  REQUIRE(b(8.0).f.real() == Catch::Approx(1.0));
  REQUIRE(b(8.0).f.imag() == 0.0);
  auto re = [&](double s) { return b(s).f.real(); };
  REQUIRE(std::abs(oracle::fd1(re, 7.3) - b(7.3).d1.real()) < 1e-7);

  RadialProfile ramp = ramp_profile();
  REQUIRE(ramp(3.0).f.real() == 3.0);
  REQUIRE(ramp(3.0).d1.real() == 1.0);
  REQUIRE(ramp(3.0).d2 == Complex(0.0));
}
