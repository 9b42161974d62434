#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vexp/norms.hpp"
#include "vexp/rubio.hpp"

using namespace vexp;

TEST_CASE("exponent of the dual space") {
  const Grid g(1, 4.0, 64);
  const double q0 = 1.5;
  const auto q = Exponent::constant(g, 2.0 * q0);
  const auto full = yprime_exponent(q, q0, 1.0);
  CHECK(full.p_minus() == doctest::Approx(2.0));
  CHECK(full.p_plus() == doctest::Approx(2.0));
  CHECK(dual_space_exponent(q, q0).p_minus() == doctest::Approx(2.0));
  for (double delta : {0.7, 0.8, 0.9}) {
    const auto e = yprime_exponent(Exponent::constant(g, 2.5), 1.0, delta);
    CHECK(e.p_minus() == doctest::Approx(delta * 2.5 / 1.5));
  }
  const auto qv = Exponent::radial_bump(g, 2.2, 0.6, 1.0);
  const double delta = 0.7;
  REQUIRE(qv.p_plus() < 1.5 / (1.0 - delta));
  CHECK(yprime_exponent(qv, 1.5, delta).p_minus() > 1.0);

  CHECK_THROWS_AS(yprime_exponent(q, 3.0, 0.5), DomainError);
  CHECK_THROWS_AS(yprime_exponent(q, q0, 0.0), DomainError);
  // q_plus at the upper endpoint q0/(1 - delta).
  CHECK_THROWS_AS(yprime_exponent(q, q0, 0.5), DomainError);
}

TEST_CASE("iteration of a constant is a geometric series") {
  const Grid g(1, 4.0, 128);
  const auto q = Exponent::constant(g, 2.0);
  for (double delta : {0.5, 1.0}) {
    for (double B : {1.0, 2.5}) {
      const auto r = rubio_iterate(GridFunction(g, 1.0), q, 1.0, delta, B);
      const double expected = 2.0 * B / (2.0 * B - 1.0);
      CHECK(min_value(r.rh) == doctest::Approx(expected).epsilon(1e-8));
      CHECK(max_value(r.rh) == doctest::Approx(expected).epsilon(1e-8));
      const auto cert = a1_certificate(r, delta, CubeFamily::dyadic(g), MaximalConfig::family());
      CHECK(cert.at("rho") == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cert.at("a1_constant") == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cert.verdict == Verdict::Pass);
    }
  }
}

TEST_CASE("iteration majorises h and at most doubles its norm") {
  const Grid g(1, 8.0, 256);
  const double q0 = 1.0;
  const auto q = Exponent::radial_bump(g, 2.0, 0.4, 0.5);
  for (double delta : {0.5, 1.0}) {
    const auto cfg = MaximalConfig::family();
    const double B = iteration_bound(q, q0, delta, cfg);
    CHECK(B >= 2.0);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto h = testing::random_bumps(g, seed);
      const auto r = rubio_iterate(h, q, q0, delta, B, cfg);
      for (std::size_t i = 0; i < h.size(); ++i) CHECK(r.rh[i] >= h[i]);
      CHECK(r.rh_norm <= (2.0 + 1e-8) * r.h_norm);
      CHECK(r.term_norms.size() == static_cast<std::size_t>(r.terms));
      CHECK(r.tail_bound == doctest::Approx(std::exp2(1.0 - r.terms) * r.h_norm));
      // Every term is at most half of the previous one in norm.
      for (std::size_t k = 1; k < r.term_norms.size(); ++k) {
        CHECK(r.term_norms[k] <= 0.5 * r.term_norms[k - 1] * (1.0 + 1e-8));
      }
      const auto cert = a1_certificate(r, delta, CubeFamily::dyadic(g), cfg);
      CHECK(cert.verdict == Verdict::Pass);
      CHECK(cert.at("a1_constant") <= cert.at("a1_bound"));
    }
  }
}

TEST_CASE("iteration is positively homogeneous") {
  const Grid g(2, 4.0, 32);
  const auto q = Exponent::constant(g, 3.0);
  const auto h = testing::random_bumps(g, 12);
  const auto a = rubio_iterate(h, q, 1.5, 0.75, 3.0);
  const auto b = rubio_iterate(scaled(h, 4.0), q, 1.5, 0.75, 3.0);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(b.rh[i] == doctest::Approx(4.0 * a.rh[i]).epsilon(1e-12));
  CHECK(b.rh_norm == doctest::Approx(4.0 * a.rh_norm).epsilon(1e-9));
}

TEST_CASE("iteration errors") {
  const Grid g(1, 4.0, 64);
  const auto q = Exponent::constant(g, 2.0);
  const auto h = abs(testing::random_function(g, 1));
  CHECK_THROWS_AS(rubio_iterate(testing::random_function(g, 1), q, 1.0, 0.5, 2.0), InputError);
  CHECK_THROWS_AS(rubio_iterate(h, q, 1.0, 0.5, 0.5), InputError);
  CHECK_THROWS_AS(rubio_iterate(h, q, 1.0, 0.5, 2.0, 1e-8, 3), ConvergenceError);
  CHECK_THROWS_AS(rubio_iterate(h, q, 2.0, 0.5, 2.0), DomainError);
  const auto zero = rubio_iterate(GridFunction(g, 0.0), q, 1.0, 0.5, 2.0);
  CHECK(zero.h_norm == 0.0);
  CHECK(max_value(zero.rh) == 0.0);
  CHECK(a1_certificate(zero, 0.5, CubeFamily::dyadic(g), MaximalConfig::family()).verdict == Verdict::Fail);
}
