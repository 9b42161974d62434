#include <cmath>
#include <functional>

#include "doctest.h"
#include "support.hpp"
#include "vexp/norms.hpp"

using namespace vexp;

namespace {

// Plain bisection for a decreasing function crossing zero inside [lo, hi].
double root_of_decreasing(const std::function<double(double)>& fn, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fn(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

GridFunction indicator(const Grid& g, double a, double b) {
  return GridFunction::sample(g, [&](const Point& x) { return x[0] > a && x[0] < b ? 1.0 : 0.0; });
}

}  // namespace

TEST_CASE("modular") {
  const Grid g(1, 2.0, 64);
  const auto p = Exponent::smoothed_step(g, 1.5, 3.0, 0.0, 1.0);
  CHECK(modular(GridFunction(g, 1.0), p) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(modular(GridFunction(g, 0.0), p) == 0.0);
  const Grid unit(1, 1.0, 64);
  CHECK(modular(GridFunction(unit, 2.0), Exponent::constant(unit, 3.0)) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(std::isinf(modular(GridFunction(unit, 1e200), Exponent::constant(unit, 3.0))));
}

TEST_CASE("luxemburg norm of indicators") {
  const Grid g(1, 8.0, 256);
  const auto p2 = Exponent::constant(g, 2.0);
  CHECK(luxemburg_norm(GridFunction(g, 0.0), p2).value == 0.0);
  CHECK(luxemburg_norm(indicator(g, 0.0, 1.0), p2).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(luxemburg_norm(indicator(g, -2.0, 2.0), p2).value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(luxemburg_norm(scaled(indicator(g, -2.0, 2.0), 3.0), Exponent::constant(g, 4.0)).value ==
        doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("luxemburg norm with two exponents against an independent root") {
  // p = 2 on [-1, 0) and p = 4 on [0, 1), f = 1 on [-1, 1).
  const Grid g(1, 4.0, 256);
  const auto p = Exponent::smoothed_step(g, 2.0, 4.0, 0.0, 0.0);
  {
    // Measure 1/2 under each exponent: (1/lambda)^2/2 + (1/lambda)^4/2 = 1.
    const auto f = indicator(g, -0.5, 0.5);
    const double lambda = root_of_decreasing(
        [](double l) { return 0.5 * std::pow(l, -2.0) + 0.5 * std::pow(l, -4.0) - 1.0; }, 0.1, 10.0);
    CHECK(lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(luxemburg_norm(f, p).value == doctest::Approx(lambda).epsilon(1e-9));
  }
  {
    // Measure 1 under each exponent: (1/lambda)^2 + (1/lambda)^4 = 1.
    const auto f = indicator(g, -1.0, 1.0);
    const double lambda = root_of_decreasing(
        [](double l) { return std::pow(l, -2.0) + std::pow(l, -4.0) - 1.0; }, 0.1, 10.0);
    CHECK(lambda == doctest::Approx(1.27202).epsilon(1e-5));
    const auto r = luxemburg_norm(f, p);
    CHECK(r.value == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(r.residual <= 1e-10);
  }
}

TEST_CASE("luxemburg norm reduces to the classical norm for constant p") {
  const Grid g(1, 3.0, 512);
  for (double pv : {1.0, 1.5, 2.0, 4.0, 7.5}) {
    const auto f = testing::random_function(g, static_cast<std::uint64_t>(pv * 10));
    double s = 0.0;
    for (double v : f.values()) s += std::pow(std::fabs(v), pv);
    const double classical = std::pow(s * g.spacing(), 1.0 / pv);
    CHECK(luxemburg_norm(f, Exponent::constant(g, pv)).value == doctest::Approx(classical).epsilon(1e-9));
  }
}

TEST_CASE("luxemburg norm properties on variable exponents") {
  const Grid g(2, 2.0, 32);
  const auto p = Exponent::radial_bump(g, 1.5, 1.5, 2.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = testing::random_function(g, seed, -3.0, 3.0);
    const double n = luxemburg_norm(f, p).value;
    CHECK(modular(scaled(f, 1.0 / n), p) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(luxemburg_norm(scaled(f, -2.5), p).value == doctest::Approx(2.5 * n).epsilon(2e-10));
    const auto h = testing::random_function(g, seed + 100);
    GridFunction sum = f;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += h[i];
    CHECK(luxemburg_norm(sum, p).value <= n + luxemburg_norm(h, p).value + 1e-9);
  }
  CHECK_THROWS_AS(luxemburg_norm(GridFunction(Grid(2, 2.0, 16), 1.0), p), InputError);
}

TEST_CASE("quasi-norm") {
  const Grid g(1, 4.0, 256);
  const auto half = Exponent::constant(g, 0.5);
  CHECK(quasi_norm(indicator(g, 0.0, 1.0), half, 0.25).value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(quasi_norm(GridFunction(g, 0.0), half, 0.25).value == 0.0);

  const double tol = 1e-10;
  const auto p = Exponent::radial_bump(g, 1.6, 1.2, 1.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = testing::random_function(g, seed);
    const double lux = luxemburg_norm(f, p, tol).value;
    for (double p0 : {p.p_minus() / 2.0, p.p_minus() / 4.0}) {
      CHECK(std::fabs(quasi_norm(f, p, p0, tol).value - lux) <= 3.0 * tol * lux);
    }
  }
  CHECK_THROWS_AS(quasi_norm(GridFunction(g, 1.0), p, p.p_minus()), DomainError);
}

TEST_CASE("weighted norm") {
  const Grid g(1, 2.0, 256);
  CHECK(weighted_norm(GridFunction(g, 1.0), 1.0, Weight(GridFunction(g, 3.0))) == doctest::Approx(6.0));
  const auto f = testing::random_function(g, 9);
  CHECK(weighted_norm(f, 2.5, Weight(GridFunction(g, 1.0))) ==
        doctest::Approx(luxemburg_norm(f, Exponent::constant(g, 2.5)).value).epsilon(1e-9));

  const Grid fine(1, 4.0, 8192);
  const Weight w(GridFunction::sample(fine, [](const Point& x) { return std::sqrt(std::fabs(x[0])); }));
  // Closed form: integral of x^{1/2} over [0, 1] is 2/3.
  CHECK(std::fabs(weighted_norm(indicator(fine, 0.0, 1.0), 2.0, w) - std::sqrt(2.0 / 3.0)) < 1e-4);
}

TEST_CASE("dual pairing and the Hoelder constant") {
  const Grid g(1, 2.0, 128);
  const auto f = testing::random_function(g, 1);
  CHECK(dual_pairing(f, GridFunction(g, 1.0)) == doctest::Approx(integrate(f)).epsilon(1e-13));
  CHECK(dual_pairing(indicator(g, -1.0, 0.0), indicator(g, 0.0, 1.0)) == 0.0);

  const auto p = Exponent::smoothed_step(g, 1.5, 3.0, 0.0, 0.5);
  const auto pc = conjugate(p);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto a = testing::random_function(g, 2 * seed);
    auto b = testing::random_function(g, 2 * seed + 1);
    // Half of the family is aligned with a, which is where the constant is approached.
    if (seed % 2 == 0) {
      for (std::size_t i = 0; i < b.size(); ++i) b[i] = std::copysign(std::pow(std::fabs(a[i]), p[i] - 1.0), a[i]);
    }
    const double ratio =
        std::fabs(dual_pairing(a, b)) / (luxemburg_norm(a, p).value * luxemburg_norm(b, pc).value);
    worst = std::max(worst, ratio);
  }
  CHECK(worst > 0.5);
  CHECK(worst <= 2.0);
}
