#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "vexp/weights.hpp"

using namespace vexp;

namespace {

Weight power_weight(const Grid& g, double a) { return generate_weight({.kind = WeightKind::Power, .a = a}, g); }

// Direct loops over the cells of one cube.
struct CubeStats {
  double sum = 0.0;
  double min = HUGE_VAL;
};

CubeStats brute_force(const Grid& g, const Cube& c, const GridFunction& v) {
  CubeStats s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Index idx = g.unflatten(i);
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) inside = inside && idx[a] >= c.lo[a] && idx[a] < c.lo[a] + c.side;
    if (!inside) continue;
    s.sum += v[i];
    s.min = std::min(s.min, v[i]);
  }
  return s;
}

}  // namespace

TEST_CASE("weights are floored and positive") {
  const Grid g(1, 2.0, 16);
  GridFunction v(g, 1.0);
  v[3] = 0.0;
  const Weight w(v);
  CHECK(w[3] == doctest::Approx(Weight::kDefaultFloorFraction));
  CHECK(w.floor() > 0.0);
  CHECK_THROWS_AS(Weight(GridFunction(g, 0.0)), InputError);
  CHECK_THROWS_AS(Weight(GridFunction(g, -1.0)), InputError);
  CHECK(w.scaled(2.0)[0] == 2.0);
  CHECK_THROWS_AS(w.scaled(0.0), InputError);
  CHECK(w.power(2.0)[0] == 1.0);
}

TEST_CASE("cube family layout") {
  const Grid g(1, 1.0, 8);
  const auto fam = CubeFamily::dyadic(g);
  // Sides 8, 4, 2 with half-side steps: 1 + 3 + 7 cubes.
  CHECK(fam.depth() == 2);
  CHECK(fam.size() == 11);
  CHECK(CubeFamily::dyadic(g, -1, false).size() == 1 + 2 + 4);
  CHECK(CubeFamily::dyadic(g, 1).size() == 4);
  for (const Cube& c : fam.cubes()) {
    CHECK(c.side >= 2);
    CHECK(c.lo[0] + c.side <= 8);
  }
  CHECK(fam.center(fam.cubes()[0])[0] == doctest::Approx(0.0));
  CHECK(fam.half_width(fam.cubes()[0]) == doctest::Approx(0.5));
}

TEST_CASE("cube sums and minima match direct loops") {
  for (int dim : {1, 2, 3}) {
    const Grid g(dim, 1.0, dim == 1 ? 32 : (dim == 2 ? 16 : 8));
    const auto v = testing::random_function(g, 70 + dim, 0.1, 5.0);
    const auto fam = CubeFamily::dyadic(g);
    const auto sums = fam.sums(v);
    const auto mins = fam.minima(v);
    REQUIRE(sums.size() == fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) {
      const auto ref = brute_force(g, fam.cubes()[i], v);
      CHECK(sums[i] == doctest::Approx(ref.sum).epsilon(1e-13));
      CHECK(mins[i] == ref.min);
    }
  }
}

TEST_CASE("constant weights have unit constants") {
  const Grid g(2, 1.0, 32);
  const auto fam = CubeFamily::dyadic(g);
  const Weight one(GridFunction(g, 1.0));
  CHECK(ap_constant(one, 2.0, fam).constant == 1.0);
  CHECK(ap_constant(one, 3.7, fam).constant == 1.0);
  CHECK(a1_constant(one, fam).constant == 1.0);
  CHECK(rh_constant(one, 2.0, fam).constant == 1.0);
  const Weight three(GridFunction(g, 3.0));
  CHECK(ap_constant(three, 2.0, fam).constant == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a1_constant(three, fam).constant == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rh_constant(three, 1.5, fam).constant == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ap_constant(three, 2.0, fam).stable);
  CHECK_THROWS_AS(ap_constant(one, 1.0, fam), DomainError);
  CHECK_THROWS_AS(rh_constant(one, 1.0, fam), DomainError);
}

TEST_CASE("A_p constant of power weights") {
  auto constant_at = [](int n, double a) {
    const Grid g(1, 2.0, n);
    return ap_constant(power_weight(g, a), 2.0, CubeFamily::dyadic(g));
  };
  const auto half_n = constant_at(1024, 0.5);
  const auto half_2n = constant_at(2048, 0.5);
  CHECK(std::isfinite(half_n.constant));
  CHECK(half_2n.constant == doctest::Approx(half_n.constant).epsilon(0.10));
  CHECK(half_n.stable);

  const double c3 = constant_at(1024, 0.3).constant;
  const double c6 = constant_at(1024, 0.6).constant;
  const double c9 = constant_at(1024, 0.9).constant;
  CHECK(c3 < c6);
  CHECK(c6 < c9);

  // At the end of the range the constant keeps growing with resolution.
  double previous = 0.0;
  for (int n : {256, 1024, 4096}) {
    const double c = constant_at(n, 1.0).constant;
    CHECK(c > previous);
    previous = c;
  }
}

TEST_CASE("A_1 constant of power weights") {
  auto a1_at = [](int n, double a) {
    const Grid g(1, 2.0, n);
    return a1_constant(power_weight(g, a), CubeFamily::dyadic(g));
  };
  const auto neg = a1_at(512, -0.5);
  const auto neg_fine = a1_at(1024, -0.5);
  CHECK(neg.constant > 1.5);
  CHECK(neg.constant < 2.5);
  CHECK(neg_fine.constant == doctest::Approx(neg.constant).epsilon(0.10));

  // Not A_1: every cube around the origin sees the minimum (h/2)^{1/2}, so
  // the constant grows like (side / h)^{1/2} as the family reaches finer cells.
  double previous = 0.0;
  for (int n : {64, 256, 1024, 4096}) {
    const double c = a1_at(n, 0.5).constant;
    CHECK(c > 1.5 * previous);
    previous = c;
  }
}

TEST_CASE("reverse Hoelder constant") {
  auto rh_at = [](int n, double s) {
    const Grid g(1, 2.0, n);
    return rh_constant(power_weight(g, 0.5), s, CubeFamily::dyadic(g)).constant;
  };
  const double c = rh_at(512, 2.0);
  CHECK(std::isfinite(c));
  CHECK(rh_at(1024, 2.0) == doctest::Approx(c).epsilon(0.10));

  // Power means increase with s and collapse to the mean as s -> 1.
  double previous = 1.0;
  for (double s : {1.0001, 1.01, 1.1, 1.5, 2.0, 4.0}) {
    const double v = rh_at(256, s);
    CHECK(v >= previous);
    previous = v;
  }
  CHECK(rh_at(256, 1.0001) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("A_p and reverse Hoelder equivalence") {
  const Grid g(1, 2.0, 1024);
  const auto fam = CubeFamily::dyadic(g);
  const auto one = ap_rh_equivalence_check(Weight(GridFunction(g, 1.0)), 2.0, 0.5, fam);
  CHECK(one.verdict == Verdict::Consistent);
  CHECK(one.at("q") == 3.0);
  CHECK(one.at("A_p") == 1.0);
  CHECK(one.at("A_q_of_w_delta") == 1.0);
  CHECK(one.at("RH_inv_delta_of_w_delta") == 1.0);

  const auto pw = ap_rh_equivalence_check(power_weight(g, 0.6), 2.0, 0.5, fam);
  CHECK(pw.verdict == Verdict::Consistent);
  CHECK(std::isfinite(pw.at("A_p")));
  CHECK(std::isfinite(pw.at("RH_inv_delta_of_w_delta")));
  CHECK_THROWS_AS(ap_rh_equivalence_check(power_weight(g, 0.6), 2.0, 1.0, fam), DomainError);
}

TEST_CASE("transferred weight exponents") {
  for (double delta : {0.25, 0.5, 0.75}) {
    const auto t = transferred_weight(2.0, 2.0, delta);
    CHECK(t.power == doctest::Approx(1.0 / delta));
    CHECK(t.index == doctest::Approx(2.0));
  }
  const auto near_one = transferred_weight(3.0, 2.0, 1.0 - 1e-9);
  CHECK(near_one.power == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(near_one.index == doctest::Approx(3.0).epsilon(1e-6));
  CHECK_THROWS_AS(transferred_weight(4.0, 2.0, 0.5), RangeError);
  CHECK_THROWS_AS(transferred_weight(4.0 / 3.0, 2.0, 0.5), RangeError);
  CHECK_THROWS_AS(transferred_weight(2.0, 2.0, 1.0), DomainError);

  const Grid g(1, 2.0, 256);
  const auto r = transferred_weight_check(Weight(GridFunction(g, 1.0)), 3.0, 2.0, 0.5, CubeFamily::dyadic(g));
  CHECK(r.verdict == Verdict::HypothesesMet);
  CHECK(r.at("constant") == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("weight generators") {
  const Grid g(2, 2.0, 64);
  const auto c = generate_weight({.kind = WeightKind::Constant, .value = 3.0}, g);
  CHECK(min_value(c.values()) == 3.0);
  CHECK(max_value(c.values()) == 3.0);
  const auto flat = generate_weight({.kind = WeightKind::Power, .a = 0.0}, g);
  CHECK(min_value(flat.values()) == 1.0);
  CHECK(max_value(flat.values()) == 1.0);
  const auto smooth = generate_weight({.kind = WeightKind::SmoothedPower, .a = 1.0, .eps = 0.5}, g);
  CHECK(min_value(smooth.values()) >= 0.5);
  CHECK_THROWS_AS(generate_weight({.kind = WeightKind::Constant, .value = 0.0}, g), InputError);

  const Grid line(1, 4.0, 1024);
  const auto mp = generate_weight({.kind = WeightKind::MaximalPower, .delta = 0.5, .seed = 7}, line);
  const auto a1 = a1_constant(mp, CubeFamily::dyadic(line));
  CHECK(std::isfinite(a1.constant));
  CHECK(a1.stable);
  const Grid line2(1, 4.0, 2048);
  const auto mp2 = generate_weight({.kind = WeightKind::MaximalPower, .delta = 0.5, .seed = 7}, line2);
  CHECK(a1_constant(mp2, CubeFamily::dyadic(line2)).constant == doctest::Approx(a1.constant).epsilon(0.10));
}
