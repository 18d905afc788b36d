#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lemnikit/polynomial.hpp"
#include "lemnikit/roots.hpp"
#include "oracles.hpp"

using namespace lemnikit;
using oracles::rel_err;

// z^3/2 - 3 z^2/4, the connected counterexample polynomial
static polynomial counterexample() {
  return polynomial({{0, 0}, {0, 0}, {-0.75, 0}, {0.5, 0}});
}

static polynomial monomial(int n, cplx c = 1.0) {
  std::vector<cplx> v(n + 1, cplx{});
  v[n] = c;
  return polynomial(std::move(v));
}

TEST_CASE("evaluate") {
  CHECK(std::abs(counterexample()(2.0) - cplx(1.0)) < 1e-15);
  CHECK(monomial(5)(0.0) == cplx(0.0));
  CHECK(std::abs(polynomial({{-1, 0}, {0, 0}, {1, 0}})(1.2) - cplx(0.44)) < 1e-15);
}

TEST_CASE("derivative coefficients") {
  polynomial d = counterexample().derivative();
  REQUIRE(d.degree() == 2);
  CHECK(std::abs(d.coeffs()[0]) == 0.0);
  CHECK(std::abs(d.coeffs()[1] - cplx(-1.5)) < 1e-15);
  CHECK(std::abs(d.coeffs()[2] - cplx(1.5)) < 1e-15);

  polynomial dz6 = monomial(6).derivative();
  CHECK(dz6.degree() == 5);
  CHECK(std::abs(dz6.coeffs()[5] - cplx(6.0)) < 1e-15);

  polynomial lin({{2, 0}, {3, 0}});  // 3z + 2
  polynomial dlin = lin.derivative();
  CHECK(dlin.degree() == 0);
  CHECK(std::abs(dlin.coeffs()[0] - cplx(3.0)) < 1e-15);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(polynomial(std::vector<cplx>{{1, 0}}), std::invalid_argument);  // constant
  CHECK_THROWS_AS(polynomial(std::vector<cplx>{}), std::invalid_argument);
  std::vector<cplx> big(66, cplx{});
  big.back() = 1.0;
  CHECK_THROWS_AS(polynomial(std::move(big)), std::invalid_argument);
}

TEST_CASE("json round trip and rejection") {
  polynomial p = counterexample();
  polynomial q = polynomial::from_json(p.to_json());
  for (int i = 0; i <= p.degree(); ++i)
    CHECK(std::abs(p.coeffs()[i] - q.coeffs()[i]) == 0.0);
  CHECK_THROWS_AS(polynomial::from_json(json{{"coeffs", json::array()}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(polynomial::from_json(json::parse(R"({"coeffs": [[0,0],[0,0]]})")),
                  std::invalid_argument);
}

TEST_CASE("find_roots: factored examples") {
  auto rs = find_roots(polynomial({{-1, 0}, {0, 0}, {1, 0}}));
  REQUIRE(rs.roots.size() == 2);
  CHECK(std::abs(rs.roots[0].location - cplx(-1.0)) < 1e-10);
  CHECK(std::abs(rs.roots[1].location - cplx(1.0)) < 1e-10);

  auto ce = find_roots(counterexample());
  REQUIRE(ce.roots.size() == 2);
  CHECK(std::abs(ce.roots[0].location) < 1e-12);
  CHECK(ce.roots[0].multiplicity == 2);
  CHECK(std::abs(ce.roots[1].location - cplx(1.5)) < 1e-10);
  CHECK(ce.roots[1].multiplicity == 1);

  for (int n : {2, 4, 6}) {
    auto zn = find_roots(monomial(n));
    REQUIRE(zn.roots.size() == 1);
    CHECK(zn.roots[0].multiplicity == n);
    CHECK(std::abs(zn.roots[0].location) < 1e-12);
  }
}

TEST_CASE("find_roots: clustered multiple root off the origin") {
  // (z - 1)^3 (z + 2)
  std::vector<cplx> roots{1.0, 1.0, 1.0, -2.0};
  auto rs = find_roots(polynomial::from_roots(roots));
  REQUIRE(rs.roots.size() == 2);
  CHECK(rs.roots[0].multiplicity == 1);
  CHECK(std::abs(rs.roots[0].location - cplx(-2.0)) < 1e-10);
  CHECK(rs.roots[1].multiplicity == 3);
  CHECK(std::abs(rs.roots[1].location - cplx(1.0)) < 1e-6);
}

TEST_CASE("find_roots round-trips coefficients (degree <= 8, sep >= 0.1)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    int deg = 2 + int(rng() % 7);
    auto [p, roots] = oracles::random_poly(rng, deg, 0.1);
    auto rs = find_roots(p);
    std::vector<cplx> found;
    for (const auto& r : rs.roots)
      for (int m = 0; m < r.multiplicity; ++m) found.push_back(r.location);
    polynomial q = polynomial::from_roots(found);
    for (int i = 0; i <= deg; ++i)
      CHECK(std::abs(p.coeffs()[i] - q.coeffs()[i]) < 1e-8 * (1.0 + std::abs(p.coeffs()[i])));
  }
}

TEST_CASE("critical_points classification") {
  auto cps = critical_points(counterexample());
  REQUIRE(cps.size() == 2);
  // sorted by location: 0 then 1
  CHECK(cps[0].kind == critical_kind::zero_coincident);
  CHECK(std::abs(cps[0].location) < 1e-12);
  CHECK(cps[1].kind == critical_kind::proper);
  CHECK(rel_err(cps[1].critical_value, 0.25) < 1e-10);

  auto c2 = critical_points(polynomial({{-1, 0}, {0, 0}, {1, 0}}));
  REQUIRE(c2.size() == 1);
  CHECK(c2[0].kind == critical_kind::proper);
  CHECK(rel_err(c2[0].critical_value, 1.0) < 1e-12);

  auto czn = critical_points(monomial(5));
  int total = 0;
  for (const auto& cp : czn) {
    CHECK(cp.kind == critical_kind::zero_coincident);
    total += cp.multiplicity;
  }
  CHECK(total == 4);

  CHECK(critical_points(polynomial({{1, 0}, {1, 0}})).empty());  // degree 1
}

TEST_CASE("critical point count equals degree - 1") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto [p, roots] = oracles::random_poly(rng, 3 + int(rng() % 5), 0.1);
    int total = 0;
    for (const auto& cp : critical_points(p)) total += cp.multiplicity;
    CHECK(total == p.degree() - 1);
  }
}

TEST_CASE("bound_value examples") {
  CHECK(rel_err(bound_value(counterexample(), 0.0, 2.0), 6.0) < 1e-12);
  polynomial p2({{-1, 0}, {0, 0}, {1, 0}});
  CHECK(rel_err(bound_value(p2, 1.0, 1.2), 0.48 / 0.44) < 1e-12);
  CHECK_THROWS_AS(bound_value(p2, 1.0, 1.0), division_near_zero);
}

TEST_CASE("bound_value equals n for c z^n (10^6 random points)") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  polynomial p = monomial(6, cplx(2.0, 1.0));
  polynomial dp = p.derivative();
  for (int k = 0; k < 1000000; ++k) {
    cplx z(u(rng), u(rng));
    if (std::abs(z) < 0.05) continue;  // below this |z^6| underflows the eval floor
    CHECK(rel_err(bound_value(p, dp, 0.0, z), 6.0) < 1e-12);
  }
}

TEST_CASE("bound_value is invariant under P -> cP") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto [p, roots] = oracles::random_poly(rng, 5, 0.1);
  for (int k = 0; k < 100; ++k) {
    cplx c(u(rng), u(rng));
    if (std::abs(c) < 1e-3) continue;
    polynomial q = p.scaled(c);
    cplx z(2.0 + u(rng), u(rng));
    CHECK(rel_err(bound_value(q, 0.3, z), bound_value(p, 0.3, z)) < 1e-12);
  }
}

TEST_CASE("polar derivative examples and identity") {
  polynomial z2({{0, 0}, {0, 0}, {1, 0}});
  CHECK(std::abs(polar_derivative(z2, 0.0, cplx(1.3, -0.4))) < 1e-14);
  polynomial p2({{-1, 0}, {0, 0}, {1, 0}});
  CHECK(std::abs(polar_derivative(p2, 1.0, 0.0) - cplx(-2.0)) < 1e-14);
  CHECK(std::abs(polar_derivative(counterexample(), 0.0, 2.0) - cplx(-3.0)) < 1e-13);

  // D_a P(z) + (z-a) P'(z) = n P(z)
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto [p, roots] = oracles::random_poly(rng, 6, 0.1);
  polynomial dp = p.derivative();
  for (int k = 0; k < 1000; ++k) {
    cplx a(u(rng), u(rng)), z(u(rng), u(rng));
    cplx lhs = polar_derivative(p, dp, a, z) + (z - a) * dp(z);
    cplx rhs = double(p.degree()) * p(z);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
  }
}
