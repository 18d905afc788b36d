#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lemnikit/bound_check.hpp"
#include "oracles.hpp"

using namespace lemnikit;
using oracles::rel_err;

static polynomial counterexample() {
  return polynomial({{0, 0}, {0, 0}, {-0.75, 0}, {0.5, 0}});
}

TEST_CASE("verify_theorem holds on both ovals of z^2 - 1") {
  polynomial p({{-1, 0}, {0, 0}, {1, 0}});
  merge_tree tree = build_merge_tree(p);
  auto comps = components_at_level(tree, p, 0.5);
  REQUIRE(comps.size() == 2);
  for (const auto& comp : comps) {
    bound_report rep = verify_theorem(p, tree, comp);
    CHECK(rep.v == verdict::holds);
    CHECK(rep.n == 2);
    CHECK(rep.max_bound <= 2.0 + 1e-9 * 2.0);
    CHECK(rep.max_bound > 1.0);  // the bound is attained near the boundary
    CHECK(rep.samples.size() >= 5 * 256);
    CHECK(rep.slack == doctest::Approx(2.0 - rep.max_bound));
  }
}

TEST_CASE("connected cubic: sample at z = 2 exceeds the degree") {
  polynomial p = counterexample();
  merge_tree tree = build_merge_tree(p);
  auto comps = components_at_level(tree, p, 1.0);
  REQUIRE(comps.size() == 1);
  REQUIRE(!comps[0].eligible);

  bound_report rep = verify_theorem(p, tree, comps[0]);
  CHECK(rep.v == verdict::inapplicable);  // bound is not claimed here
  // the ray probe along +1 from the anchor 0 lands exactly on z = 2,
  // where |(z-0) P'(z) / P(z)| = 6 > n = 3
  bool found = false;
  for (const auto& s : rep.samples)
    if (std::abs(s.z - cplx(2.0)) < 1e-9) {
      found = true;
      CHECK(rel_err(s.value, 6.0) < 1e-12);
    }
  CHECK(found);
  CHECK(rep.max_bound >= 6.0 - 1e-9);
}

TEST_CASE("equality case c z^n: bound is n at every sample") {
  for (int n : {1, 3, 6}) {
    std::vector<cplx> v(n + 1, cplx{});
    v[n] = cplx(2.0, 1.0);
    polynomial p(std::move(v));
    merge_tree tree = build_merge_tree(p);
    auto comps = components_at_level(tree, p, 1.0);
    REQUIRE(comps.size() == 1);
    REQUIRE(comps[0].eligible);
    bound_report rep = verify_theorem(p, tree, comps[0]);
    CHECK(rep.v == verdict::holds);
    double lo = rep.max_bound, hi = 0.0;
    for (const auto& s : rep.samples) {
      lo = std::min(lo, s.value);
      hi = std::max(hi, s.value);
    }
    CHECK(rel_err(hi, double(n)) < 1e-9);
    CHECK(rel_err(lo, double(n)) < 1e-9);
  }
}

TEST_CASE("max_bound is invariant under P -> cP with tau -> |c| tau") {
  polynomial p({{-1, 0}, {0, 0}, {1, 0}});
  polynomial q = p.scaled(cplx(0.0, 3.0));  // |c| = 3
  merge_tree tp = build_merge_tree(p), tq = build_merge_tree(q);
  auto cp = components_at_level(tp, p, 0.5);
  auto cq = components_at_level(tq, q, 1.5);
  REQUIRE(cp.size() == 2);
  REQUIRE(cq.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    bound_report a = verify_theorem(p, tp, cp[i]);
    bound_report b = verify_theorem(q, tq, cq[i]);
    CHECK(rel_err(a.max_bound, b.max_bound) < 1e-8);
  }
}

TEST_CASE("corollary: Re D_a P >= 0 at real-positive boundary points") {
  polynomial p({{-1, 0}, {0, 0}, {1, 0}});
  merge_tree tree = build_merge_tree(p);
  auto comps = components_at_level(tree, p, 0.5);
  const component& right = comps[1];  // oval around +1
  REQUIRE(std::abs(right.anchor_zero - cplx(1.0)) < 1e-10);

  // P(1.2) = 0.44, real positive, inside the tau = 0.5 oval
  auto r = verify_corollary(p, right, cplx(1.2));
  CHECK(r.applicable);
  CHECK(rel_err(r.re_polar, 0.40) < 1e-12);
  CHECK(r.re_polar >= 0.0);

  // P(1.1 + 0.2 i) is not real: inapplicable
  CHECK(!verify_corollary(p, right, cplx(1.1, 0.2)).applicable);

  // ineligible component: inapplicable even at real-positive points
  polynomial ce = counterexample();
  merge_tree tc = build_merge_tree(ce);
  auto whole = components_at_level(tc, ce, 1.0);
  CHECK(!verify_corollary(ce, whole[0], cplx(2.0)).applicable);  // P(2) = 1
}

TEST_CASE("inverse branch of z^2 - 1 from a = 1 is sqrt(1 + w)") {
  polynomial p({{-1, 0}, {0, 0}, {1, 0}});
  continuation_options opt;
  opt.max_radius = 0.5;
  auto path = continue_inverse_branch(p, 1.0, 1.0, 8, opt);
  REQUIRE(path.radii.size() == 8);
  for (std::size_t i = 0; i < path.radii.size(); ++i) {
    double s = path.radii[i];
    CHECK(std::abs(path.f_values[i] - std::sqrt(1.0 + s)) < 1e-10);
    CHECK(std::abs(p(path.f_values[i]) - path.w_samples[i]) < 1e-11);
  }
  // closed form at s = 1/2: ratio = s / (2 (1 + s - sqrt(1 + s)))
  auto ib = verify_inverse_bound(path, 2);
  double want = 0.5 / (2.0 * (1.5 - std::sqrt(1.5)));
  CHECK(rel_err(ib.min_ratio, want) < 1e-9);
  CHECK(rel_err(ib.min_ratio, 0.90824829046386302) < 1e-9);
  CHECK(ib.holds);  // 0.908 >= 1/2
}

TEST_CASE("inverse bound and direct bound are exact reciprocals") {
  std::mt19937_64 rng(13);
  int done = 0;
  while (done < 10) {
    auto [p, roots] = oracles::random_poly(rng, 3 + int(rng() % 4), 0.2);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    cplx dir = std::exp(cplx(0.0, u(rng)));
    continuation_options opt;
    opt.max_radius = 0.05;  // stay well below the first critical value
    inverse_branch_path path;
    try {
      path = continue_inverse_branch(p, roots[0], dir, 8, opt);
    } catch (const numeric_error&) {
      continue;
    }
    for (std::size_t i = 0; i < path.radii.size(); ++i) {
      double ratio = std::abs(path.w_samples[i] * path.derivative_values[i] /
                              (path.f_values[i] - path.a));
      double direct = bound_value(p, path.a, path.f_values[i]);
      CHECK(std::abs(ratio * direct - 1.0) < 1e-9);
    }
    ++done;
  }
}

TEST_CASE("inverse bound holds along many directions of a quartic") {
  std::vector<cplx> zs{cplx(0.3, 0.4), cplx(-0.7, 0.1), cplx(0.1, -0.8), cplx(0.9, 0.9)};
  auto p = polynomial::from_roots(zs);
  auto rs = find_roots(p);
  continuation_options opt;
  opt.max_radius = 0.02;
  for (int k = 0; k < 32; ++k) {
    cplx dir = std::exp(cplx(0.0, 2.0 * M_PI * k / 32.0));
    auto path = continue_inverse_branch(p, rs.roots[0].location, dir, 8, opt);
    auto ib = verify_inverse_bound(path, p.degree());
    CHECK(ib.holds);
    CHECK(ib.min_ratio >= 0.25 - 1e-9);
  }
}

TEST_CASE("continue_inverse_branch argument and path guards") {
  polynomial p({{-1, 0}, {0, 0}, {1, 0}});
  CHECK_THROWS_AS(continue_inverse_branch(p, cplx(0.5), 1.0, 4), std::invalid_argument);
  // double zero of the cubic example is not a simple zero
  CHECK_THROWS_AS(continue_inverse_branch(counterexample(), cplx(0.0), 1.0, 4),
                  std::invalid_argument);
  // z(z - 1) from a = 0 toward w = -1 hits the critical value -1/4
  polynomial q({{0, 0}, {-1, 0}, {1, 0}});
  CHECK_THROWS_AS(continue_inverse_branch(q, cplx(0.0), cplx(-1.0), 8), numeric_error);
}
