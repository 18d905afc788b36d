#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lemnikit/geometry.hpp"
#include "lemnikit/level_curve.hpp"
#include "lemnikit/merge_tree.hpp"
#include "lemnikit/polynomial.hpp"

namespace lemnikit {

enum class verdict { holds, violated, inapplicable };

inline const char* to_string(verdict v) {
  switch (v) {
    case verdict::holds: return "HOLDS";
    case verdict::violated: return "VIOLATED";
    default: return "INAPPLICABLE";
  }
}

struct bound_sample {
  cplx z;
  double value = 0.0;
};

struct bound_report {
  int component_id = 0;
  double level = 0.0;
  int n = 0;
  cplx anchor{};
  std::vector<bound_sample> samples;
  double max_bound = 0.0;
  cplx argmax_z{};
  verdict v = verdict::inapplicable;
  double slack = 0.0;  // n - max_bound

  json to_json(bool verbose) const {
    json j{{"component", component_id},
           {"level", level},
           {"n", n},
           {"anchor", {anchor.real(), anchor.imag()}},
           {"sample_count", samples.size()},
           {"max_bound", max_bound},
           {"argmax_z", {argmax_z.real(), argmax_z.imag()}},
           {"verdict", to_string(v)},
           {"slack", slack}};
    if (verbose) {
      json s = json::array();
      for (const auto& smp : samples)
        s.push_back({{"z", {smp.z.real(), smp.z.imag()}}, {"bound", smp.value}});
      j["samples"] = s;
    }
    return j;
  }
};

struct sampling_plan {
  int sublevels = 5;                   // boundary levels tau * 2^{-j}
  int boundary_samples_per_level = 256;
  int interior_samples = 1000;
  int ray_seeds = 16;                  // exact boundary probes along rays from the anchor
  std::uint64_t seed = 1;
  double verify_tol = 1e-9;            // relative to n
};

// Samples |(z-a)P'(z)/P(z)| over the component: traced boundary curves
// at geometric sub-levels, exact ray probes at the top level, and
// rejection-sampled interior points.  For ineligible components the
// verdict is INAPPLICABLE but the samples are still reported.
inline bound_report verify_theorem(const polynomial& p, const merge_tree& tree,
                                   const component& comp, const sampling_plan& plan = {},
                                   const trace_options& topt = {}) {
  const polynomial dp = p.derivative();
  bound_report rep;
  rep.component_id = comp.id;
  rep.level = comp.level;
  rep.n = p.degree();
  rep.anchor = comp.anchor_zero;
  const cplx a = comp.anchor_zero;
  const double tau = comp.level;

  auto add_sample = [&](cplx z) {
    if (std::abs(z - a) <= 1e-12 * (1.0 + std::abs(a))) return;  // z in E \ {a}
    double pz = std::abs(p(z));
    if (pz <= 1e-12 * p.scale_at(z)) return;  // other zeros of P
    rep.samples.push_back({z, std::abs((z - a) * dp(z)) / pz});
  };

  // boundary curves at tau, tau/2, ..., seeded from each member zero;
  // curves already covering a zero at a given level are not retraced
  std::vector<double> crit_vals;
  if (p.degree() >= 2) {
    try {
      for (const auto& c : critical_points(p)) crit_vals.push_back(std::abs(p(c.location)));
    } catch (const numeric_error&) {
    }
  }

  std::vector<std::vector<cplx>> top_polygons;
  for (int j = 0; j < plan.sublevels; ++j) {
    double t = tau * std::pow(2.0, -j);
    // the geometric ladder can land on a critical value (e.g. tau = 1
    // over a saddle value 1/4); step the sub-level slightly below it
    if (j > 0)
      for (double cv : crit_vals)
        if (cv > 0.0 && std::abs(t - cv) < 0.02 * cv) t = 0.97 * cv;
    std::vector<level_curve> traced;
    for (int zi : comp.zero_indices) {
      cplx zloc = tree.zeros.roots[zi].location;
      bool covered = false;
      for (const auto& c : traced)
        if (point_in_polygon(c.points, zloc)) covered = true;
      if (covered) continue;
      cplx seed;
      try {
        seed = seed_on_level(p, zloc, t, topt);
      } catch (const seed_not_found&) {
        continue;
      }
      level_curve c = trace_level_curve(p, seed, t, topt);
      if (!point_in_polygon(c.points, zloc))
        throw seed_not_found("verify_theorem: traced curve does not enclose its zero");
      refine_curve(p, c, plan.boundary_samples_per_level, topt);
      for (auto z : c.points) add_sample(z);
      traced.push_back(std::move(c));
    }
    if (j == 0)
      for (auto& c : traced) top_polygons.push_back(std::move(c.points));
  }

  // exact ray probes on the outer boundary (these include real-axis
  // crossings such as z = 2 for the connected counterexample)
  const double reach = 2.0 * (detail::root_radius(p) + std::abs(a));
  for (int k = 0; k < plan.ray_seeds; ++k) {
    double th = 2.0 * M_PI * k / plan.ray_seeds;
    cplx dir(std::cos(th), std::sin(th));
    auto s = detail::first_level_crossing(p, a, dir, tau, reach);
    if (s) add_sample(a + *s * dir);
  }

  // interior rejection sampling inside the top-level polygons
  if (!top_polygons.empty() && plan.interior_samples > 0) {
    bbox box;
    for (const auto& poly : top_polygons)
      for (auto z : poly) box.expand(z);
    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> ux(box.x0, box.x1), uy(box.y0, box.y1);
    int accepted = 0;
    for (long att = 0; att < 400L * plan.interior_samples && accepted < plan.interior_samples;
         ++att) {
      cplx z(ux(rng), uy(rng));
      if (std::abs(p(z)) > tau) continue;
      bool inside = false;
      for (const auto& poly : top_polygons)
        if (point_in_polygon(poly, z)) inside = true;
      if (!inside) continue;
      std::size_t before = rep.samples.size();
      add_sample(z);
      if (rep.samples.size() > before) ++accepted;
    }
  }

  rep.max_bound = 0.0;
  for (const auto& s : rep.samples)
    if (s.value > rep.max_bound) {
      rep.max_bound = s.value;
      rep.argmax_z = s.z;
    }
  rep.slack = double(rep.n) - rep.max_bound;
  if (!comp.eligible)
    rep.v = verdict::inapplicable;
  else
    rep.v = (rep.max_bound <= rep.n + plan.verify_tol * rep.n) ? verdict::holds
                                                               : verdict::violated;
  return rep;
}

struct corollary_result {
  bool applicable = false;
  double re_polar = 0.0;
};

// Re D_a P(z) >= 0 whenever the component is eligible and P(z) is real
// positive.  Returns applicable=false instead of erroring otherwise.
inline corollary_result verify_corollary(const polynomial& p, const component& comp, cplx z,
                                         double positivity_tol = 1e-12) {
  corollary_result r;
  cplx pz = p(z);
  bool real_positive =
      pz.real() > 0.0 && std::abs(pz.imag()) <= positivity_tol * p.scale_at(z);
  r.applicable = comp.eligible && real_positive;
  r.re_polar = polar_derivative(p, comp.anchor_zero, z).real();
  return r;
}

// Samples of the inverse branch z = f(w), P(f(w)) = w, along a radius.
struct inverse_branch_path {
  cplx a{};          // f(0)
  cplx direction{};  // unit; w = s * direction
  std::vector<double> radii;
  std::vector<cplx> w_samples;
  std::vector<cplx> f_values;
  std::vector<cplx> derivative_values;  // f'(w) = 1 / P'(f(w))

  json to_json() const {
    json s = json::array();
    for (std::size_t i = 0; i < w_samples.size(); ++i)
      s.push_back({{"w", {w_samples[i].real(), w_samples[i].imag()}},
                   {"f", {f_values[i].real(), f_values[i].imag()}},
                   {"df", {derivative_values[i].real(), derivative_values[i].imag()}}});
    return json{{"a", {a.real(), a.imag()}},
                {"direction", {direction.real(), direction.imag()}},
                {"samples", s}};
  }
};

struct continuation_options {
  double continuation_tol = 1e-12;  // |P(f) - w| relative
  double derivative_floor = 1e-10;  // |P'(f)| below this aborts the branch
  double max_radius = 0.995;        // stay inside |w| < 1
  int substeps_per_sample = 8;      // RK4 substeps between recorded radii
};

// Continues the branch f of P^{-1} with f(0) = a along w = s*direction
// by integrating df/dw = 1/P'(f) with Newton re-projection onto
// P(f) = w after every substep.
inline inverse_branch_path continue_inverse_branch(const polynomial& p, cplx a, cplx direction,
                                                   int radius_steps,
                                                   const continuation_options& opt = {}) {
  const polynomial dp = p.derivative();
  if (std::abs(p(a)) > 1e-10 * p.scale_at(a))
    throw std::invalid_argument("continue_inverse_branch: a is not a zero of P");
  if (std::abs(dp(a)) <= opt.derivative_floor * dp.scale_at(a))
    throw std::invalid_argument("continue_inverse_branch: a must be a simple zero");
  direction /= std::abs(direction);

  inverse_branch_path path;
  path.a = a;
  path.direction = direction;

  cplx f = a;
  double s = 0.0;
  for (int k = 1; k <= radius_steps; ++k) {
    double s_next = opt.max_radius * double(k) / radius_steps;
    double h = (s_next - s) / opt.substeps_per_sample;
    for (int sub = 0; sub < opt.substeps_per_sample; ++sub) {
      auto rhs = [&](cplx fz) -> cplx {
        cplx d = dp(fz);
        if (std::abs(d) < opt.derivative_floor)
          throw critical_point_hit("continue_inverse_branch: P' vanished on the path");
        return direction / d;
      };
      cplx k1 = rhs(f);
      cplx k2 = rhs(f + 0.5 * h * k1);
      cplx k3 = rhs(f + 0.5 * h * k2);
      cplx k4 = rhs(f + h * k3);
      f += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      s += h;
      cplx w = s * direction;
      for (int it = 0; it < 20; ++it) {
        cplx r = p(f) - w;
        if (std::abs(r) <= opt.continuation_tol * std::max(1.0, std::abs(w))) break;
        cplx d = dp(f);
        if (std::abs(d) < opt.derivative_floor)
          throw critical_point_hit("continue_inverse_branch: P' vanished during projection");
        f -= r / d;
      }
      if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
        throw continuation_diverged("continue_inverse_branch: iterate diverged");
    }
    cplx w = s * direction;
    if (std::abs(p(f) - w) > 1e3 * opt.continuation_tol * std::max(1.0, std::abs(w)))
      throw continuation_diverged("continue_inverse_branch: projection residual too large");
    path.radii.push_back(s);
    path.w_samples.push_back(w);
    path.f_values.push_back(f);
    path.derivative_values.push_back(1.0 / dp(f));
  }
  return path;
}

struct inverse_bound_result {
  double min_ratio = 0.0;
  bool holds = false;
};

// min over samples of |w f'(w) / (f(w) - a)|, checked against 1/n.
inline inverse_bound_result verify_inverse_bound(const inverse_branch_path& path, int n,
                                                 double verify_tol = 1e-9) {
  inverse_bound_result r;
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.w_samples.size(); ++i) {
    cplx w = path.w_samples[i];
    if (w == cplx{}) continue;
    double ratio =
        std::abs(w * path.derivative_values[i] / (path.f_values[i] - path.a));
    r.min_ratio = std::min(r.min_ratio, ratio);
  }
  r.holds = r.min_ratio >= 1.0 / double(n) - verify_tol;
  return r;
}

}  // namespace lemnikit
