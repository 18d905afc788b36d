#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "lemnikit/polynomial.hpp"
#include "lemnikit/roots.hpp"

namespace lemnikit {

// Closed level curve of |P| = t with winding data.
struct level_curve {
  double level = 0.0;
  std::vector<cplx> points;
  bool closed = false;
  double arg_increment = 0.0;   // total change of arg P along the curve
  int enclosed_zero_count = 0;  // round(arg_increment / 2 pi)

  json to_json() const {
    json pts = json::array();
    for (auto z : points) pts.push_back({z.real(), z.imag()});
    return json{{"level", level},
                {"closed", closed},
                {"argument_increment", arg_increment},
                {"enclosed_zero_count", enclosed_zero_count},
                {"points", pts}};
  }
};

struct trace_options {
  double trace_tol = 1e-9;      // relative tolerance on | |P| - t | / t
  double max_arg_step = 0.3;    // radians of arg P per step
  double max_step = 0.0;        // absolute step cap; 0 = derive from root radius
  int max_points = 200000;
  int max_newton = 8;
  double closure_factor = 2.0;  // close when within closure_factor * step of the seed
  int n_ray_attempts = 16;
  double critical_gap = 1e-4;   // relative gap to critical values (caller-enforced)
};

namespace detail {

// Inclusion radius of the roots of p around the origin.
inline double root_radius(const polynomial& p) {
  const auto& c = p.coeffs();
  int n = p.degree();
  double radius = 0.0;
  for (int i = 0; i < n; ++i)
    radius = std::max(radius, std::pow(std::abs(c[i] / c[n]), 1.0 / double(n - i)));
  return 1.0 + 2.0 * radius;
}

// Newton projection of z onto { |P| = t } along grad log|P|.
// Returns nullopt when the correction does not converge.
inline std::optional<cplx> project_to_level(const polynomial& p, const polynomial& dp, cplx z,
                                            double t, double tol, int max_newton) {
  for (int it = 0; it < max_newton; ++it) {
    cplx pz = p(z);
    double apz = std::abs(pz);
    if (apz == 0.0) return std::nullopt;
    double g = std::log(apz / t);
    if (std::abs(g) <= 0.5 * tol) return z;
    cplx w = dp(z) / pz;  // grad log|P| = conj(w)
    double w2 = std::norm(w);
    if (w2 == 0.0) return std::nullopt;
    z -= g * std::conj(w) / w2;
  }
  cplx pz = p(z);
  if (std::abs(std::log(std::abs(pz) / t)) <= tol) return z;
  return std::nullopt;
}

// First s > 0 with |P(a + s dir)| = t, where the ray segment before it
// stays inside {|P| < t}.  The coarse walk is re-validated at finer
// strides so thin barriers near saddles are not stepped over, which
// would otherwise return a point on a *different* component's boundary.
inline std::optional<double> first_level_crossing(const polynomial& p, cplx a, cplx dir,
                                                  double t, double reach) {
  if (std::abs(p(a)) >= t) return std::nullopt;
  auto above = [&](double s) { return std::abs(p(a + s * dir)) > t; };
  double step = reach / 512.0;
  double s_hi = 0.0;
  bool bracketed = false;
  for (double s = step; s <= 2.0 * reach; s += step)
    if (above(s)) {
      s_hi = s;
      bracketed = true;
      break;
    }
  if (!bracketed) return std::nullopt;
  double s_lo = s_hi - step;
  for (int refine = 0; refine < 4; ++refine) {
    for (int it = 0; it < 100; ++it) {
      double mid = 0.5 * (s_lo + s_hi);
      (above(mid) ? s_hi : s_lo) = mid;
    }
    double fine = step / 64.0, violation = -1.0;
    for (double s = fine; s < s_lo; s += fine)
      if (above(s)) {
        violation = s;
        break;
      }
    if (violation < 0.0) return 0.5 * (s_lo + s_hi);
    s_hi = violation;
    s_lo = std::max(0.0, violation - fine);
    step = fine;
  }
  return std::nullopt;
}

}  // namespace detail

// Finds a point with |P| = t by bracketing the first crossing of |P|
// along rays from a.  The segment from a to that crossing stays inside
// {|P| < t}, so the seed lies on the boundary of a's component.
inline cplx seed_on_level(const polynomial& p, cplx a, double t, const trace_options& opt = {}) {
  if (t <= 0.0) throw std::invalid_argument("seed_on_level: level must be positive");
  const double reach = 2.0 * (detail::root_radius(p) + std::abs(a));

  for (int k = 0; k < opt.n_ray_attempts; ++k) {
    double th = 2.0 * M_PI * k / opt.n_ray_attempts;
    cplx dir(std::cos(th), std::sin(th));
    auto s = detail::first_level_crossing(p, a, dir, t, reach);
    if (!s) continue;
    cplx z = a + *s * dir;
    if (std::abs(std::abs(p(z)) - t) <= opt.trace_tol * t) return z;
  }
  throw seed_not_found("seed_on_level: no level crossing found on any ray");
}

// Predictor-corrector march along |P| = t, counterclockwise.  The
// tangent of the level curve of log|P| is i * conj(P'/P), normalized.
inline level_curve trace_level_curve(const polynomial& p, cplx seed, double t,
                                     const trace_options& opt = {}) {
  if (t <= 0.0) throw std::invalid_argument("trace_level_curve: level must be positive");
  const polynomial dp = p.derivative();

  auto start = detail::project_to_level(p, dp, seed, t, opt.trace_tol, opt.max_newton);
  if (!start)
    throw critical_level_too_close("trace_level_curve: seed cannot be projected onto the level");

  const double max_step =
      (opt.max_step > 0.0) ? opt.max_step : 0.05 * 2.0 * detail::root_radius(p);

  // steps must stay short relative to the nearest critical point of P:
  // near-saddle necks are otherwise vaulted in one step and the
  // corrector can land on another component's boundary arc
  std::vector<cplx> crit_locs;
  if (p.degree() >= 2) {
    try {
      for (const auto& c : critical_points(p)) crit_locs.push_back(c.location);
    } catch (const numeric_error&) {
    }
  }
  auto crit_dist = [&](cplx z) {
    double d = std::numeric_limits<double>::infinity();
    for (auto c : crit_locs) d = std::min(d, std::abs(z - c));
    return d;
  };

  level_curve curve;
  curve.level = t;
  cplx z = *start;
  curve.points.push_back(z);

  double accumulated_arg = 0.0;
  double h = max_step;
  const double h_min = 1e-12 * (1.0 + std::abs(z));

  while (static_cast<int>(curve.points.size()) < opt.max_points) {
    cplx pz = p(z);
    cplx w = dp(z) / pz;
    double aw = std::abs(w);
    if (aw == 0.0)
      throw critical_level_too_close("trace_level_curve: stationary point of log|P| on curve");
    cplx tangent = cplx(0.0, 1.0) * std::conj(w) / aw;

    double h_cap = std::min(max_step, opt.max_arg_step / aw);
    // floor the cap so a curve passing close to a saddle slows down but
    // never crawls into max_points
    if (!crit_locs.empty())
      h_cap = std::min(h_cap, std::max(0.5 * crit_dist(z), 0.01 * max_step));
    h = std::min(h * 1.25, h_cap);

    cplx znew{};
    bool accepted = false;
    while (h >= h_min) {
      auto corrected = detail::project_to_level(p, dp, z + h * tangent, t, opt.trace_tol, opt.max_newton);
      if (corrected) {
        double dth = std::arg(p(*corrected) / pz);
        // bound the turning of the curve tangent per step: a large turn
        // means the corrector jumped a thin neck onto another boundary
        // arc (where arg P is nearly unchanged but P' flips sign), or
        // that the step under-resolves a high-curvature section
        cplx wn = dp(*corrected) / p(*corrected);
        cplx tangent_new = cplx(0.0, 1.0) * std::conj(wn) / std::abs(wn);
        bool aligned = (tangent_new * std::conj(tangent)).real() > 0.8;
        if (aligned && std::abs(dth) <= 0.5 * M_PI && std::abs(*corrected - z) <= 3.0 * h) {
          znew = *corrected;
          accumulated_arg += dth;
          accepted = true;
          break;
        }
      }
      h *= 0.5;
    }
    if (!accepted)
      throw critical_level_too_close("trace_level_curve: Newton correction failed near a saddle");

    // Loop closure after at least half a turn of arg P.
    if (std::abs(accumulated_arg) >= M_PI &&
        std::abs(znew - curve.points.front()) < opt.closure_factor * h) {
      curve.closed = true;
      break;
    }
    curve.points.push_back(znew);
    z = znew;
  }
  if (!curve.closed) throw trace_overflow("trace_level_curve: max_points exceeded before closure");
  return curve;
}

// Total continuous change of arg P over the closed curve; also sets
// enclosed_zero_count.  By the argument principle this is 2 pi times
// the number of enclosed zeros, counted with multiplicity.
inline double argument_increment(const polynomial& p, level_curve& curve) {
  if (!curve.closed) throw std::invalid_argument("argument_increment: curve must be closed");
  const std::size_t n = curve.points.size();
  double total = 0.0;
  cplx prev = p(curve.points[0]);
  for (std::size_t k = 1; k <= n; ++k) {
    cplx cur = p(curve.points[k % n]);
    double d = std::arg(cur / prev);
    if (std::abs(d) > 0.5 * M_PI)
      throw argument_jump_too_large("argument_increment: sampling too coarse");
    total += d;
    prev = cur;
  }
  curve.arg_increment = total;
  curve.enclosed_zero_count = static_cast<int>(std::lround(total / (2.0 * M_PI)));
  return total;
}

// Inserts Newton-projected midpoints until the curve has at least
// min_points samples.
inline void refine_curve(const polynomial& p, level_curve& curve, int min_points,
                         const trace_options& opt = {}) {
  const polynomial dp = p.derivative();
  while (static_cast<int>(curve.points.size()) < min_points) {
    std::vector<cplx> denser;
    denser.reserve(curve.points.size() * 2);
    const std::size_t n = curve.points.size();
    for (std::size_t k = 0; k < n; ++k) {
      denser.push_back(curve.points[k]);
      cplx mid = 0.5 * (curve.points[k] + curve.points[(k + 1) % n]);
      auto prj = detail::project_to_level(p, dp, mid, curve.level, opt.trace_tol, 20);
      if (prj) denser.push_back(*prj);
    }
    if (denser.size() == curve.points.size()) break;
    curve.points = std::move(denser);
  }
}

// N_t per level, seeded from the zero a; asserts Lemma-style
// monotonicity of the enclosed-zero count.
inline std::vector<std::pair<double, int>> monotonicity_sweep(const polynomial& p, cplx a,
                                                              std::span<const double> levels,
                                                              const trace_options& opt = {}) {
  std::vector<std::pair<double, int>> out;
  int prev = -1;
  for (double t : levels) {
    cplx seed = seed_on_level(p, a, t, opt);
    level_curve c = trace_level_curve(p, seed, t, opt);
    argument_increment(p, c);
    if (c.enclosed_zero_count < prev)
      throw numeric_error("monotonicity_sweep: enclosed-zero count decreased");
    prev = c.enclosed_zero_count;
    out.emplace_back(t, c.enclosed_zero_count);
  }
  return out;
}

}  // namespace lemnikit
