#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lemnikit/polynomial.hpp"

namespace lemnikit {

struct root {
  cplx location;
  int multiplicity = 1;
};

struct root_set {
  std::vector<root> roots;  // sorted by (Re, Im); multiplicities sum to deg P

  int total_multiplicity() const {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
  }
};

struct root_options {
  double cluster_tol = 1e-6;    // base clustering radius for multiplicity detection
  double residual_tol = 1e-8;   // |P(root)| <= residual_tol * scale
  int max_iters = 400;
};

enum class critical_kind { zero_coincident, proper };

struct critical_point {
  cplx location;
  double critical_value = 0.0;  // |P(location)|
  int multiplicity = 1;         // multiplicity as a root of P'
  critical_kind kind = critical_kind::proper;
};

namespace detail {

// Simultaneous (Aberth-Ehrlich) iteration on a polynomial with nonzero
// constant term.  Returns unclustered approximations.
inline std::vector<cplx> aberth(const polynomial& p, const root_options& opt) {
  const auto& c = p.coeffs();
  const int n = p.degree();
  const polynomial dp = p.derivative();

  // Cauchy-style inclusion radius for initial guesses.
  double radius = 0.0;
  for (int i = 0; i < n; ++i)
    radius = std::max(radius, std::pow(std::abs(c[i] / c[n]), 1.0 / double(n - i)));
  radius = 1.0 + 2.0 * radius;

  std::vector<cplx> z(n);
  for (int i = 0; i < n; ++i) {
    double th = 2.0 * M_PI * i / n + 0.7;
    z[i] = radius * cplx(std::cos(th), std::sin(th));
  }

  std::vector<bool> done(n, false);
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      cplx pz = p(z[i]);
      if (std::abs(pz) <= 1e-15 * p.scale_at(z[i])) {
        done[i] = true;
        continue;
      }
      cplx dpz = dp(z[i]);
      if (dpz == cplx{}) {
        z[i] += 1e-8 * (1.0 + std::abs(z[i]));
        all_done = false;
        continue;
      }
      cplx w = pz / dpz;
      cplx s{};
      for (int j = 0; j < n; ++j)
        if (j != i) s += 1.0 / (z[i] - z[j]);
      cplx denom = 1.0 - w * s;
      cplx corr = (denom == cplx{}) ? w : w / denom;
      z[i] -= corr;
      if (std::abs(corr) <= 1e-14 * (1.0 + std::abs(z[i])))
        done[i] = true;
      else
        all_done = false;
    }
    if (all_done) return z;
  }
  // Accept if residuals are already tiny, else report failure.
  for (int i = 0; i < n; ++i)
    if (std::abs(p(z[i])) > opt.residual_tol * p.scale_at(z[i]))
      throw non_convergence("find_roots: Aberth iteration did not converge");
  return z;
}

// Evaluate the k-th derivative scale and value at z.
inline std::vector<polynomial> derivative_chain(const polynomial& p) {
  std::vector<polynomial> d;
  d.push_back(p);
  while (d.back().degree() >= 1) d.push_back(d.back().derivative());
  return d;
}

// A candidate m-fold root at c is accepted when P, P', ..., P^(m-1)
// all vanish there relative to their evaluation scales.
inline bool validate_multiple(const std::vector<polynomial>& chain, cplx c, int m,
                              double accept_tol = 1e-7) {
  for (int j = 0; j < m; ++j) {
    double s = chain[j].scale_at(c);
    if (std::abs(chain[j](c)) > accept_tol * std::max(s, 1e-300)) return false;
  }
  return true;
}

// Newton-refine the center of an m-cluster on P^(m-1), which has a
// simple zero at an exact m-fold root of P.
inline cplx refine_center(const std::vector<polynomial>& chain, cplx c, int m) {
  const polynomial& q = chain[m - 1];
  const polynomial& dq = chain[m];
  for (int it = 0; it < 30; ++it) {
    cplx qc = q(c), dqc = dq(c);
    if (dqc == cplx{}) break;
    cplx step = qc / dqc;
    c -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(c))) break;
  }
  return c;
}

struct cluster {
  std::vector<cplx> members;
  cplx center;
  int mult() const { return static_cast<int>(members.size()); }
};

inline double merge_radius(int combined_mult, double cluster_tol, double scale) {
  double eps_pow = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / combined_mult);
  return std::max(cluster_tol, 20.0 * eps_pow) * scale;
}

// Single-linkage clustering followed by validation; invalid clusters
// are split back with a tighter radius.
inline void cluster_points(const std::vector<polynomial>& chain, std::vector<cplx> pts,
                           double link_radius, const root_options& opt,
                           std::vector<cluster>& out) {
  const std::size_t k = pts.size();
  std::vector<int> label(k, -1);
  int next = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    // breadth-first linkage
    std::vector<std::size_t> queue{i};
    while (!queue.empty()) {
      std::size_t a = queue.back();
      queue.pop_back();
      for (std::size_t b = 0; b < k; ++b) {
        if (label[b] >= 0) continue;
        if (std::abs(pts[a] - pts[b]) <= link_radius * (1.0 + std::abs(pts[a]))) {
          label[b] = next;
          queue.push_back(b);
        }
      }
    }
    ++next;
  }
  for (int g = 0; g < next; ++g) {
    cluster cl;
    for (std::size_t i = 0; i < k; ++i)
      if (label[i] == g) cl.members.push_back(pts[i]);
    cplx mean{};
    for (auto m : cl.members) mean += m;
    mean /= double(cl.members.size());
    int m = cl.mult();
    if (m == 1) {
      cl.center = mean;
      out.push_back(std::move(cl));
      continue;
    }
    cplx c = refine_center(chain, mean, m);
    if (validate_multiple(chain, c, m)) {
      cl.center = c;
      out.push_back(std::move(cl));
    } else if (link_radius > 1e-12) {
      cluster_points(chain, cl.members, link_radius / 8.0, opt, out);
    } else {
      for (auto pt : cl.members) out.push_back(cluster{{pt}, pt});
    }
  }
}

}  // namespace detail

// Simultaneous iteration with exact deflation of roots at the origin
// and multiplicity clustering of the remainder.
inline root_set find_roots(const polynomial& p, const root_options& opt = {}) {
  if (p.degree() < 1) throw std::invalid_argument("find_roots: degree must be >= 1");

  // Exact trailing-zero deflation: roots at z = 0.
  const auto& c = p.coeffs();
  std::size_t zero_mult = 0;
  while (zero_mult < c.size() - 1 && c[zero_mult] == cplx{}) ++zero_mult;

  root_set out;
  if (zero_mult > 0) out.roots.push_back({cplx{}, static_cast<int>(zero_mult)});

  if (zero_mult < c.size() - 1) {
    polynomial q(std::vector<cplx>(c.begin() + zero_mult, c.end()));
    auto pts = detail::aberth(q, opt);
    auto chain = detail::derivative_chain(q);

    std::vector<detail::cluster> clusters;
    double link0 = std::max(opt.cluster_tol, 20.0 * std::pow(std::numeric_limits<double>::epsilon(), 0.25));
    detail::cluster_points(chain, pts, link0, opt, clusters);

    // Second pass: merge cluster centers whose combined multiplicity
    // justifies a wider radius (scattered high-multiplicity roots).
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t i = 0; i < clusters.size() && !merged; ++i) {
        for (std::size_t j = i + 1; j < clusters.size() && !merged; ++j) {
          int mc = clusters[i].mult() + clusters[j].mult();
          double rad = detail::merge_radius(mc, opt.cluster_tol, 1.0 + std::abs(clusters[i].center));
          if (std::abs(clusters[i].center - clusters[j].center) > rad) continue;
          std::vector<cplx> comb = clusters[i].members;
          comb.insert(comb.end(), clusters[j].members.begin(), clusters[j].members.end());
          cplx cc = detail::refine_center(chain, clusters[i].center, mc);
          if (!detail::validate_multiple(chain, cc, mc)) continue;
          clusters[i].members = std::move(comb);
          clusters[i].center = cc;
          clusters.erase(clusters.begin() + j);
          merged = true;
        }
      }
    }

    for (auto& cl : clusters) {
      cplx loc = cl.center;
      if (cl.mult() == 1) {
        // Newton polish for simple roots.
        const polynomial& dq = chain[1];
        for (int it = 0; it < 5; ++it) {
          cplx qz = q(loc), dqz = dq(loc);
          if (dqz == cplx{}) break;
          loc -= qz / dqz;
        }
      }
      out.roots.push_back({loc, cl.mult()});
    }
  }

  std::sort(out.roots.begin(), out.roots.end(), [](const root& a, const root& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });

  if (out.total_multiplicity() != p.degree())
    throw non_convergence("find_roots: multiplicities do not sum to the degree");
  for (const auto& r : out.roots)
    if (std::abs(p(r.location)) > opt.residual_tol * p.scale_at(r.location))
      throw non_convergence("find_roots: root residual exceeds tolerance");
  return out;
}

// Roots of P' classified against |P|.  classification_tol separates an
// exact algebraic coincidence with a multiple zero from roundoff.
inline std::vector<critical_point> critical_points(const polynomial& p,
                                                   const root_options& opt = {}) {
  if (p.degree() < 2) return {};
  polynomial dp = p.derivative();
  root_set crit = find_roots(dp, opt);
  double classification_tol = 1e-9 * p.max_coeff_magnitude();
  std::vector<critical_point> out;
  for (const auto& r : crit.roots) {
    critical_point cp;
    cp.location = r.location;
    cp.multiplicity = r.multiplicity;
    cp.critical_value = std::abs(p(r.location));
    cp.kind = (cp.critical_value > classification_tol) ? critical_kind::proper
                                                       : critical_kind::zero_coincident;
    if (cp.kind == critical_kind::zero_coincident) cp.critical_value = 0.0;
    out.push_back(cp);
  }
  return out;
}

}  // namespace lemnikit
