#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "lemnikit/level_curve.hpp"
#include "lemnikit/polynomial.hpp"
#include "lemnikit/roots.hpp"

namespace lemnikit {

struct flow_options {
  double descent_tol = 1e-8;       // distance to a zero at termination, relative
  double saddle_offset = 1e-4;     // times the local separation scale
  int max_steps = 20000;
  double step_cap = 0.2;           // times (1 + |z|)
};

struct merge_event {
  double level = 0.0;
  std::vector<int> groups;  // distinct-zero cluster ids joined at this level
};

// Union-find history of lemniscate components over the proper critical
// values.  Cluster ids index the distinct zero locations in `zeros`
// (entries of equal location share one id).
struct merge_tree {
  root_set zeros;
  std::vector<critical_point> criticals;      // all critical points of P
  std::vector<merge_event> merge_events;      // ascending by level
  std::vector<double> critical_levels;        // {0} + proper values + {inf}
  // per distinct proper critical point: which clusters its descents reach
  struct saddle_link {
    cplx location;
    double level = 0.0;
    std::vector<int> reached_clusters;
    bool ambiguous = false;  // union was a no-op
  };
  std::vector<saddle_link> saddles;

  json to_json() const {
    json zl = json::array();
    for (const auto& r : zeros.roots)
      zl.push_back({{"location", {r.location.real(), r.location.imag()}},
                    {"multiplicity", r.multiplicity}});
    json ev = json::array();
    for (const auto& e : merge_events) ev.push_back({{"level", e.level}, {"groups", e.groups}});
    json cl = json::array();
    for (double t : critical_levels)
      cl.push_back(std::isinf(t) ? json("inf") : json(t));
    return json{{"critical_levels", cl}, {"merge_events", ev}, {"zeros", zl}};
  }
};

struct component {
  int id = 0;
  double level = 0.0;
  std::vector<int> zero_indices;  // indices into tree.zeros.roots
  std::vector<critical_point> proper_criticals_inside;
  bool eligible = false;
  cplx anchor_zero{};
};

namespace detail {

struct union_find {
  std::vector<int> parent;
  explicit union_find(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;  // smaller id wins: deterministic representatives
    return true;
  }
};

}  // namespace detail

// Monotone damped-Newton descent of |P|.  Every accepted step strictly
// decreases |P|, so the path stays inside the sublevel component of the
// start point; the returned point is (numerically) a zero of P.
inline cplx descent_flow(const polynomial& p, cplx start, const flow_options& opt = {}) {
  const polynomial dp = p.derivative();
  if (std::abs(p(start)) <= 1e-13 * p.scale_at(start)) return start;

  cplx z = start;
  double f = std::abs(p(z));
  for (int step = 0; step < opt.max_steps; ++step) {
    if (f <= 1e-13 * p.scale_at(z)) return z;
    cplx pz = p(z), dpz = dp(z);
    double adp = std::abs(dpz);
    if (adp == 0.0) {
      // stationary point of P'; nudge off it
      z += 1e-7 * (1.0 + std::abs(z));
      f = std::abs(p(z));
      continue;
    }
    cplx dir = -pz * std::conj(dpz) / (std::abs(pz) * adp);  // unit steepest descent
    double lambda = std::min(std::abs(pz) / adp, opt.step_cap * (1.0 + std::abs(z)));
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      cplx cand = z + lambda * dir;
      double fc = std::abs(p(cand));
      if (fc < f) {
        z = cand;
        f = fc;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) throw flow_stalled("descent_flow: |P| stopped decreasing");
  }
  throw flow_stalled("descent_flow: step budget exhausted");
}

namespace detail {

inline int nearest_distinct_zero(const std::vector<cplx>& locations, cplx z) {
  int best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < locations.size(); ++i) {
    double d = std::abs(z - locations[i]);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace detail

// Builds the union-find history of sublevel-set components: each
// proper critical point is connected to the zero basins it merges by
// launching monotone descents from just off the saddle.
inline merge_tree build_merge_tree(const polynomial& p, const root_options& ropt = {},
                                   const flow_options& fopt = {}) {
  merge_tree tree;
  tree.zeros = find_roots(p, ropt);
  tree.criticals = critical_points(p, ropt);

  // distinct zero locations -> cluster ids (roots are sorted, distinct)
  std::vector<cplx> locs;
  for (const auto& r : tree.zeros.roots) locs.push_back(r.location);
  const int nloc = static_cast<int>(locs.size());

  // distinct proper critical points, ascending by level then location
  std::vector<const critical_point*> proper;
  for (const auto& cp : tree.criticals)
    if (cp.kind == critical_kind::proper) proper.push_back(&cp);
  std::sort(proper.begin(), proper.end(), [](const critical_point* a, const critical_point* b) {
    if (a->critical_value != b->critical_value) return a->critical_value < b->critical_value;
    if (a->location.real() != b->location.real()) return a->location.real() < b->location.real();
    return a->location.imag() < b->location.imag();
  });

  const polynomial dp = p.derivative();
  const polynomial ddp = dp.derivative();
  detail::union_find uf(nloc);

  for (const critical_point* cp : proper) {
    const cplx zeta = cp->location;
    const double level = cp->critical_value;

    // local separation scale: distance to nearest zero or other critical
    double sep = std::numeric_limits<double>::infinity();
    for (auto l : locs) sep = std::min(sep, std::abs(zeta - l));
    for (const auto& other : tree.criticals)
      if (std::abs(other.location - zeta) > 1e-12)
        sep = std::min(sep, std::abs(other.location - zeta));
    if (!std::isfinite(sep) || sep <= 0.0) sep = 1.0;
    double eps = fopt.saddle_offset * sep;

    // steepest-descent axis of |P| at a simple saddle
    std::vector<cplx> starts;
    cplx a2 = ddp(zeta);
    if (cp->multiplicity == 1 && std::abs(a2) > 1e-12 * ddp.scale_at(zeta)) {
      cplx d = std::sqrt(-p(zeta) * std::conj(a2));
      d /= std::abs(d);
      starts.push_back(zeta + eps * d);
      starts.push_back(zeta - eps * d);
    }
    // circle starts: 2k+2 for a multiplicity-k saddle (always included;
    // any monotone descent from inside the sublevel set is valid)
    int nc = 2 * cp->multiplicity + 2;
    for (int j = 0; j < nc; ++j) {
      double th = 2.0 * M_PI * j / nc + 0.3;
      starts.push_back(zeta + eps * cplx(std::cos(th), std::sin(th)));
    }

    std::vector<int> reached;
    for (cplx s : starts) {
      // descend only from strictly below the saddle level; starts in
      // ascent directions only reach the level by roundoff, so demand a
      // real margin and skip them otherwise
      const double margin = level * (1.0 - 1e-10);
      double shrink = 1.0;
      cplx s2 = s;
      while (std::abs(p(s2)) >= margin && shrink > 1e-3) {
        shrink *= 0.5;
        s2 = zeta + (s - zeta) * shrink;
      }
      if (std::abs(p(s2)) >= margin) continue;
      cplx end = descent_flow(p, s2, fopt);
      // |P(end)| is at roundoff, so end sits at one of the zeros
      int idx = detail::nearest_distinct_zero(locs, end);
      if (std::find(reached.begin(), reached.end(), uf.find(idx)) == reached.end())
        reached.push_back(uf.find(idx));
    }
    std::sort(reached.begin(), reached.end());

    merge_tree::saddle_link link;
    link.location = zeta;
    link.level = level;
    link.reached_clusters = reached;

    if (reached.size() >= 2) {
      merge_event ev;
      ev.level = level;
      ev.groups = reached;
      for (std::size_t i = 1; i < reached.size(); ++i) uf.unite(reached[0], reached[i]);
      tree.merge_events.push_back(ev);
    } else {
      link.ambiguous = true;  // no-op union; higher-multiplicity zeros already joined
    }
    tree.saddles.push_back(link);
  }

  tree.critical_levels.push_back(0.0);
  for (const critical_point* cp : proper)
    if (tree.critical_levels.empty() || std::abs(tree.critical_levels.back() - cp->critical_value) >
                                            1e-12 * std::max(1.0, cp->critical_value))
      tree.critical_levels.push_back(cp->critical_value);
  tree.critical_levels.push_back(std::numeric_limits<double>::infinity());
  return tree;
}

// Union-find state at level tau; tau must avoid critical levels by the
// relative gap.
inline std::vector<component> components_at_level(const merge_tree& tree, const polynomial& p,
                                                  double tau, double critical_gap = 1e-4) {
  if (tau <= 0.0) throw std::invalid_argument("components_at_level: level must be positive");
  for (const auto& s : tree.saddles)
    if (std::abs(tau - s.level) <= critical_gap * std::max(tau, s.level))
      throw level_at_critical_value("components_at_level: level coincides with a critical value");

  const int nloc = static_cast<int>(tree.zeros.roots.size());
  detail::union_find uf(nloc);
  for (const auto& ev : tree.merge_events) {
    if (ev.level >= tau) break;
    for (std::size_t i = 1; i < ev.groups.size(); ++i) uf.unite(ev.groups[0], ev.groups[i]);
  }

  std::map<int, component> comps;
  for (int i = 0; i < nloc; ++i) {
    int r = uf.find(i);
    auto& c = comps[r];
    c.level = tau;
    c.zero_indices.push_back(i);
  }
  for (const auto& s : tree.saddles) {
    if (s.level >= tau || s.reached_clusters.empty()) continue;
    int r = uf.find(s.reached_clusters[0]);
    critical_point cp;
    cp.location = s.location;
    cp.critical_value = s.level;
    cp.kind = critical_kind::proper;
    comps[r].proper_criticals_inside.push_back(cp);
  }

  std::vector<component> out;
  int id = 0;
  for (auto& [rep, c] : comps) {
    c.id = id++;
    c.eligible = c.proper_criticals_inside.empty();
    if (c.eligible) {
      if (c.zero_indices.size() != 1)
        throw numeric_error("components_at_level: eligible component with several distinct zeros");
      c.anchor_zero = tree.zeros.roots[c.zero_indices[0]].location;
    } else {
      // informational anchor: member zero of highest multiplicity
      int best = c.zero_indices[0];
      for (int zi : c.zero_indices)
        if (tree.zeros.roots[zi].multiplicity > tree.zeros.roots[best].multiplicity) best = zi;
      c.anchor_zero = tree.zeros.roots[best].location;
    }
    out.push_back(std::move(c));
  }
  return out;
}

// Assigns a query point to its component at level tau, or nullopt when
// |P(z)| > tau (outside the lemniscate).
inline std::optional<component> locate_point(const merge_tree& tree, const polynomial& p, cplx z,
                                             double tau, double boundary_tol = 1e-9,
                                             const flow_options& fopt = {}) {
  double v = std::abs(p(z));
  if (std::abs(v - tau) <= boundary_tol * tau)
    throw std::invalid_argument("locate_point: point lies on the level boundary");
  if (v > tau) return std::nullopt;

  cplx end = descent_flow(p, z, fopt);
  std::vector<cplx> locs;
  for (const auto& r : tree.zeros.roots) locs.push_back(r.location);
  int idx = detail::nearest_distinct_zero(locs, end);
  for (auto& c : components_at_level(tree, p, tau))
    if (std::find(c.zero_indices.begin(), c.zero_indices.end(), idx) != c.zero_indices.end())
      return c;
  return std::nullopt;  // unreachable
}

// Largest level below which the component of the given distinct zero
// stays free of proper critical points (+inf when it always is).
inline double max_eligible_level(const merge_tree& tree, int zero_index) {
  const int nloc = static_cast<int>(tree.zeros.roots.size());
  detail::union_find uf(nloc);
  for (const auto& s : tree.saddles) {
    for (std::size_t i = 1; i < s.reached_clusters.size(); ++i)
      uf.unite(s.reached_clusters[0], s.reached_clusters[i]);
    if (!s.reached_clusters.empty() &&
        uf.find(s.reached_clusters[0]) == uf.find(zero_index))
      return s.level;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace lemnikit
