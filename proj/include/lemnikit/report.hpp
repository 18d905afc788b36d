#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lemnikit/bound_check.hpp"
#include "lemnikit/capacity.hpp"
#include "lemnikit/level_curve.hpp"
#include "lemnikit/merge_tree.hpp"
#include "lemnikit/polynomial.hpp"
#include "lemnikit/svg.hpp"

namespace lemnikit {

inline constexpr const char* schema_id = "lemnikit/1";
inline constexpr const char* tool_version = "0.1.0";

struct analysis_config {
  double tau = 1.0;
  std::uint64_t seed = 1;
  bool verbose = false;
  std::vector<int> grids = {129, 257, 513};
  int sublevels = 5;
  int boundary_samples = 256;
  int interior_samples = 1000;
  int ray_seeds = 16;
  double trace_tol = 1e-9;
  double verify_tol = 1e-9;
  double residual_tol = 1e-8;
  double critical_gap = 1e-4;
  std::string out_dir;

  sampling_plan plan() const {
    sampling_plan pl;
    pl.sublevels = sublevels;
    pl.boundary_samples_per_level = boundary_samples;
    pl.interior_samples = interior_samples;
    pl.ray_seeds = ray_seeds;
    pl.seed = seed;
    pl.verify_tol = verify_tol;
    return pl;
  }
  trace_options topt() const {
    trace_options t;
    t.trace_tol = trace_tol;
    t.critical_gap = critical_gap;
    return t;
  }
  root_options ropt() const {
    root_options r;
    r.residual_tol = residual_tol;
    return r;
  }

  void apply(const std::string& key, const std::string& value) {
    if (key == "tau") tau = std::stod(value);
    else if (key == "seed") seed = std::stoull(value);
    else if (key == "verbose") verbose = (value == "1" || value == "true");
    else if (key == "grid") {
      grids.clear();
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) grids.push_back(std::stoi(tok));
    }
    else if (key == "sublevels") sublevels = std::stoi(value);
    else if (key == "boundary_samples") boundary_samples = std::stoi(value);
    else if (key == "interior_samples") interior_samples = std::stoi(value);
    else if (key == "ray_seeds") ray_seeds = std::stoi(value);
    else if (key == "trace_tol") trace_tol = std::stod(value);
    else if (key == "verify_tol") verify_tol = std::stod(value);
    else if (key == "residual_tol") residual_tol = std::stod(value);
    else if (key == "critical_gap") critical_gap = std::stod(value);
    else if (key == "out") out_dir = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        auto e = s.find_last_not_of(" \t");
        s.erase(e == std::string::npos ? 0 : e + 1);
        return s;
      };
      apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }

  json echo() const {
    return json{{"tau", tau},
                {"seed", seed},
                {"verbose", verbose},
                {"grids", grids},
                {"sublevels", sublevels},
                {"boundary_samples", boundary_samples},
                {"interior_samples", interior_samples},
                {"ray_seeds", ray_seeds},
                {"trace_tol", trace_tol},
                {"verify_tol", verify_tol},
                {"residual_tol", residual_tol},
                {"critical_gap", critical_gap}};
  }
};

namespace detail {

inline json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

// Point z on the component's level-t curve with P(z) = t real positive,
// found by complex Newton on P(z) = t from a boundary seed.
inline std::optional<cplx> real_positive_boundary_point(const polynomial& p, cplx anchor,
                                                        double t) {
  const polynomial dp = p.derivative();
  cplx z;
  try {
    z = seed_on_level(p, anchor, t);
  } catch (const numeric_error&) {
    return std::nullopt;
  }
  for (int it = 0; it < 60; ++it) {
    cplx r = p(z) - t;
    if (std::abs(r) <= 1e-14 * t) return z;
    cplx d = dp(z);
    if (d == cplx{}) return std::nullopt;
    z -= r / d;
  }
  return std::nullopt;
}

}  // namespace detail

struct analysis_result {
  json document;
  int exit_code = 0;  // 0 ok, 1 violation, 3 numerical failure
};

// Full pipeline: roots -> critical points -> merge tree -> components
// at tau -> bound report per component, plus corollary and
// inverse-branch checks on eligible components.
inline analysis_result run_analyze(const polynomial& p, const analysis_config& cfg) {
  analysis_result res;
  json& doc = res.document;
  doc["schema"] = schema_id;
  doc["tool_version"] = tool_version;
  doc["config"] = cfg.echo();
  doc["polynomial"] = p.to_json();
  doc["degree"] = p.degree();

  merge_tree tree = build_merge_tree(p, cfg.ropt());
  json roots = json::array();
  for (const auto& r : tree.zeros.roots)
    roots.push_back({{"location", detail::cplx_json(r.location)},
                     {"multiplicity", r.multiplicity}});
  doc["roots"] = roots;
  json crits = json::array();
  for (const auto& c : tree.criticals)
    crits.push_back({{"location", detail::cplx_json(c.location)},
                     {"critical_value", c.critical_value},
                     {"multiplicity", c.multiplicity},
                     {"kind", c.kind == critical_kind::proper ? "Proper" : "ZeroCoincident"}});
  doc["critical_points"] = crits;
  doc["merge_tree"] = tree.to_json();

  auto comps = components_at_level(tree, p, cfg.tau, cfg.critical_gap);
  json jcomps = json::array();
  bool any_violated = false;
  for (const auto& comp : comps) {
    json jc;
    jc["id"] = comp.id;
    jc["level"] = comp.level;
    json zm = json::array();
    for (int zi : comp.zero_indices)
      zm.push_back({{"location", detail::cplx_json(tree.zeros.roots[zi].location)},
                    {"multiplicity", tree.zeros.roots[zi].multiplicity}});
    jc["zero_members"] = zm;
    json pci = json::array();
    for (const auto& cp : comp.proper_criticals_inside)
      pci.push_back({{"location", detail::cplx_json(cp.location)},
                     {"critical_value", cp.critical_value}});
    jc["proper_criticals_inside"] = pci;
    jc["eligible"] = comp.eligible;
    jc["anchor_zero"] = detail::cplx_json(comp.anchor_zero);

    bound_report rep = verify_theorem(p, tree, comp, cfg.plan(), cfg.topt());
    if (rep.v == verdict::violated) any_violated = true;
    jc["bound_report"] = rep.to_json(cfg.verbose);

    // corollary spot check at a real-positive boundary point
    auto z0 = detail::real_positive_boundary_point(p, comp.anchor_zero, 0.5 * cfg.tau);
    if (z0) {
      auto cor = verify_corollary(p, comp, *z0);
      jc["corollary"] = {{"z", detail::cplx_json(*z0)},
                         {"applicable", cor.applicable},
                         {"re_polar", cor.re_polar}};
    }

    // inverse branch from a simple eligible anchor
    if (comp.eligible && comp.zero_indices.size() == 1 &&
        tree.zeros.roots[comp.zero_indices[0]].multiplicity == 1) {
      try {
        continuation_options copt;
        copt.max_radius = 0.995 * cfg.tau;
        auto path = continue_inverse_branch(p, comp.anchor_zero, 1.0, 16, copt);
        auto ib = verify_inverse_bound(path, p.degree(), cfg.verify_tol);
        jc["inverse_branch"] = {{"min_ratio", ib.min_ratio},
                                {"holds", ib.holds},
                                {"path", cfg.verbose ? path.to_json() : json(nullptr)}};
      } catch (const numeric_error& e) {
        jc["inverse_branch"] = {{"error", e.what()}};
      }
    }
    jcomps.push_back(std::move(jc));
  }
  doc["components"] = jcomps;
  doc["capacity_study"] = nullptr;
  doc["verdict_summary"] = {{"any_violated", any_violated}, {"component_count", comps.size()}};
  res.exit_code = any_violated ? 1 : 0;
  return res;
}

// Traces all component curves at each requested level and renders one
// SVG (zeros as dots, proper critical points as crosses).
inline json run_trace(const polynomial& p, std::span<const double> levels,
                      const analysis_config& cfg, std::string* svg_out) {
  merge_tree tree = build_merge_tree(p, cfg.ropt());
  for (double t : levels)
    for (const auto& s : tree.saddles)
      if (std::abs(t - s.level) <= cfg.critical_gap * std::max(t, s.level))
        throw critical_level_too_close("trace: level coincides with a critical value");

  std::vector<level_curve> curves;
  for (double t : levels) {
    std::vector<level_curve> at_level;
    for (const auto& r : tree.zeros.roots) {
      bool covered = false;
      for (const auto& c : at_level)
        if (point_in_polygon(c.points, r.location)) covered = true;
      if (covered) continue;
      cplx seed = seed_on_level(p, r.location, t, cfg.topt());
      level_curve c = trace_level_curve(p, seed, t, cfg.topt());
      argument_increment(p, c);
      at_level.push_back(std::move(c));
    }
    for (auto& c : at_level) curves.push_back(std::move(c));
  }

  bbox frame;
  for (const auto& r : tree.zeros.roots) frame.expand(r.location);
  for (const auto& c : curves)
    for (auto z : c.points) frame.expand(z);
  frame.pad(0.5 * std::max(frame.width(), frame.height()) * 0.5 + 0.1);

  if (svg_out) {
    svg_document svg(frame);
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b"};
    int ci = 0;
    for (const auto& c : curves) {
      svg.polyline(c.points, palette[ci % 5], c.closed);
      ++ci;
    }
    for (const auto& r : tree.zeros.roots) svg.dot(r.location, "black");
    for (const auto& cp : tree.criticals)
      if (cp.kind == critical_kind::proper) svg.cross(cp.location, "#d62728");
    *svg_out = svg.str();
  }

  json jcurves = json::array();
  for (const auto& c : curves) jcurves.push_back(c.to_json());
  return json{{"schema", schema_id},
              {"tool_version", tool_version},
              {"polynomial", p.to_json()},
              {"curves", jcurves}};
}

// Capacity of a condenser spec over the configured refinement ladder,
// with an optional asymptotic comparison block.
inline json run_capacity(const json& spec_json, const analysis_config& cfg) {
  condenser_spec spec = condenser_spec::from_json(spec_json);
  capacity_estimate est = capacity(spec, cfg.grids);
  json out{{"schema", schema_id},
           {"tool_version", tool_version},
           {"estimate", est.to_json()}};
  if (spec_json.contains("compare_asymptotic")) {
    const auto& c = spec_json["compare_asymptotic"];
    cplx a(c.at("a")[0].get<double>(), c.at("a")[1].get<double>());
    cplx z0(c.at("z0")[0].get<double>(), c.at("z0")[1].get<double>());
    double r = c.at("r").get<double>();
    double asym = asymptotic_cap_c(r, a, z0);
    out["asymptotic"] = {{"value", asym},
                         {"deviation", est.value - asym},
                         {"second_term", -2.0 * M_PI * std::log(4.0 * std::abs(a - z0)) /
                                             (std::log(r) * std::log(r))}};
  }
  return out;
}

}  // namespace lemnikit
