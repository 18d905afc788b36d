// lemnikit command-line front end: analyze | trace | inverse | capacity | report
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lemnikit/report.hpp"

namespace fs = std::filesystem;
using namespace lemnikit;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_violation = 1;
constexpr int exit_parse = 2;
constexpr int exit_numeric = 3;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return json::parse(in);
}

void write_output(const analysis_config& cfg, const std::string& name,
                  const std::string& content) {
  if (cfg.out_dir.empty()) {
    std::cout << content << "\n";
    return;
  }
  fs::create_directories(cfg.out_dir);
  std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
  out << content;
}

struct common_flags {
  std::string config_file;
  analysis_config cfg;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key=value config file");
    app->add_option("--seed", cfg.seed, "random seed for interior sampling");
    app->add_option("--out", cfg.out_dir, "output directory (stdout if omitted)");
    app->add_flag("--verbose", cfg.verbose, "include full sample lists in reports");
  }
  // config file first, then flags override
  void finalize(CLI::App* app, const std::string& tau_flag = "") {
    analysis_config from_file;
    if (!config_file.empty()) from_file.load_file(config_file);
    analysis_config merged = from_file;
    auto set_if = [&](const char* name, auto apply) {
      auto* opt = app->get_option_no_throw(name);
      if (opt && opt->count() > 0) apply();
    };
    set_if("--seed", [&] { merged.seed = cfg.seed; });
    set_if("--out", [&] { merged.out_dir = cfg.out_dir; });
    set_if("--verbose", [&] { merged.verbose = cfg.verbose; });
    set_if("--grid", [&] { merged.grids = cfg.grids; });
    if (!tau_flag.empty()) merged.tau = cfg.tau;
    cfg = merged;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial lemniscate component analysis"};
  app.require_subcommand(1);

  std::string poly_file, spec_file;
  std::vector<double> levels;
  double direction_angle = 0.0;
  int zero_index = 0;
  int radius_steps = 16;

  auto* analyze = app.add_subcommand("analyze", "component decomposition and bound report");
  common_flags af;
  analyze->add_option("poly", poly_file, "polynomial JSON file")->required();
  analyze->add_option("--tau", af.cfg.tau, "lemniscate level");
  af.attach(analyze);

  auto* trace = app.add_subcommand("trace", "trace level curves and emit SVG");
  common_flags tf;
  trace->add_option("poly", poly_file, "polynomial JSON file")->required();
  trace->add_option("--levels", levels, "levels to trace")->required();
  tf.attach(trace);

  auto* inverse = app.add_subcommand("inverse", "continue the inverse branch from a zero");
  common_flags invf;
  inverse->add_option("poly", poly_file, "polynomial JSON file")->required();
  inverse->add_option("--zero", zero_index, "index of the (simple) zero to start from");
  inverse->add_option("--angle", direction_angle, "ray direction in radians");
  inverse->add_option("--steps", radius_steps, "number of recorded radii");
  invf.attach(inverse);

  auto* cap = app.add_subcommand("capacity", "condenser capacity of a spec file");
  common_flags cf;
  cap->add_option("spec", spec_file, "condenser spec JSON file")->required();
  cap->add_option("--grid", cf.cfg.grids, "refinement grid sizes");
  cf.attach(cap);

  auto* rep = app.add_subcommand("report", "analyze plus capacity study");
  common_flags rf;
  rep->add_option("poly", poly_file, "polynomial JSON file")->required();
  rep->add_option("--tau", rf.cfg.tau, "lemniscate level");
  rep->add_option("--grid", rf.cfg.grids, "refinement grid sizes");
  rf.attach(rep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze)) {
      af.finalize(analyze, analyze->count("--tau") ? "tau" : "");
      polynomial p = polynomial::from_json(load_json(poly_file));
      auto res = run_analyze(p, af.cfg);
      write_output(af.cfg, "report.json", res.document.dump(2));
      return res.exit_code;
    }
    if (app.got_subcommand(trace)) {
      tf.finalize(trace);
      polynomial p = polynomial::from_json(load_json(poly_file));
      std::string svg;
      json doc = run_trace(p, levels, tf.cfg, &svg);
      write_output(tf.cfg, "trace.json", doc.dump(2));
      if (!tf.cfg.out_dir.empty()) write_output(tf.cfg, "trace.svg", svg);
      return exit_ok;
    }
    if (app.got_subcommand(inverse)) {
      invf.finalize(inverse);
      polynomial p = polynomial::from_json(load_json(poly_file));
      root_set roots = find_roots(p, invf.cfg.ropt());
      if (zero_index < 0 || zero_index >= int(roots.roots.size()))
        throw std::invalid_argument("inverse: zero index out of range");
      cplx a = roots.roots[zero_index].location;
      cplx dir(std::cos(direction_angle), std::sin(direction_angle));
      auto path = continue_inverse_branch(p, a, dir, radius_steps);
      auto ib = verify_inverse_bound(path, p.degree());
      json doc{{"schema", schema_id},
               {"tool_version", tool_version},
               {"polynomial", p.to_json()},
               {"path", path.to_json()},
               {"min_ratio", ib.min_ratio},
               {"holds", ib.holds}};
      write_output(invf.cfg, "inverse.json", doc.dump(2));
      return exit_ok;
    }
    if (app.got_subcommand(cap)) {
      cf.finalize(cap);
      json doc = run_capacity(load_json(spec_file), cf.cfg);
      write_output(cf.cfg, "capacity.json", doc.dump(2));
      return exit_ok;
    }
    if (app.got_subcommand(rep)) {
      rf.finalize(rep, rep->count("--tau") ? "tau" : "");
      polynomial p = polynomial::from_json(load_json(poly_file));
      auto res = run_analyze(p, rf.cfg);

      // small capacity study on the first eligible component: numeric
      // cap C(r) against both asymptotic expansions
      merge_tree tree = build_merge_tree(p, rf.cfg.ropt());
      json study = nullptr;
      for (const auto& comp : components_at_level(tree, p, rf.cfg.tau, rf.cfg.critical_gap)) {
        if (!comp.eligible) continue;
        auto z0 = detail::real_positive_boundary_point(p, comp.anchor_zero, 0.5 * rf.cfg.tau);
        if (!z0) continue;
        double r = 1e-2 * std::abs(comp.anchor_zero - *z0);
        condenser_spec spec = make_slit_plane_condenser(comp.anchor_zero, *z0, r);
        capacity_estimate est = capacity(spec, rf.cfg.grids);
        polynomial dp = p.derivative();
        double ratio = std::abs(dp(*z0)) / p(*z0).real();
        study = {{"a", detail::cplx_json(comp.anchor_zero)},
                 {"z0", detail::cplx_json(*z0)},
                 {"r", r},
                 {"numeric", est.to_json()},
                 {"asymptotic_slit", asymptotic_cap_c(r, comp.anchor_zero, *z0)},
                 {"asymptotic_strip", asymptotic_cap_strip(r, p.degree(), ratio)}};
        break;
      }
      res.document["capacity_study"] = study;
      write_output(rf.cfg, "report.json", res.document.dump(2));
      return res.exit_code;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return exit_parse;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numeric;
  }
  return exit_ok;
}
