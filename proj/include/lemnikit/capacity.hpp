#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lemnikit/polynomial.hpp"

namespace lemnikit {

// Plate geometry primitives.  Segments rasterize with one-cell
// thickness; exterior_disk is {|z - a| >= r}; left_halfplane is
// {Re z <= r} (used by condensers transformed to a log plane);
// strip_complement is {|Im z| >= r}.
struct region {
  enum class kind { disk, exterior_disk, segment, left_halfplane, strip_complement };
  kind k = kind::disk;
  cplx a{};
  cplx b{};
  double r = 0.0;

  json to_json() const {
    switch (k) {
      case kind::disk:
        return {{"type", "disk"}, {"center", {a.real(), a.imag()}}, {"radius", r}};
      case kind::exterior_disk:
        return {{"type", "exterior_disk"}, {"center", {a.real(), a.imag()}}, {"radius", r}};
      case kind::segment:
        return {{"type", "segment"}, {"from", {a.real(), a.imag()}}, {"to", {b.real(), b.imag()}}};
      case kind::left_halfplane:
        return {{"type", "left_halfplane"}, {"x", r}};
      default:
        return {{"type", "strip_complement"}, {"half_width", r}};
    }
  }

  static region from_json(const json& j) {
    region g;
    std::string t = j.at("type").get<std::string>();
    auto get_pt = [&](const char* key) {
      const auto& v = j.at(key);
      return cplx(v[0].get<double>(), v[1].get<double>());
    };
    if (t == "disk") {
      g.k = kind::disk;
      g.a = get_pt("center");
      g.r = j.at("radius").get<double>();
    } else if (t == "exterior_disk") {
      g.k = kind::exterior_disk;
      g.a = j.contains("center") ? get_pt("center") : cplx{};
      g.r = j.at("radius").get<double>();
    } else if (t == "segment") {
      g.k = kind::segment;
      g.a = get_pt("from");
      g.b = get_pt("to");
    } else if (t == "left_halfplane") {
      g.k = kind::left_halfplane;
      g.r = j.at("x").get<double>();
    } else if (t == "strip_complement") {
      g.k = kind::strip_complement;
      g.r = j.at("half_width").get<double>();
    } else {
      throw std::invalid_argument("region: unknown type '" + t + "'");
    }
    return g;
  }
};

struct condenser_spec {
  std::vector<region> plate0;  // potential 0
  std::vector<region> plate1;  // potential 1
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // bounding box

  bool far_field_grounded() const {
    for (const auto& g : plate0)
      if (g.k == region::kind::exterior_disk) return true;
    return false;
  }

  json to_json() const {
    json p0 = json::array(), p1 = json::array();
    for (const auto& g : plate0) p0.push_back(g.to_json());
    for (const auto& g : plate1) p1.push_back(g.to_json());
    return {{"plate0", p0}, {"plate1", p1}, {"box", {x0, x1, y0, y1}}};
  }

  static condenser_spec from_json(const json& j) {
    condenser_spec s;
    for (const auto& g : j.at("plate0")) s.plate0.push_back(region::from_json(g));
    for (const auto& g : j.at("plate1")) s.plate1.push_back(region::from_json(g));
    const auto& b = j.at("box");
    s.x0 = b[0].get<double>();
    s.x1 = b[1].get<double>();
    s.y0 = b[2].get<double>();
    s.y1 = b[3].get<double>();
    return s;
  }
};

struct solver_options {
  // SOR relaxation factor; 0 selects the grid-optimal 2/(1 + sin(pi/N)).
  double omega = 0.0;
  double residual_tol = 1e-10;  // max-norm of the per-sweep update
  long max_sweeps = 200000;
};

// Discrete potential on a uniform grid (square cells).
struct potential_field {
  int nx = 0, ny = 0;
  double h = 0.0;
  double x0 = 0.0, y0 = 0.0;
  std::vector<double> u;        // row-major, ny rows of nx
  std::vector<std::uint8_t> mask;  // 0 free, 1 plate0, 2 plate1

  double& at(int i, int j) { return u[std::size_t(j) * nx + i]; }
  double at(int i, int j) const { return u[std::size_t(j) * nx + i]; }
  std::uint8_t m(int i, int j) const { return mask[std::size_t(j) * nx + i]; }

  // Dirichlet energy, sum over grid edges of the squared difference
  // (cell area and 1/h^2 cancel).
  double energy() const {
    double e = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i + 1 < nx; ++i) {
        double d = at(i + 1, j) - at(i, j);
        e += d * d;
      }
    for (int j = 0; j + 1 < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double d = at(i, j + 1) - at(i, j);
        e += d * d;
      }
    return e;
  }
};

namespace detail {

inline double dist_to_segment(cplx p, cplx a, cplx b) {
  cplx ab = b - a;
  double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

inline bool in_region(const region& g, cplx z, double h) {
  switch (g.k) {
    case region::kind::disk: return std::abs(z - g.a) <= g.r;
    case region::kind::exterior_disk: return std::abs(z - g.a) >= g.r;
    case region::kind::segment: return dist_to_segment(z, g.a, g.b) <= 0.5 * h;
    case region::kind::left_halfplane: return z.real() <= g.r;
    default: return std::abs(z.imag()) >= g.r;
  }
}

inline bool in_plate(const std::vector<region>& plate, cplx z, double h) {
  for (const auto& g : plate)
    if (in_region(g, z, h)) return true;
  return false;
}

}  // namespace detail

// 5-point Laplace solve with Dirichlet plates by red-black SOR.  The
// outer box is grounded (u = 0) when plate0 contains the exterior
// region, reflective otherwise.  `init` (coarser solve) seeds the
// iteration when given.
inline potential_field solve_potential(const condenser_spec& spec, int grid_size,
                                       const solver_options& opt = {},
                                       const potential_field* init = nullptr) {
  if (grid_size < 16) throw std::invalid_argument("solve_potential: grid too small");
  potential_field f;
  double w = spec.x1 - spec.x0, hgt = spec.y1 - spec.y0;
  if (w <= 0 || hgt <= 0) throw std::invalid_argument("solve_potential: empty bounding box");
  f.nx = grid_size;
  f.h = w / (grid_size - 1);
  f.ny = std::max(16, int(std::lround(hgt / f.h)) + 1);
  f.x0 = spec.x0;
  f.y0 = spec.y0;
  f.u.assign(std::size_t(f.nx) * f.ny, 0.0);
  f.mask.assign(std::size_t(f.nx) * f.ny, 0);

  int n0 = 0, n1 = 0;
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      cplx z(f.x0 + i * f.h, f.y0 + j * f.h);
      bool p0 = detail::in_plate(spec.plate0, z, f.h);
      bool p1 = detail::in_plate(spec.plate1, z, f.h);
      if (p0 && p1)
        throw std::invalid_argument("solve_potential: plates overlap on the grid");
      if (p0) {
        f.mask[std::size_t(j) * f.nx + i] = 1;
        ++n0;
      } else if (p1) {
        f.mask[std::size_t(j) * f.nx + i] = 2;
        f.u[std::size_t(j) * f.nx + i] = 1.0;
        ++n1;
      }
    }
  if (n0 == 0 || n1 == 0)
    throw std::invalid_argument("solve_potential: a plate covers no grid cell");

  if (init != nullptr) {
    // bilinear interpolation of the coarser field
    for (int j = 0; j < f.ny; ++j)
      for (int i = 0; i < f.nx; ++i) {
        if (f.m(i, j) != 0) continue;
        double gx = (f.x0 + i * f.h - init->x0) / init->h;
        double gy = (f.y0 + j * f.h - init->y0) / init->h;
        int i0 = std::clamp(int(gx), 0, init->nx - 2);
        int j0 = std::clamp(int(gy), 0, init->ny - 2);
        double fx = std::clamp(gx - i0, 0.0, 1.0), fy = std::clamp(gy - j0, 0.0, 1.0);
        f.at(i, j) = (1 - fx) * (1 - fy) * init->at(i0, j0) + fx * (1 - fy) * init->at(i0 + 1, j0) +
                     (1 - fx) * fy * init->at(i0, j0 + 1) + fx * fy * init->at(i0 + 1, j0 + 1);
      }
  }

  const bool grounded = spec.far_field_grounded();
  const double omega =
      (opt.omega > 0.0) ? opt.omega : 2.0 / (1.0 + std::sin(M_PI / std::max(f.nx, f.ny)));

  auto neighbor = [&](int i, int j) -> double {
    // reflective closure outside the box when not grounded
    if (i < 0) return grounded ? 0.0 : f.at(1, j);
    if (i >= f.nx) return grounded ? 0.0 : f.at(f.nx - 2, j);
    if (j < 0) return grounded ? 0.0 : f.at(i, 1);
    if (j >= f.ny) return grounded ? 0.0 : f.at(i, f.ny - 2);
    return f.at(i, j);
  };

  double max_update = 0.0;
  for (long sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    max_update = 0.0;
    for (int color = 0; color < 2; ++color) {
      for (int j = 0; j < f.ny; ++j) {
        const bool edge_row = (j == 0 || j == f.ny - 1);
        double* row = f.u.data() + std::size_t(j) * f.nx;
        const std::uint8_t* mrow = f.mask.data() + std::size_t(j) * f.nx;
        for (int i = (j + color) & 1; i < f.nx; i += 2) {
          if (mrow[i] != 0) continue;
          double nb;
          if (!edge_row && i > 0 && i < f.nx - 1) {
            nb = row[i - 1] + row[i + 1] + row[i - f.nx] + row[i + f.nx];
          } else {
            nb = neighbor(i - 1, j) + neighbor(i + 1, j) + neighbor(i, j - 1) +
                 neighbor(i, j + 1);
          }
          double unew = (1.0 - omega) * row[i] + omega * 0.25 * nb;
          double d = std::abs(unew - row[i]);
          if (d > max_update) max_update = d;
          row[i] = unew;
        }
      }
    }
    if (max_update <= opt.residual_tol) return f;
  }
  throw solver_not_converged("solve_potential: SOR did not reach residual tolerance");
}

struct capacity_estimate {
  double value = 0.0;   // Richardson-extrapolated over the two finest grids
  int grid_size = 0;
  double energy = 0.0;  // raw discrete Dirichlet energy on the finest grid
  std::vector<std::pair<int, double>> refinement_history;

  json to_json() const {
    json h = json::array();
    for (auto [g, v] : refinement_history) h.push_back({{"grid", g}, {"value", v}});
    return {{"value", value}, {"grid_size", grid_size}, {"energy", energy},
            {"refinement_history", h}};
  }
};

// Capacity as the Dirichlet integral of the equilibrium potential,
// solved over a refinement ladder with cascadic initialization.
inline capacity_estimate capacity(const condenser_spec& spec, std::span<const int> grids,
                                  const solver_options& opt = {}) {
  if (grids.empty()) throw std::invalid_argument("capacity: need at least one grid size");
  capacity_estimate est;
  potential_field prev;
  bool have_prev = false;
  for (int g : grids) {
    potential_field f = solve_potential(spec, g, opt, have_prev ? &prev : nullptr);
    double e = f.energy();
    est.refinement_history.emplace_back(g, e);
    est.grid_size = g;
    est.energy = e;
    prev = std::move(f);
    have_prev = true;
  }
  if (est.refinement_history.size() >= 2) {
    // first-order Richardson in the cell width (rasterized boundaries)
    auto [g1, v1] = est.refinement_history[est.refinement_history.size() - 2];
    auto [g2, v2] = est.refinement_history.back();
    double factor = double(g2) / double(g1);
    est.value = v2 + (v2 - v1) / (factor - 1.0);
  } else {
    est.value = est.energy;
  }
  return est;
}

// Two-term small-r expansion of cap (H, {|z - z0| <= r}) where H is the
// ray from a away from z0; the slit plane has inner radius 4|a - z0|.
inline double asymptotic_cap_c(double r, cplx a, cplx z0) {
  double d = std::abs(a - z0);
  if (!(r > 0.0 && r < d)) throw std::invalid_argument("asymptotic_cap_c: need 0 < r < |a - z0|");
  double L = std::log(r);
  return -2.0 * M_PI / L - 2.0 * M_PI * std::log(4.0 * d) / (L * L);
}

// Strip analogue: the second plate is an almost-disk of radius
// r*|P'(z0)|/P(z0) and the strip {|Im| < pi n} has inner radius 4n at 0
// (realized by F(z) = 2n log((1+z)/(1-z)), F'(0) = 4n).
inline double asymptotic_cap_strip(double r, int n, double ratio) {
  double rr = r * ratio;
  if (!(rr > 0.0 && rr < 1.0))
    throw std::invalid_argument("asymptotic_cap_strip: need 0 < r*ratio < 1");
  double L = std::log(rr);
  return -2.0 * M_PI / L - 2.0 * M_PI * std::log(4.0 * double(n)) / (L * L);
}

// Explicit disk-to-strip map used by the 4n constant.
inline cplx strip_map(cplx z, int n) { return 2.0 * double(n) * std::log((1.0 + z) / (1.0 - z)); }

// Condenser (H, {|z - z0| <= r}) with H the ray from a away from z0,
// expressed in the w = log(z - z0) plane where it becomes a horizontal
// segment against a left half-plane.  Capacity is conformally
// invariant, and the transformed geometry resolves arbitrarily small r
// on a uniform grid.  Neumann closure at Im w = +-pi is exact by the
// symmetry of the transformed plates.
inline condenser_spec make_slit_plane_condenser(cplx a, cplx z0, double r,
                                                double log_outer = 4.0) {
  if (!(r > 0.0 && r < std::abs(a - z0)))
    throw std::invalid_argument("make_slit_plane_condenser: need 0 < r < |a - z0|");
  condenser_spec s;
  double xin = std::log(r), xray = std::log(std::abs(a - z0));
  s.x0 = xin;
  s.x1 = log_outer;
  s.y0 = -M_PI;
  s.y1 = M_PI;
  s.plate1.push_back({region::kind::left_halfplane, {}, {}, xin + 1e-12});
  s.plate0.push_back({region::kind::segment, cplx(xray, 0.0), cplx(log_outer, 0.0), 0.0});
  return s;
}

// Capacities of C(r, rho): the base condenser with plate0 augmented by
// rho-disks at the listed centers and the exterior region |z| >= 1/rho.
inline std::vector<capacity_estimate> puncture_convergence(const condenser_spec& base,
                                                           std::span<const cplx> puncture_centers,
                                                           std::span<const double> rho_sequence,
                                                           std::span<const int> grids,
                                                           const solver_options& opt = {}) {
  std::vector<capacity_estimate> out;
  double h_finest = (base.x1 - base.x0) / (grids.back() - 1);
  for (double rho : rho_sequence) {
    if (rho < 3.0 * h_finest)
      throw std::invalid_argument("puncture_convergence: rho below grid resolution");
    condenser_spec s = base;
    for (cplx c : puncture_centers) s.plate0.push_back({region::kind::disk, c, {}, rho});
    s.plate0.push_back({region::kind::exterior_disk, cplx{}, {}, 1.0 / rho});
    out.push_back(capacity(s, grids, opt));
  }
  return out;
}

}  // namespace lemnikit
