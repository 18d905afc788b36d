#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lemnikit/errors.hpp"

namespace lemnikit {

using cplx = std::complex<double>;
using json = nlohmann::ordered_json;

inline constexpr int max_degree = 64;

// Immutable complex polynomial, coefficients ascending by power.
// Constants are rejected unless allow_constant is set (needed so the
// derivative of a linear polynomial is still representable).
class polynomial {
 public:
  explicit polynomial(std::vector<cplx> coeffs, bool allow_constant = false)
      : c_(std::move(coeffs)) {
    while (c_.size() > 1 && c_.back() == cplx{}) c_.pop_back();
    if (c_.empty()) throw std::invalid_argument("polynomial: empty coefficient list");
    if (c_.size() == 1 && !allow_constant)
      throw std::invalid_argument("polynomial: constants are rejected (degree must be >= 1)");
    if (static_cast<int>(c_.size()) - 1 > max_degree)
      throw std::invalid_argument("polynomial: degree exceeds guard of 64");
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return c_; }

  // Horner evaluation.
  cplx operator()(cplx z) const {
    cplx acc = c_.back();
    for (auto it = c_.rbegin() + 1; it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  polynomial derivative() const {
    std::vector<cplx> d(std::max<std::size_t>(c_.size() - 1, 1), cplx{});
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = double(k) * c_[k];
    return polynomial(std::move(d), /*allow_constant=*/true);
  }

  double max_coeff_magnitude() const {
    double m = 0.0;
    for (auto c : c_) m = std::max(m, std::abs(c));
    return m;
  }

  // Magnitude bound on the evaluation at z; the natural scale for
  // relative residual tests like |P(z)| <= tol * scale_at(z).
  double scale_at(cplx z) const {
    double az = std::max(1.0, std::abs(z));
    double s = 0.0, pw = 1.0;
    for (auto c : c_) {
      s += std::abs(c) * pw;
      pw *= az;
    }
    return s;
  }

  polynomial scaled(cplx factor) const {
    std::vector<cplx> s(c_);
    for (auto& c : s) c *= factor;
    return polynomial(std::move(s), c_.size() == 1);
  }

  static polynomial from_roots(std::span<const cplx> roots, cplx leading = 1.0) {
    std::vector<cplx> c{leading};
    for (cplx r : roots) {
      c.push_back(cplx{});
      for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
      c[0] *= -r;
    }
    return polynomial(std::move(c));
  }

  // {"coeffs": [[re, im], ...]} ascending powers.
  static polynomial from_json(const json& j) {
    if (!j.is_object() || !j.contains("coeffs") || !j["coeffs"].is_array())
      throw std::invalid_argument("polynomial: expected {\"coeffs\": [[re, im], ...]}");
    std::vector<cplx> c;
    for (const auto& e : j["coeffs"]) {
      if (!e.is_array() || e.size() != 2)
        throw std::invalid_argument("polynomial: each coefficient must be [re, im]");
      c.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    if (c.empty()) throw std::invalid_argument("polynomial: empty coefficient list");
    bool all_zero = std::all_of(c.begin(), c.end(), [](cplx v) { return v == cplx{}; });
    if (all_zero) throw std::invalid_argument("polynomial: all coefficients are zero");
    return polynomial(std::move(c));
  }

  json to_json() const {
    json arr = json::array();
    for (auto c : c_) arr.push_back({c.real(), c.imag()});
    return json{{"coeffs", arr}};
  }

 private:
  std::vector<cplx> c_;
};

// |(z - a) P'(z) / P(z)|, the pointwise quantity whose bound on
// critical-point-free lemniscate components is the degree of P.
inline double bound_value(const polynomial& p, const polynomial& dp, cplx a, cplx z,
                          double eval_tol = 1e-12) {
  cplx pz = p(z);
  if (std::abs(pz) <= eval_tol * p.scale_at(z))
    throw division_near_zero("bound_value: |P(z)| is numerically zero");
  return std::abs((z - a) * dp(z) / pz);
}

inline double bound_value(const polynomial& p, cplx a, cplx z, double eval_tol = 1e-12) {
  return bound_value(p, p.derivative(), a, z, eval_tol);
}

// Polar derivative with pole a: n P(z) - (z - a) P'(z).
inline cplx polar_derivative(const polynomial& p, const polynomial& dp, cplx a, cplx z) {
  return double(p.degree()) * p(z) - (z - a) * dp(z);
}

inline cplx polar_derivative(const polynomial& p, cplx a, cplx z) {
  return polar_derivative(p, p.derivative(), a, z);
}

}  // namespace lemnikit
