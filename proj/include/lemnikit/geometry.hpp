#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <vector>

#include "lemnikit/polynomial.hpp"

namespace lemnikit {

struct bbox {
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void expand(cplx z) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  }
  void pad(double m) {
    x0 -= m;
    x1 += m;
    y0 -= m;
    y1 += m;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

inline bbox bounding_box(std::span<const cplx> pts) {
  bbox b;
  for (auto z : pts) b.expand(z);
  return b;
}

// Even-odd crossing test for a closed polygon.
inline bool point_in_polygon(std::span<const cplx> poly, cplx z) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    double yi = poly[i].imag(), yj = poly[j].imag();
    double xi = poly[i].real(), xj = poly[j].real();
    if ((yi > z.imag()) != (yj > z.imag())) {
      double xcross = xi + (z.imag() - yi) / (yj - yi) * (xj - xi);
      if (z.real() < xcross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace lemnikit
