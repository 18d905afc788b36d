#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "lemnikit/geometry.hpp"

namespace lemnikit {

// Minimal deterministic SVG 1.1 writer.  Coordinates are mapped from a
// mathematical frame (y up) into the image frame (y down).
class svg_document {
 public:
  svg_document(bbox frame, int width_px = 800) : frame_(frame) {
    double aspect = frame_.height() / frame_.width();
    w_ = width_px;
    h_ = int(width_px * aspect + 0.5);
    if (h_ < 1) h_ = 1;
  }

  void polyline(std::span<const cplx> pts, const std::string& stroke, bool close = false) {
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      auto [x, y] = map(pts[i]);
      d += (i == 0 ? "M" : "L");
      d += fmt(x) + " " + fmt(y);
    }
    if (close) d += "Z";
    body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + stroke +
             "\" stroke-width=\"1\"/>\n";
  }

  void dot(cplx z, const std::string& fill, double r_px = 3.0) {
    auto [x, y] = map(z);
    body_ += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"" + fmt(r_px) +
             "\" fill=\"" + fill + "\"/>\n";
  }

  void cross(cplx z, const std::string& stroke, double r_px = 4.0) {
    auto [x, y] = map(z);
    body_ += "<path d=\"M" + fmt(x - r_px) + " " + fmt(y - r_px) + "L" + fmt(x + r_px) + " " +
             fmt(y + r_px) + "M" + fmt(x - r_px) + " " + fmt(y + r_px) + "L" + fmt(x + r_px) +
             " " + fmt(y - r_px) + "\" stroke=\"" + stroke + "\" stroke-width=\"1.5\"/>\n";
  }

  std::string str() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
           std::to_string(w_) + "\" height=\"" + std::to_string(h_) + "\" viewBox=\"0 0 " +
           std::to_string(w_) + " " + std::to_string(h_) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += body_;
    out += "</svg>\n";
    return out;
  }

 private:
  std::pair<double, double> map(cplx z) const {
    double x = (z.real() - frame_.x0) / frame_.width() * w_;
    double y = (frame_.y1 - z.imag()) / frame_.height() * h_;  // flip y
    return {x, y};
  }

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }

  bbox frame_;
  int w_ = 0, h_ = 0;
  std::string body_;
};

}  // namespace lemnikit
