#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "contour.hpp"

namespace bergman {

/// Minimal SVG writer in world coordinates (y axis flipped on output).
class svg_document {
public:
  svg_document(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {}

  void add_polyline(const polyline& pl, double level, const std::string& color = "#1f4e9c") {
    if (pl.points.empty()) return;
    std::ostringstream os;
    os.precision(8);
    os << "<path data-level=\"" << level << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << stroke() << "\" d=\"";
    for (std::size_t i = 0; i < pl.points.size(); ++i)
      os << (i ? " L" : "M") << pl.points[i].real() << "," << -pl.points[i].imag();
    if (pl.closed) os << " Z";
    os << "\"/>\n";
    body_ += os.str();
  }

  void add_level_curves(const level_curve_set& set, const std::string& color = "#1f4e9c") {
    for (const auto& lc : set)
      for (const auto& pl : lc.lines) add_polyline(pl, lc.level, color);
  }

  void add_point(std::complex<double> z, const std::string& color = "#c0392b") {
    std::ostringstream os;
    os.precision(8);
    os << "<circle cx=\"" << z.real() << "\" cy=\"" << -z.imag() << "\" r=\"" << 2 * stroke() << "\" fill=\""
       << color << "\"/>\n";
    body_ += os.str();
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0_ << " " << -y1_ << " " << (x1_ - x0_) << " "
       << (y1_ - y0_) << "\" width=\"800\" height=\"" << int(800 * (y1_ - y0_) / std::max(x1_ - x0_, 1e-300))
       << "\">\n"
       << body_ << "</svg>\n";
    return os.str();
  }

private:
  double stroke() const { return std::max(x1_ - x0_, y1_ - y0_) / 500; }

  double x0_, x1_, y0_, y1_;
  std::string body_;
};

}  // namespace bergman
