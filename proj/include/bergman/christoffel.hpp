#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "basis.hpp"
#include "contour.hpp"
#include "geometry.hpp"

namespace bergman {

/// Level constant of the default boundary detector Lambda_n = kappa / n.
/// On the unit circle Lambda_n = sqrt(2 pi / ((n+1)(n+2))) exactly, and
/// kappa is that value times n at n = 100, so the unit disk is recovered
/// without radial bias at that degree.
inline const double reconstruction_kappa = 100 * std::sqrt(2 * std::acos(-1.0) / (101.0 * 102.0));

/// Lambda_n(z) = 1 / sqrt(sum_{k<=n} |P_k(z)|^2). The recurrence is rescaled
/// whenever a value exceeds 1e150, so exterior points do not overflow.
template <class Real>
Real lambda_n(const bergman_basis<Real>& basis, const std::complex<Real>& z, int n) {
  using C = std::complex<Real>;
  using std::abs;
  using std::exp;
  using std::log;
  using std::sqrt;
  if (n < 0 || n > basis.degree) throw precondition_error("lambda_n: degree out of range");
  const Real big = Real(1e150), shrink = Real(1e-150);
  std::vector<C> p(n + 1);
  p[0] = C(basis.lambda[0]);
  Real sum = abs2(p[0]);
  Real log_scale = 0;  // true P_k = p_k * exp(log_scale)
  for (int k = 0; k < n; ++k) {
    C s = z * p[k];
    for (int j = 0; j <= k; ++j) s -= basis.hess(j, k) * p[j];
    p[k + 1] = s / basis.hess(k + 1, k).real();
    if (abs(p[k + 1].real()) > big || abs(p[k + 1].imag()) > big) {
      for (int j = 0; j <= k + 1; ++j) p[j] *= shrink;
      sum *= shrink * shrink;
      log_scale -= log(shrink);
    }
    sum += abs2(p[k + 1]);
  }
  return exp(-log_scale) / sqrt(sum);
}

struct christoffel_field {
  grid_spec grid;
  int n = 0;
  int basis_degree = 0;
  int precision_bits = 0;
  std::vector<double> values;  // row-major, values[j * nx + i]

  double at(int i, int j) const { return values[std::size_t(j) * grid.nx + i]; }
};

/// Lambda_n on every grid node, evaluated in double precision.
template <class Real>
christoffel_field evaluate_field(const bergman_basis<Real>& basis, const grid_spec& grid, int n) {
  if (grid.nx < 1 || grid.ny < 1) throw precondition_error("field grid must be nonempty");
  if (n < 0 || n > basis.degree) throw precondition_error("field degree out of range");
  const auto b = basis.template convert<double>();
  christoffel_field f;
  f.grid = grid;
  f.n = n;
  f.basis_degree = basis.degree;
  f.precision_bits = basis.precision_bits;
  f.values.resize(std::size_t(grid.nx) * grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) f.values[std::size_t(j) * grid.nx + i] = lambda_n(b, grid.node(i, j), n);
  return f;
}

/// Marching-squares level sets of the field. Levels outside the field range
/// yield empty lists.
template <class Real>
level_curve_set extract_level_curves(const christoffel_field& field, const std::vector<double>& levels,
                                     const bergman_basis<Real>& basis) {
  const auto b = basis.template convert<double>();
  level_curve_set out;
  for (double c : levels) {
    if (!(c > 0)) throw precondition_error("level values must be positive");
    out.push_back({c, marching_squares(field.grid, field.values, c,
                                       [&](cplx z) { return lambda_n(b, z, field.n); })});
  }
  return out;
}

/// Same, with saddle cells resolved by bilinear interpolation when no basis is at hand.
inline level_curve_set extract_level_curves(const christoffel_field& field, const std::vector<double>& levels) {
  level_curve_set out;
  const auto& g = field.grid;
  auto center = [&](cplx z) {
    const int i = std::clamp(int((z.real() - g.x0) / g.dx()), 0, g.nx - 2);
    const int j = std::clamp(int((z.imag() - g.y0) / g.dy()), 0, g.ny - 2);
    return 0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i, j + 1) + field.at(i + 1, j + 1));
  };
  for (double c : levels) {
    if (!(c > 0)) throw precondition_error("level values must be positive");
    out.push_back({c, marching_squares(field.grid, field.values, c, center)});
  }
  return out;
}

/// Geometric sequence of `count` levels between the smallest and largest field values.
inline std::vector<double> default_levels(const christoffel_field& field, int count = 12) {
  double lo = INFINITY, hi = 0;
  for (double v : field.values)
    if (v > 0 && std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::vector<double> out;
  if (!(hi > lo)) return out;
  for (int i = 1; i <= count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count + 1)));
  return out;
}

enum class reconstruction_method { level, ridge };

inline std::string method_name(reconstruction_method m) {
  return m == reconstruction_method::level ? "kappa_over_n" : "ridge";
}

struct reconstruction {
  reconstruction_method method = reconstruction_method::level;
  double level = 0;
  level_curve_set curves;
};

namespace detail {

// |grad log Lambda| at a point, bilinear in the central-difference field.
inline double log_gradient_at(const christoffel_field& f, const std::vector<double>& grad, cplx z) {
  const auto& g = f.grid;
  const double u = (z.real() - g.x0) / g.dx(), v = (z.imag() - g.y0) / g.dy();
  const int i = std::clamp(int(u), 0, g.nx - 2), j = std::clamp(int(v), 0, g.ny - 2);
  const double a = std::clamp(u - i, 0.0, 1.0), b = std::clamp(v - j, 0.0, 1.0);
  auto G = [&](int x, int y) { return grad[std::size_t(y) * g.nx + x]; };
  return (1 - a) * (1 - b) * G(i, j) + a * (1 - b) * G(i + 1, j) + (1 - a) * b * G(i, j + 1) + a * b * G(i + 1, j + 1);
}

}  // namespace detail

/// Boundary reconstruction from a Christoffel field. The level detector
/// returns the level set Lambda_n = kappa / n. The ridge detector scans
/// levels c / n for c in [0.25 kappa, 4 kappa] and keeps the one whose curves
/// carry the largest mean |grad log Lambda_n|.
template <class Real>
reconstruction reconstruct_boundary(const christoffel_field& field, const bergman_basis<Real>& basis,
                                    reconstruction_method method = reconstruction_method::level) {
  if (field.n < 1) throw precondition_error("reconstruction needs n >= 1");
  const auto& g = field.grid;
  if (g.nx < 2 || g.ny < 2) throw precondition_error("reconstruction needs a grid of at least 2x2");
  reconstruction out;
  out.method = method;
  double level = reconstruction_kappa / field.n;

  if (method == reconstruction_method::ridge) {
    std::vector<double> grad(field.values.size());
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const int i0 = std::max(i - 1, 0), i1 = std::min(i + 1, g.nx - 1);
        const int j0 = std::max(j - 1, 0), j1 = std::min(j + 1, g.ny - 1);
        const double gx = (std::log(field.at(i1, j)) - std::log(field.at(i0, j))) / ((i1 - i0) * g.dx());
        const double gy = (std::log(field.at(i, j1)) - std::log(field.at(i, j0))) / ((j1 - j0) * g.dy());
        grad[std::size_t(j) * g.nx + i] = std::hypot(gx, gy);
      }
    double best = -1;
    for (int s = 0; s <= 32; ++s) {
      const double c = reconstruction_kappa * std::pow(16.0, s / 32.0) / 4 / field.n;
      const auto lines = extract_level_curves(field, {c})[0].lines;
      double total = 0;
      std::size_t count = 0;
      for (const auto& pl : lines)
        for (const auto& z : pl.points) {
          total += detail::log_gradient_at(field, grad, z);
          ++count;
        }
      if (count > 0 && total / count > best) {
        best = total / count;
        level = c;
      }
    }
  }
  out.level = level;
  out.curves = extract_level_curves(field, {level}, basis);
  if (out.curves[0].lines.empty()) throw precondition_error("degree too low for frame");
  return out;
}

/// Symmetric Hausdorff distance between polylines and the true boundary of an
/// archipelago (1024 samples per island on the true side).
inline double hausdorff_to_boundary(const std::vector<polyline>& lines, const archipelago_spec& arch) {
  double forward = 0, backward = 0;
  for (const auto& pl : lines)
    for (const auto& z : pl.points) forward = std::max(forward, distance_to_boundary(arch, z));
  for (const auto& is : arch.islands)
    for (const auto& z : sample_boundary(is, 1024)) {
      double d = INFINITY;
      for (const auto& pl : lines) d = std::min(d, distance_to_polyline(pl, z));
      backward = std::max(backward, d);
    }
  return std::max(forward, backward);
}

inline nlohmann::json field_header(const christoffel_field& f) {
  return {{"x0", f.grid.x0}, {"x1", f.grid.x1}, {"y0", f.grid.y0}, {"y1", f.grid.y1},
          {"nx", f.grid.nx}, {"ny", f.grid.ny}, {"n", f.n},         {"basis_degree", f.basis_degree},
          {"precision_bits", f.precision_bits}};
}

inline std::string field_to_csv(const christoffel_field& f) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y,value\n";
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < f.grid.nx; ++i) {
      const cplx z = f.grid.node(i, j);
      os << z.real() << "," << z.imag() << "," << f.at(i, j) << "\n";
    }
  return os.str();
}

/// Square frame around a point set: bounding box center, half-size 1.25 times
/// the larger half-extent, and at least `min_half`.
inline grid_spec frame_around(const std::vector<cplx>& pts, double min_half, int resolution) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& z : pts) {
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
  }
  if (pts.empty()) x0 = x1 = y0 = y1 = 0;
  const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  const double half = std::max(1.25 * std::max(x1 - x0, y1 - y0) / 2, min_half);
  return {cx - half, cx + half, cy - half, cy + half, resolution, resolution};
}

}  // namespace bergman
