#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "basis.hpp"
#include "contour.hpp"
#include "eigen_qr.hpp"
#include "geometry.hpp"
#include "green.hpp"

namespace bergman {

template <class Real>
struct zero_set {
  int n = 0;
  std::vector<std::complex<Real>> zeros;
  std::vector<std::string> warnings;
};

template <class Real>
void sort_zeros(std::vector<std::complex<Real>>& zs) {
  std::sort(zs.begin(), zs.end(), [](const auto& a, const auto& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
}

/// Zeros of P_n as eigenvalues of the leading n x n Hessenberg section.
template <class Real>
zero_set<Real> zeros(const bergman_basis<Real>& basis, int n) {
  using C = std::complex<Real>;
  if (n < 1 || n > basis.degree) throw precondition_error("zeros: need 1 <= n <= basis degree");
  std::vector<C> h(std::size_t(n) * n, C(0));
  for (int k = 0; k < n; ++k)
    for (int j = 0; j <= std::min(k + 1, n - 1); ++j) h[std::size_t(j) * n + k] = basis.hess(j, k);
  zero_set<Real> out;
  out.n = n;
  out.zeros = hessenberg_eigenvalues(std::move(h), n, 200);
  sort_zeros(out.zeros);

  // |p_n(z)| against the size of its terms, sum |a_i| |z|^i
  const auto monic = monic_coefficients(basis, n);
  double worst = 0;
  for (const auto& z : out.zeros) {
    C value(0);
    Real scale = 0, zabs = abs(z);
    for (int i = n; i >= 0; --i) {
      value = value * z + monic[i];
      scale = scale * zabs + abs(monic[i]);
    }
    if (scale > 0) worst = std::max(worst, to_double(Real(abs(value) / scale)));
  }
  if (worst > 1e-4) {
    std::ostringstream os;
    os << "zeros of P_" << n << " poorly conditioned: relative residual " << worst;
    out.warnings.push_back(os.str());
  }
  return out;
}

/// Roots of the monic coefficient vector through its companion matrix.
template <class Real>
std::vector<std::complex<Real>> zeros_by_companion(const bergman_basis<Real>& basis, int n) {
  auto roots = companion_roots(monic_coefficients(basis, n));
  sort_zeros(roots);
  return roots;
}

/// Largest distance of a point in one multiset to its partner under a greedy
/// nearest matching, taken in both directions.
inline double multiset_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) return INFINITY;
  auto one_way = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    std::vector<char> used(y.size(), 0);
    double worst = 0;
    for (const auto& p : x) {
      double best = INFINITY;
      std::size_t arg = 0;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (!used[i] && std::abs(p - y[i]) < best) {
          best = std::abs(p - y[i]);
          arg = i;
        }
      used[arg] = 1;
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

/// (1/n) sum log(1/|z - z_k|); +infinity at a zero.
template <class Real>
double counting_potential(const zero_set<Real>& zs, cplx z) {
  if (zs.zeros.empty()) throw precondition_error("counting_potential: empty zero set");
  double s = 0;
  for (const auto& w : zs.zeros) {
    const double d = std::abs(z - to_double(w));
    if (d == 0) return std::numeric_limits<double>::infinity();
    s -= std::log(d);
  }
  return s / double(zs.zeros.size());
}

/// For each disk j, the level curve component of L_{R_j(1 - 1e-4)} around
/// disk j, inverted in the circle Gamma_j.
inline std::vector<polyline> predicted_zero_support(const archipelago_spec& arch, const green_model& gm,
                                                    const level_curve_options& opts = {}) {
  std::vector<disk> disks;
  for (const auto& is : arch.islands) {
    const auto* d = std::get_if<disk>(&is);
    if (!d) throw precondition_error("predicted zero support is only available for disks");
    disks.push_back(*d);
  }
  if (disks.size() < 2) throw precondition_error("predicted zero support needs at least two disks");
  if (disks.size() != gm.size()) throw precondition_error("Green model does not match the archipelago");
  const auto cl = critical_levels(gm);
  std::vector<polyline> out;
  for (std::size_t j = 0; j < disks.size(); ++j) {
    const double R = 1 + (cl.island_levels[j] - 1) * (1 - 1e-4);
    const auto lines = level_curve(gm, R, opts);
    const polyline* best = nullptr;
    for (const auto& pl : lines)
      if (pl.closed && polyline_encloses(pl, disks[j].center) &&
          (!best || std::abs(polyline_area(pl)) < std::abs(polyline_area(*best))))
        best = &pl;
    if (!best) throw numerical_error("no level curve component around island " + std::to_string(j + 1));
    polyline inv;
    inv.closed = true;
    inv.points = invert_in_circle<double>(best->points, disks[j].center, disks[j].radius);
    out.push_back(std::move(inv));
  }
  return out;
}

struct support_comparison {
  double tolerance = 0;
  double mean = 0;
  double max = 0;
  double fraction_within = 0;
  std::vector<double> distances;
};

/// Distance of each zero to the union of the curves and attractor points.
template <class Real>
support_comparison compare_support(const zero_set<Real>& zs, const std::vector<polyline>& curves, double tol,
                                   const std::vector<cplx>& points = {}) {
  if (curves.empty() && points.empty()) throw precondition_error("compare_support: no predicted support");
  if (zs.zeros.empty()) throw precondition_error("compare_support: empty zero set");
  support_comparison out;
  out.tolerance = tol;
  int within = 0;
  for (const auto& w : zs.zeros) {
    const cplx z = to_double(w);
    double d = INFINITY;
    for (const auto& c : curves) d = std::min(d, distance_to_polyline(c, z));
    for (const auto& p : points) d = std::min(d, std::abs(z - p));
    out.distances.push_back(d);
    out.mean += d;
    out.max = std::max(out.max, d);
    if (d <= tol) ++within;
  }
  out.mean /= double(zs.zeros.size());
  out.fraction_within = double(within) / double(zs.zeros.size());
  return out;
}

inline nlohmann::json support_to_json(const support_comparison& s) {
  return {{"tolerance", s.tolerance}, {"mean", s.mean}, {"max", s.max}, {"fraction_within", s.fraction_within}};
}

template <class Real>
std::string zeros_to_csv(const zero_set<Real>& zs) {
  std::ostringstream os;
  os << "n,re,im\n";
  for (const auto& z : zs.zeros)
    os << zs.n << "," << to_string_full(z.real()) << "," << to_string_full(z.imag()) << "\n";
  return os.str();
}

}  // namespace bergman
