#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "contour.hpp"
#include "geometry.hpp"
#include "scalar.hpp"

namespace bergman {

/// Exterior Green function of a union of disks with pole at infinity,
///   g(z) = c0 + sum_j d_j log|z - c_j| + sum_{j,k} Re(alpha_jk (r_j / (z - c_j))^k),
/// with sum_j d_j = 1. The Laurent coefficients are stored scaled by r_j^k,
/// so a_jk = alpha_jk r_j^k in the unscaled form.
struct green_model {
  std::vector<cplx> centers;
  std::vector<double> radii;
  int K = 0;
  double c0 = 0;
  std::vector<double> d;
  std::vector<std::vector<cplx>> alpha;  // alpha[j][k-1]
  double residual = 0;

  std::size_t size() const { return centers.size(); }
  double capacity() const { return std::exp(-c0); }
};

struct green_fit_options {
  double tolerance = 1e-10;
  int max_K = 40;
};

namespace detail {

inline double green_value(const green_model& gm, cplx z) {
  double g = gm.c0;
  for (std::size_t j = 0; j < gm.size(); ++j) {
    const cplx u = z - gm.centers[j];
    g += gm.d[j] * std::log(std::abs(u));
    const cplx q = gm.radii[j] / u;
    cplx qk = q;
    for (int k = 0; k < gm.K; ++k) {
      g += (gm.alpha[j][k] * qk).real();
      qk *= q;
    }
  }
  return g;
}

// Complex derivative F' with g = Re F; grad g = conj(F').
inline cplx green_derivative(const green_model& gm, cplx z, cplx* second = nullptr) {
  cplx f1 = 0, f2 = 0;
  for (std::size_t j = 0; j < gm.size(); ++j) {
    const cplx u = z - gm.centers[j];
    const cplx inv = 1.0 / u;
    f1 += gm.d[j] * inv;
    f2 -= gm.d[j] * inv * inv;
    const cplx q = gm.radii[j] * inv;
    cplx qk = q;
    for (int k = 1; k <= gm.K; ++k) {
      const cplx t = gm.alpha[j][k - 1] * qk;
      f1 -= double(k) * t * inv;
      f2 += double(k) * double(k + 1) * t * inv * inv;
      qk *= q;
    }
  }
  if (second) *second = f2;
  return f1;
}

inline int inside_disk(const green_model& gm, cplx z, double rel = 0) {
  for (std::size_t j = 0; j < gm.size(); ++j)
    if (std::abs(z - gm.centers[j]) < gm.radii[j] * (1 - rel)) return int(j);
  return -1;
}

}  // namespace detail

/// Least-squares fit of the expansion on arbitrary collocation point sets.
/// `nodes[j]` are boundary points surrounding the j-th center.
inline green_model fit_green_points(const std::vector<cplx>& centers, const std::vector<double>& scales,
                                    const std::vector<std::vector<cplx>>& nodes, int K) {
  const int N = int(centers.size());
  if (N < 1) throw precondition_error("Green fit needs at least one disk");
  if (K < 0) throw precondition_error("Green fit needs K >= 0");
  std::size_t rows = 0;
  for (const auto& s : nodes) rows += s.size();
  const int cols = 1 + (N - 1) + 2 * N * K;
  if (int(rows) < cols) throw precondition_error("Green fit has fewer collocation nodes than unknowns");

  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd rhs(rows);
  std::size_t row = 0;
  for (const auto& set : nodes)
    for (const cplx& z : set) {
      const double last = std::log(std::abs(z - centers[N - 1]));
      A(row, 0) = 1;
      for (int j = 0; j + 1 < N; ++j) A(row, 1 + j) = std::log(std::abs(z - centers[j])) - last;
      int c = N;
      for (int j = 0; j < N; ++j) {
        const cplx q = scales[j] / (z - centers[j]);
        cplx qk = q;
        for (int k = 0; k < K; ++k) {
          A(row, c++) = qk.real();
          A(row, c++) = -qk.imag();
          qk *= q;
        }
      }
      rhs(row) = -last;
      ++row;
    }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-14);
  if (qr.rank() < cols)
    throw numerical_error("Green fit is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                          std::to_string(cols) + ")");
  const Eigen::VectorXd x = qr.solve(rhs);

  green_model gm;
  gm.centers = centers;
  gm.radii = scales;
  gm.K = K;
  gm.c0 = x(0);
  gm.d.assign(N, 0);
  double sum = 0;
  for (int j = 0; j + 1 < N; ++j) {
    gm.d[j] = x(1 + j);
    sum += gm.d[j];
  }
  gm.d[N - 1] = 1 - sum;
  gm.alpha.assign(N, std::vector<cplx>(K));
  int c = N;
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < K; ++k) {
      gm.alpha[j][k] = cplx(x(c), x(c + 1));
      c += 2;
    }
  double worst = 0;
  for (const auto& set : nodes)
    for (const cplx& z : set) worst = std::max(worst, std::abs(detail::green_value(gm, z)));
  gm.residual = worst;
  return gm;
}

/// Fits the Green function of a union of disjoint disks with M equispaced
/// nodes per circle. If the residual (measured on the nodes and on the
/// midpoints between them) exceeds the tolerance, K is raised along
/// 4, 8, 12, ... up to max_K.
inline green_model fit_green(const std::vector<disk>& disks, int K, int M,
                             const green_fit_options& opts = {}) {
  if (disks.empty()) throw precondition_error("Green fit needs at least one disk");
  archipelago_spec arch;
  for (const auto& dk : disks) arch.islands.push_back(dk);
  validate(arch);
  if (M < 4 * (K + 1)) throw precondition_error("Green fit needs M >= 4(K+1)");

  std::vector<cplx> centers;
  std::vector<double> radii;
  for (const auto& dk : disks) {
    centers.push_back(dk.center);
    radii.push_back(dk.radius);
  }
  auto circle_nodes = [&](int count, double offset) {
    std::vector<std::vector<cplx>> nodes;
    for (const auto& dk : disks) {
      std::vector<cplx> s;
      for (int l = 0; l < count; ++l)
        s.push_back(dk.center + std::polar(dk.radius, 2 * std::acos(-1.0) * (l + offset) / count));
      nodes.push_back(std::move(s));
    }
    return nodes;
  };

  std::vector<double> history;
  for (;;) {
    const int m = std::max(M, 4 * (K + 1));
    auto gm = fit_green_points(centers, radii, circle_nodes(m, 0), K);
    for (const auto& set : circle_nodes(m, 0.5))
      for (const cplx& z : set) gm.residual = std::max(gm.residual, std::abs(detail::green_value(gm, z)));
    history.push_back(gm.residual);
    if (gm.residual <= opts.tolerance || disks.size() == 1) return gm;
    if (K >= opts.max_K) break;
    K = std::min(opts.max_K, (K / 4 + 1) * 4);
  }
  std::ostringstream os;
  os << "Green fit residual above " << opts.tolerance << " after K escalation; residuals:";
  for (double r : history) os << " " << r;
  throw numerical_error(os.str());
}

/// g(z); z must lie outside every closed disk.
inline double green_eval(const green_model& gm, cplx z) {
  for (std::size_t j = 0; j < gm.size(); ++j)
    if (std::abs(z - gm.centers[j]) <= gm.radii[j])
      throw precondition_error("green_eval: point lies in a closed disk");
  return detail::green_value(gm, z);
}

struct period_report {
  std::vector<double> b;     // d_j
  std::vector<double> flux;  // (1/2pi) * boundary integral of the normal derivative
};

inline period_report periods(const green_model& gm, int nodes = 512) {
  period_report out;
  out.b = gm.d;
  const double two_pi = 2 * std::acos(-1.0);
  for (std::size_t j = 0; j < gm.size(); ++j) {
    double s = 0;
    for (int l = 0; l < nodes; ++l) {
      const cplx n = std::polar(1.0, two_pi * l / nodes);
      const cplx z = gm.centers[j] + gm.radii[j] * n;
      s += (detail::green_derivative(gm, z) * n).real();
    }
    out.flux.push_back(s * gm.radii[j] / nodes);
  }
  return out;
}

struct saddle_point {
  cplx z;
  double level;              // R = exp(g(z))
  std::vector<int> islands;  // islands reached by steepest descent from the saddle
};

struct critical_level_report {
  std::vector<saddle_point> saddles;  // sorted by level
  std::vector<double> island_levels;  // R_j
  double r_prime = 0;
  double r_double_prime = 0;
};

namespace detail {

inline int descend_to_island(const green_model& gm, cplx z) {
  double span = 0;
  for (std::size_t j = 0; j < gm.size(); ++j) span = std::max(span, std::abs(gm.centers[j]) + gm.radii[j]);
  for (int it = 0; it < 200000; ++it) {
    double gap = INFINITY;
    for (std::size_t j = 0; j < gm.size(); ++j) {
      const double dist = std::abs(z - gm.centers[j]) - gm.radii[j];
      if (dist <= 1e-7 * gm.radii[j]) return int(j);
      gap = std::min(gap, dist);
    }
    const cplx grad = std::conj(green_derivative(gm, z));
    const double norm = std::abs(grad);
    if (!(norm > 0)) return -1;
    const double h = std::min({0.5 * gap, 0.02 * span, 1.0});
    z -= std::max(h, 1e-9) * grad / norm;
  }
  return -1;
}

struct union_find {
  std::vector<int> parent;
  explicit union_find(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace detail

/// Saddles of g by Newton iteration on F' from a seed grid over the bounding
/// box of the disks. Each saddle is linked to the islands its two steepest
/// descent paths reach; R_j is the lowest saddle level at which island j
/// merges with another island.
inline critical_level_report critical_levels(const green_model& gm, int seeds = 41) {
  const int N = int(gm.size());
  if (N < 2) throw precondition_error("critical levels need at least two islands");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (int j = 0; j < N; ++j) {
    x0 = std::min(x0, gm.centers[j].real() - gm.radii[j]);
    x1 = std::max(x1, gm.centers[j].real() + gm.radii[j]);
    y0 = std::min(y0, gm.centers[j].imag() - gm.radii[j]);
    y1 = std::max(y1, gm.centers[j].imag() + gm.radii[j]);
  }
  const double scale = std::max(x1 - x0, y1 - y0);

  std::vector<cplx> found;
  for (int grid = seeds; grid <= 4 * seeds; grid = 2 * grid - 1) {
    for (int a = 0; a < grid; ++a)
      for (int b = 0; b < grid; ++b) {
        cplx z(x0 + (x1 - x0) * a / (grid - 1), y0 + (y1 - y0) * b / (grid - 1));
        if (detail::inside_disk(gm, z, -1e-9) >= 0) continue;
        bool ok = false;
        for (int it = 0; it < 60; ++it) {
          cplx f2;
          const cplx f1 = detail::green_derivative(gm, z, &f2);
          if (std::abs(f1) * scale <= 1e-12) {
            ok = true;
            break;
          }
          if (f2 == cplx(0)) break;
          cplx step = f1 / f2;
          if (std::abs(step) > 0.25 * scale) step *= 0.25 * scale / std::abs(step);
          z -= step;
          if (detail::inside_disk(gm, z, -1e-9) >= 0 || std::abs(z - cplx(x0 + x1, y0 + y1) / 2.0) > 4 * scale)
            break;
        }
        if (!ok) continue;
        if (std::abs(detail::green_derivative(gm, z)) * scale > 1e-10) continue;
        bool dup = false;
        for (const auto& f : found) dup = dup || std::abs(f - z) <= 1e-6 * std::max(1.0, scale);
        if (!dup) found.push_back(z);
      }
    if (int(found.size()) >= N - 1) break;
  }
  if (int(found.size()) < N - 1)
    throw numerical_error("missing critical points: found " + std::to_string(found.size()) + " of " +
                          std::to_string(N - 1) + " (possible multiple saddle)");

  critical_level_report rep;
  for (const auto& z : found) {
    saddle_point sp{z, std::exp(detail::green_value(gm, z)), {}};
    cplx f2;
    detail::green_derivative(gm, z, &f2);
    const cplx dir = std::sqrt(-std::conj(f2));
    const cplx unit = std::abs(dir) > 0 ? dir / std::abs(dir) : cplx(1);
    for (double sgn : {1.0, -1.0}) {
      const int j = detail::descend_to_island(gm, z + sgn * 1e-4 * scale * unit);
      if (j >= 0 && std::find(sp.islands.begin(), sp.islands.end(), j) == sp.islands.end())
        sp.islands.push_back(j);
    }
    rep.saddles.push_back(sp);
  }
  std::sort(rep.saddles.begin(), rep.saddles.end(),
            [](const saddle_point& a, const saddle_point& b) { return a.level < b.level; });

  rep.island_levels.assign(N, 0);
  detail::union_find uf(N);
  for (const auto& sp : rep.saddles) {
    if (sp.islands.size() < 2) continue;
    const int a = uf.find(sp.islands[0]), b = uf.find(sp.islands[1]);
    if (a == b) continue;
    for (int j = 0; j < N; ++j) {
      const int root = uf.find(j);
      if ((root == a || root == b) && rep.island_levels[j] == 0) rep.island_levels[j] = sp.level;
    }
    uf.unite(a, b);
  }
  for (int j = 0; j < N; ++j)
    if (rep.island_levels[j] == 0) rep.island_levels[j] = rep.saddles.back().level;
  rep.r_prime = rep.saddles.front().level;
  rep.r_double_prime = rep.saddles.back().level;
  return rep;
}

struct level_curve_options {
  int resolution = 400;  // nodes per axis
  bool refine = true;
};

namespace detail {

inline double green_masked(const green_model& gm, cplx z) {
  for (std::size_t j = 0; j < gm.size(); ++j) {
    const double rho = std::abs(z - gm.centers[j]);
    if (rho <= gm.radii[j]) return rho - gm.radii[j] - 1e-12;
  }
  return green_value(gm, z);
}

}  // namespace detail

/// Frame of half-size 1.1 R E around the mean center, E the largest
/// extent of a disk from that center.
inline grid_spec green_frame(const green_model& gm, double R, int resolution) {
  cplx ctr = 0;
  for (const auto& c : gm.centers) ctr += c;
  ctr /= double(gm.size());
  double E = 0;
  for (std::size_t j = 0; j < gm.size(); ++j) E = std::max(E, std::abs(gm.centers[j] - ctr) + gm.radii[j]);
  const double half = 1.1 * R * E;
  return {ctr.real() - half, ctr.real() + half, ctr.imag() - half, ctr.imag() + half, resolution, resolution};
}

/// Level curve L_R = {g = log R} by marching squares, vertices optionally
/// pulled onto the level set by Newton steps along the gradient.
inline std::vector<polyline> level_curve(const green_model& gm, double R, const level_curve_options& opts = {}) {
  if (!(R > 1)) throw precondition_error("level_curve needs R > 1");
  if (gm.size() >= 2) {
    for (const auto& sp : critical_levels(gm).saddles)
      if (std::abs(R - sp.level) <= 1e-9 * sp.level) throw precondition_error("singular level");
  }
  const auto grid = green_frame(gm, R, opts.resolution);
  std::vector<double> values(std::size_t(grid.nx) * grid.ny);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) values[std::size_t(j) * grid.nx + i] = detail::green_masked(gm, grid.node(i, j));
  const double level = std::log(R);
  auto lines = marching_squares(grid, values, level, [&](cplx z) { return detail::green_masked(gm, z); });
  if (opts.refine) {
    const double cell = grid.cell_diagonal();
    for (auto& pl : lines)
      for (auto& z : pl.points) {
        cplx w = z;
        for (int it = 0; it < 8; ++it) {
          if (detail::inside_disk(gm, w, -1e-12) >= 0) break;
          const cplx grad = std::conj(detail::green_derivative(gm, w));
          const double n2 = std::norm(grad);
          if (!(n2 > 0)) break;
          const cplx step = (detail::green_value(gm, w) - level) * grad / n2;
          w -= step;
          if (std::abs(step) < 1e-14) break;
        }
        if (std::abs(w - z) <= cell && detail::inside_disk(gm, w, -1e-12) < 0) z = w;
      }
  }
  return lines;
}

inline nlohmann::json green_to_json(const green_model& gm) {
  nlohmann::json j;
  j["centers"] = nlohmann::json::array();
  for (const auto& c : gm.centers) j["centers"].push_back({c.real(), c.imag()});
  j["radii"] = gm.radii;
  j["K"] = gm.K;
  j["c0"] = gm.c0;
  j["capacity"] = gm.capacity();
  j["d"] = gm.d;
  j["a"] = nlohmann::json::array();
  for (std::size_t i = 0; i < gm.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    double rk = gm.radii[i];
    for (const auto& a : gm.alpha[i]) {
      row.push_back({(a * rk).real(), (a * rk).imag()});
      rk *= gm.radii[i];
    }
    j["a"].push_back(row);
  }
  j["residual"] = gm.residual;
  return j;
}

inline green_model green_from_json(const nlohmann::json& j) {
  green_model gm;
  try {
    for (const auto& c : j.at("centers")) gm.centers.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    gm.radii = j.at("radii").get<std::vector<double>>();
    gm.K = j.at("K").get<int>();
    gm.c0 = j.at("c0").get<double>();
    gm.d = j.at("d").get<std::vector<double>>();
    for (std::size_t i = 0; i < gm.centers.size(); ++i) {
      std::vector<cplx> row;
      double rk = gm.radii.at(i);
      for (const auto& a : j.at("a").at(i)) {
        row.emplace_back(cplx(a.at(0).get<double>(), a.at(1).get<double>()) / rk);
        rk *= gm.radii[i];
      }
      gm.alpha.push_back(std::move(row));
    }
    gm.residual = j.at("residual").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("malformed Green model JSON: ") + e.what());
  }
  return gm;
}

}  // namespace bergman
