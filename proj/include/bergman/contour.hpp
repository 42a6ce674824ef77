#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace bergman {

/// Rectangular node grid; node (i, j) sits at (x0 + i dx, y0 + j dy).
struct grid_spec {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  int nx = 2, ny = 2;

  double dx() const { return nx > 1 ? (x1 - x0) / (nx - 1) : 0; }
  double dy() const { return ny > 1 ? (y1 - y0) / (ny - 1) : 0; }
  std::complex<double> node(int i, int j) const { return {x0 + i * dx(), y0 + j * dy()}; }
  double cell_diagonal() const { return std::hypot(dx(), dy()); }
};

struct polyline {
  std::vector<std::complex<double>> points;
  bool closed = false;
};

struct level_curves {
  double level = 0;
  std::vector<polyline> lines;
};

using level_curve_set = std::vector<level_curves>;

/// Marching squares on node values (row-major, values[j * nx + i]).
/// Saddle cells are resolved by `center_value` evaluated at the cell center.
inline std::vector<polyline> marching_squares(const grid_spec& grid, const std::vector<double>& values,
                                              double level,
                                              const std::function<double(std::complex<double>)>& center_value) {
  const int nx = grid.nx, ny = grid.ny;
  if (nx < 2 || ny < 2) throw precondition_error("contouring needs a grid of at least 2x2");
  const long horizontal = long(nx - 1) * ny;
  auto hid = [&](int i, int j) { return long(j) * (nx - 1) + i; };
  auto vid = [&](int i, int j) { return horizontal + long(j) * nx + i; };
  auto val = [&](int i, int j) { return values[std::size_t(j) * nx + i]; };
  auto lerp = [&](std::complex<double> a, std::complex<double> b, double va, double vb) {
    const double t = (vb == va) ? 0.5 : (level - va) / (vb - va);
    return a + t * (b - a);
  };

  struct segment {
    long e0, e1;
    std::complex<double> p0, p1;
  };
  std::vector<segment> segs;
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const double vbl = val(i, j), vbr = val(i + 1, j), vtr = val(i + 1, j + 1), vtl = val(i, j + 1);
      if (!std::isfinite(vbl) || !std::isfinite(vbr) || !std::isfinite(vtr) || !std::isfinite(vtl)) continue;
      const bool bl = vbl >= level, br = vbr >= level, tr = vtr >= level, tl = vtl >= level;
      const auto nbl = grid.node(i, j), nbr = grid.node(i + 1, j), ntr = grid.node(i + 1, j + 1),
                 ntl = grid.node(i, j + 1);
      struct edge_point {
        long id;
        std::complex<double> p;
      };
      const edge_point bottom{hid(i, j), lerp(nbl, nbr, vbl, vbr)};
      const edge_point top{hid(i, j + 1), lerp(ntl, ntr, vtl, vtr)};
      const edge_point left{vid(i, j), lerp(nbl, ntl, vbl, vtl)};
      const edge_point right{vid(i + 1, j), lerp(nbr, ntr, vbr, vtr)};
      auto add = [&](const edge_point& a, const edge_point& b) { segs.push_back({a.id, b.id, a.p, b.p}); };

      std::vector<edge_point> crossing;
      if (bl != br) crossing.push_back(bottom);
      if (br != tr) crossing.push_back(right);
      if (tl != tr) crossing.push_back(top);
      if (bl != tl) crossing.push_back(left);
      if (crossing.size() == 2) {
        add(crossing[0], crossing[1]);
      } else if (crossing.size() == 4) {
        const bool center = center_value(0.25 * (nbl + nbr + ntr + ntl)) >= level;
        if (center == bl) {
          // bl and tr connected through the center: cut off br and tl
          add(bottom, right);
          add(left, top);
        } else {
          add(left, bottom);
          add(top, right);
        }
      }
    }

  std::multimap<long, std::size_t> by_edge;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    by_edge.emplace(segs[s].e0, s);
    by_edge.emplace(segs[s].e1, s);
  }
  std::vector<char> used(segs.size(), 0);
  std::vector<polyline> out;

  auto other_segment = [&](long edge, std::size_t self) -> long {
    auto [b, e] = by_edge.equal_range(edge);
    for (auto it = b; it != e; ++it)
      if (it->second != self && !used[it->second]) return long(it->second);
    return -1;
  };

  auto trace = [&](std::size_t start, long start_edge) {
    polyline pl;
    std::size_t cur = start;
    long entry = start_edge;
    used[cur] = 1;
    const auto& s0 = segs[cur];
    pl.points.push_back(s0.e0 == entry ? s0.p0 : s0.p1);
    for (;;) {
      const auto& s = segs[cur];
      const long exit = (s.e0 == entry) ? s.e1 : s.e0;
      pl.points.push_back(s.e0 == entry ? s.p1 : s.p0);
      if (exit == start_edge && cur != start) {
        pl.closed = true;
        break;
      }
      const long next = other_segment(exit, cur);
      if (next < 0) {
        if (exit == start_edge) pl.closed = true;
        break;
      }
      cur = std::size_t(next);
      used[cur] = 1;
      entry = exit;
    }
    if (pl.closed && pl.points.size() > 1 && pl.points.front() == pl.points.back()) pl.points.pop_back();
    if (!pl.closed && pl.points.size() > 2 &&
        std::abs(pl.points.front() - pl.points.back()) <= grid.cell_diagonal())
      pl.closed = true;
    out.push_back(std::move(pl));
  };

  // open lines start at edges touched by a single segment
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    for (long e : {segs[s].e0, segs[s].e1})
      if (by_edge.count(e) == 1 && !used[s]) trace(s, e);
  }
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) trace(s, segs[s].e0);
  return out;
}

/// Signed area enclosed by a closed polyline (positive when counterclockwise).
inline double polyline_area(const polyline& pl) {
  double s = 0;
  const auto& v = pl.points;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto a = v[i], b = v[(i + 1) % v.size()];
    s += a.real() * b.imag() - a.imag() * b.real();
  }
  return s / 2;
}

inline bool polyline_encloses(const polyline& pl, std::complex<double> z) {
  double total = 0;
  const auto& v = pl.points;
  for (std::size_t i = 0; i < v.size(); ++i) total += std::arg((v[(i + 1) % v.size()] - z) / (v[i] - z));
  return std::abs(total) > std::acos(-1.0);
}

inline double distance_to_polyline(const polyline& pl, std::complex<double> z) {
  const auto& v = pl.points;
  if (v.empty()) return INFINITY;
  if (v.size() == 1) return std::abs(z - v[0]);
  double d = INFINITY;
  const std::size_t edges = pl.closed ? v.size() : v.size() - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const auto a = v[i], b = v[(i + 1) % v.size()];
    const auto ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0 ? ((z - a) * std::conj(ab)).real() / len2 : 0;
    t = std::clamp(t, 0.0, 1.0);
    d = std::min(d, std::abs(z - (a + t * ab)));
  }
  return d;
}

/// CSV "level,poly_id,x,y".
inline std::string level_curves_to_csv(const level_curve_set& set) {
  std::ostringstream os;
  os.precision(17);
  os << "level,poly_id,x,y\n";
  int id = 0;
  for (const auto& lc : set)
    for (const auto& pl : lc.lines) {
      for (const auto& p : pl.points) os << lc.level << "," << id << "," << p.real() << "," << p.imag() << "\n";
      if (pl.closed && !pl.points.empty())
        os << lc.level << "," << id << "," << pl.points.front().real() << "," << pl.points.front().imag() << "\n";
      ++id;
    }
  return os.str();
}

}  // namespace bergman
