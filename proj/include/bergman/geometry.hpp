#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "scalar.hpp"

namespace bergman {

using cplx = std::complex<double>;

struct disk {
  cplx center;
  double radius;
};

struct ellipse {
  cplx center;
  double a;  // semi-major
  double b;  // semi-minor
  double angle;
};

/// Vertices counterclockwise, simple.
struct polygon {
  std::vector<cplx> vertices;
};

/// Edge i runs from vertices[i] to vertices[i+1]. A curvature of 0 is a
/// straight edge; positive curvature bulges outward, negative inward.
struct arc_polygon {
  std::vector<cplx> vertices;
  std::vector<double> curvatures;
};

/// Component of |z^m - 1| < r^m containing exp(2 pi i j / m).
struct lemniscate_island {
  int m;
  double r;
  int index;
};

using island_spec = std::variant<disk, ellipse, polygon, arc_polygon, lemniscate_island>;

struct archipelago_spec {
  std::vector<island_spec> islands;
};

template <class Real>
struct boundary_sample {
  std::complex<Real> point;
  std::complex<Real> tangent;  // d point / dt
};

namespace detail {

template <class Real>
std::complex<Real> cis(const Real& phi) {
  using std::cos;
  using std::sin;
  return {cos(phi), sin(phi)};
}

// Circular arc from a to b with signed curvature k (k != 0), parameter s in [0,1].
struct arc_geometry {
  cplx center;
  cplx start;  // a - center
  double sweep;  // signed total angle
  double radius;
};

inline arc_geometry make_arc(cplx a, cplx b, double k) {
  const cplx d = b - a;
  const double len = std::abs(d);
  const cplx u = d / len;
  const cplx outward = cplx(0, -1) * u;
  const double half = std::asin(std::clamp(k * len / 2, -1.0, 1.0));
  const cplx mid = 0.5 * (a + b);
  const cplx center = mid - outward * (std::cos(half) / k);
  return {center, a - center, 2 * half, std::abs(1 / k)};
}

inline double segment_distance(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0) return std::abs(p - a);
  const double s = std::clamp(((p - a) * std::conj(d)).real() / len2, 0.0, 1.0);
  return std::abs(p - (a + s * d));
}

inline double arc_distance(cplx p, const arc_geometry& g) {
  const cplx rel = p - g.center;
  const cplx end = g.center + g.start * std::polar(1.0, g.sweep);
  const cplx startpt = g.center + g.start;
  if (std::abs(rel) > 0) {
    // angle of rel measured from start, in the sweep direction
    double phi = std::arg(rel / g.start);
    if (g.sweep < 0) phi = -phi;
    if (phi < 0) phi += 2 * std::acos(-1.0);
    if (phi <= std::abs(g.sweep)) return std::abs(std::abs(rel) - g.radius);
  }
  return std::min(std::abs(p - startpt), std::abs(p - end));
}

inline bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2) {
  auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
  const double d1 = cross(p2 - p1, q1 - p1), d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1), d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double signed_area(const std::vector<cplx>& v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cplx a = v[i], b = v[(i + 1) % v.size()];
    s += a.real() * b.imag() - a.imag() * b.real();
  }
  return s / 2;
}

inline bool simple_closed_polyline(const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
    }
  return true;
}

inline double winding_number(const std::vector<cplx>& poly, cplx z) {
  double total = 0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    total += std::arg((poly[(i + 1) % poly.size()] - z) / (poly[i] - z));
  return total / (2 * std::acos(-1.0));
}

}  // namespace detail

/// Point and tangent of the counterclockwise boundary parametrization over
/// t in [0,1). Polygon corners report the incoming edge's tangent.
template <class Real>
boundary_sample<Real> boundary_point(const island_spec& island, const Real& t) {
  using C = std::complex<Real>;
  const Real two_pi = 2 * pi<Real>();
  const C i_unit(0, 1);
  auto lift = [](cplx z) { return C(Real(z.real()), Real(z.imag())); };

  return std::visit(
      [&](const auto& s) -> boundary_sample<Real> {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, disk>) {
          const C e = detail::cis<Real>(two_pi * t);
          return {lift(s.center) + Real(s.radius) * e, i_unit * two_pi * Real(s.radius) * e};
        } else if constexpr (std::is_same_v<S, ellipse>) {
          using std::cos;
          using std::sin;
          const C rot = detail::cis<Real>(Real(s.angle));
          const Real phi = two_pi * t;
          const C local(Real(s.a) * cos(phi), Real(s.b) * sin(phi));
          const C dlocal(-Real(s.a) * sin(phi) * two_pi, Real(s.b) * cos(phi) * two_pi);
          return {lift(s.center) + rot * local, rot * dlocal};
        } else if constexpr (std::is_same_v<S, polygon> || std::is_same_v<S, arc_polygon>) {
          const auto& v = s.vertices;
          const int edges = static_cast<int>(v.size());
          const Real scaled = t * edges;
          using std::floor;
          int e = static_cast<int>(real_cast<double>(floor(scaled)));
          e = std::clamp(e, 0, edges - 1);
          Real local = scaled - e;
          bool corner = (local == 0);
          auto edge_eval = [&](int edge, const Real& u) -> boundary_sample<Real> {
            const cplx a = v[edge], b = v[(edge + 1) % edges];
            double k = 0;
            if constexpr (std::is_same_v<S, arc_polygon>) k = s.curvatures[edge];
            if (k == 0) return {lift(a) + u * lift(b - a), Real(edges) * lift(b - a)};
            const auto g = detail::make_arc(a, b, k);
            const Real sweep(g.sweep);
            const C rot = detail::cis<Real>(sweep * u);
            const C r0 = lift(g.start);
            return {lift(g.center) + r0 * rot, Real(edges) * i_unit * sweep * r0 * rot};
          };
          auto here = edge_eval(e, local);
          if (corner) here.tangent = edge_eval((e + edges - 1) % edges, Real(1)).tangent;
          return here;
        } else {
          using std::pow;
          const Real gamma = pow(Real(s.r), s.m);
          const C w = detail::cis<Real>(two_pi * t);
          const C base = Real(1) + gamma * w;
          const Real inv_m = Real(1) / Real(s.m);
          const C root = std::exp(std::log(base) * inv_m);
          const C omega = detail::cis<Real>(two_pi * Real(s.index) / Real(s.m));
          const C dbase = gamma * i_unit * two_pi * w;
          return {omega * root, omega * inv_m * root / base * dbase};
        }
      },
      island);
}

/// Boundary sample points in parameter order, with polygon vertices included.
inline std::vector<cplx> sample_boundary(const island_spec& island, int samples) {
  std::vector<cplx> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i)
    out.push_back(boundary_point<double>(island, double(i) / samples).point);
  return out;
}

inline void validate_island(const island_spec& island) {
  std::visit(
      [](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, disk>) {
          if (!(s.radius > 0)) throw input_error("disk radius must be positive");
        } else if constexpr (std::is_same_v<S, ellipse>) {
          if (!(s.b > 0 && s.a >= s.b)) throw input_error("ellipse requires a >= b > 0");
        } else if constexpr (std::is_same_v<S, polygon> || std::is_same_v<S, arc_polygon>) {
          if (s.vertices.size() < 3 && !std::is_same_v<S, arc_polygon>)
            throw input_error("polygon needs at least 3 vertices");
          if (s.vertices.size() < 2) throw input_error("arc polygon needs at least 2 vertices");
          if constexpr (std::is_same_v<S, arc_polygon>) {
            if (s.curvatures.size() != s.vertices.size())
              throw input_error("arc polygon needs one curvature per edge");
            for (std::size_t i = 0; i < s.vertices.size(); ++i) {
              const double len = std::abs(s.vertices[(i + 1) % s.vertices.size()] - s.vertices[i]);
              if (std::abs(s.curvatures[i]) * len / 2 > 1 + 1e-12)
                throw input_error("arc edge " + std::to_string(i) + " is longer than a half circle");
            }
          }
          const auto pts = sample_boundary(s, 32 * static_cast<int>(s.vertices.size()));
          if (!detail::simple_closed_polyline(pts)) throw input_error("polygon boundary is not simple");
          if (detail::signed_area(pts) <= 0) throw input_error("polygon must be counterclockwise");
        } else {
          if (s.m < 2) throw input_error("lemniscate requires m >= 2");
          if (!(s.r > 0 && s.r < 1)) throw input_error("lemniscate requires 0 < r < 1");
          if (s.index < 1 || s.index > s.m) throw input_error("lemniscate island index out of range");
        }
      },
      island);
}

/// Checks each island and pairwise disjointness of the closures.
inline void validate(const archipelago_spec& arch) {
  if (arch.islands.empty()) throw input_error("archipelago has no islands");
  std::vector<std::vector<cplx>> samples;
  for (const auto& is : arch.islands) {
    validate_island(is);
    samples.push_back(sample_boundary(is, 128));
  }
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      double best = INFINITY;
      for (auto p : samples[i])
        for (auto q : samples[j]) best = std::min(best, std::abs(p - q));
      if (best <= 1e-9 || std::abs(detail::winding_number(samples[j], samples[i][0])) > 0.5 ||
          std::abs(detail::winding_number(samples[i], samples[j][0])) > 0.5)
        throw input_error("islands " + std::to_string(i) + " and " + std::to_string(j) +
                          " are not disjoint");
    }
}

namespace detail {

inline double ellipse_distance(const ellipse& e, cplx z) {
  const cplx u = (z - e.center) * std::polar(1.0, -e.angle);
  // Newton on the parameter from the best of 64 samples.
  double best_phi = 0, best = INFINITY;
  const double two_pi = 2 * std::acos(-1.0);
  for (int i = 0; i < 64; ++i) {
    const double phi = two_pi * i / 64;
    const double d = std::abs(cplx(e.a * std::cos(phi), e.b * std::sin(phi)) - u);
    if (d < best) best = d, best_phi = phi;
  }
  double phi = best_phi;
  for (int it = 0; it < 30; ++it) {
    const cplx p(e.a * std::cos(phi), e.b * std::sin(phi));
    const cplx dp(-e.a * std::sin(phi), e.b * std::cos(phi));
    const cplx ddp = -p;
    const double f = ((p - u) * std::conj(dp)).real();
    const double fp = std::norm(dp) + ((p - u) * std::conj(ddp)).real();
    if (fp <= 0) break;
    const double step = std::clamp(f / fp, -0.1, 0.1);
    phi -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return std::min(best, std::abs(cplx(e.a * std::cos(phi), e.b * std::sin(phi)) - u));
}

inline double lemniscate_distance(const lemniscate_island& l, cplx z) {
  const double two_pi = 2 * std::acos(-1.0);
  const double gamma = std::pow(l.r, l.m);
  const cplx omega = std::polar(1.0, two_pi * l.index / l.m);
  const double q = 1.0 / l.m;
  // z(t), z'(t), z''(t) of the boundary parametrization.
  auto eval = [&](double t, cplx& p, cplx& dp, cplx& ddp) {
    const cplx w = std::polar(1.0, two_pi * t);
    const cplx i2pi(0, two_pi);
    const cplx base = 1.0 + gamma * w;
    const cplx root = std::pow(base, q);
    const cplx dw = i2pi * w, ddw = i2pi * i2pi * w;
    p = omega * root;
    dp = omega * q * root / base * gamma * dw;
    ddp = omega * q * ((q - 1) * root / (base * base) * gamma * gamma * dw * dw + root / base * gamma * ddw);
  };
  constexpr int samples = 256;
  double best = INFINITY, best_t = 0;
  for (int i = 0; i < samples; ++i) {
    cplx p, dp, ddp;
    eval(double(i) / samples, p, dp, ddp);
    const double d = std::abs(p - z);
    if (d < best) best = d, best_t = double(i) / samples;
  }
  double t = best_t;
  for (int it = 0; it < 3; ++it) {
    cplx p, dp, ddp;
    eval(t, p, dp, ddp);
    const double f = ((p - z) * std::conj(dp)).real();
    const double fp = std::norm(dp) + ((p - z) * std::conj(ddp)).real();
    if (fp <= 0) break;
    t -= std::clamp(f / fp, -1.0 / samples, 1.0 / samples);
    cplx p2, dp2, ddp2;
    eval(t, p2, dp2, ddp2);
    best = std::min(best, std::abs(p2 - z));
  }
  return best;
}

}  // namespace detail

inline double distance_to_island(const island_spec& island, cplx z) {
  return std::visit(
      [&](const auto& s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, disk>) {
          return std::abs(std::abs(z - s.center) - s.radius);
        } else if constexpr (std::is_same_v<S, ellipse>) {
          return detail::ellipse_distance(s, z);
        } else if constexpr (std::is_same_v<S, polygon>) {
          double d = INFINITY;
          for (std::size_t i = 0; i < s.vertices.size(); ++i)
            d = std::min(d, detail::segment_distance(z, s.vertices[i],
                                                     s.vertices[(i + 1) % s.vertices.size()]));
          return d;
        } else if constexpr (std::is_same_v<S, arc_polygon>) {
          double d = INFINITY;
          for (std::size_t i = 0; i < s.vertices.size(); ++i) {
            const cplx a = s.vertices[i], b = s.vertices[(i + 1) % s.vertices.size()];
            d = std::min(d, s.curvatures[i] == 0
                                ? detail::segment_distance(z, a, b)
                                : detail::arc_distance(z, detail::make_arc(a, b, s.curvatures[i])));
          }
          return d;
        } else {
          return detail::lemniscate_distance(s, z);
        }
      },
      island);
}

inline double distance_to_boundary(const archipelago_spec& arch, cplx z) {
  double d = INFINITY;
  for (const auto& is : arch.islands) d = std::min(d, distance_to_island(is, z));
  return d;
}

/// Point-in-island test against a dense boundary polyline.
inline bool inside_island(const island_spec& island, cplx z, int samples = 512) {
  return std::abs(detail::winding_number(sample_boundary(island, samples), z)) > 0.5;
}

inline bool inside(const archipelago_spec& arch, cplx z) {
  for (const auto& is : arch.islands)
    if (inside_island(is, z)) return true;
  return false;
}

/// Monotone-chain hull of 64 samples per island plus all polygon vertices;
/// counterclockwise, no repeated first vertex.
inline std::vector<cplx> convex_hull(const archipelago_spec& arch) {
  std::vector<cplx> pts;
  for (const auto& is : arch.islands) {
    auto s = sample_boundary(is, 64);
    pts.insert(pts.end(), s.begin(), s.end());
    std::visit(
        [&](const auto& sp) {
          using S = std::decay_t<decltype(sp)>;
          if constexpr (std::is_same_v<S, polygon> || std::is_same_v<S, arc_polygon>)
            pts.insert(pts.end(), sp.vertices.begin(), sp.vertices.end());
        },
        is);
  }
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](cplx o, cplx a, cplx b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
  };
  std::vector<cplx> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

/// Signed distance from z to a convex counterclockwise polygon: negative inside.
inline double hull_signed_distance(const std::vector<cplx>& hull, cplx z) {
  if (hull.size() < 3) {
    double d = INFINITY;
    for (std::size_t i = 0; i < hull.size(); ++i)
      d = std::min(d, detail::segment_distance(z, hull[i], hull[(i + 1) % hull.size()]));
    return d;
  }
  double outside = -INFINITY;
  double edge_dist = INFINITY;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const cplx a = hull[i], b = hull[(i + 1) % hull.size()];
    const cplx d = b - a;
    // distance to the right of the directed edge (outside for ccw)
    const double side = ((z - a) * std::conj(d * cplx(0, -1))).real() / std::abs(d);
    outside = std::max(outside, side);
    edge_dist = std::min(edge_dist, detail::segment_distance(z, a, b));
  }
  return outside <= 0 ? -edge_dist : edge_dist;
}

inline bool in_convex_hull(const std::vector<cplx>& hull, cplx z, double slack) {
  return hull_signed_distance(hull, z) <= slack;
}

/// Reflection z -> center + radius^2 / conj(z - center).
template <class Real>
std::vector<std::complex<Real>> invert_in_circle(const std::vector<std::complex<Real>>& points,
                                                 const std::complex<Real>& center, const Real& radius) {
  std::vector<std::complex<Real>> out;
  out.reserve(points.size());
  for (const auto& z : points) {
    const auto d = z - center;
    if (d == std::complex<Real>(0)) throw precondition_error("inversion pole");
    out.push_back(center + radius * radius / std::conj(d));
  }
  return out;
}

/// Anticonformal reflection conj(S(z)) in the ellipse with foci +-1 and
/// semi-axes a, b, where S(z) = (2a^2 - 1) z - 2ab sqrt(z^2 - 1).
inline cplx ellipse_schwarz_reflect(cplx z, double a, double b) {
  if (std::abs(a * a - b * b - 1) > 1e-10)
    throw precondition_error("ellipse must have foci at -1 and 1 (a^2 - b^2 = 1)");
  if (z.imag() == 0 && std::abs(z.real()) < 1) throw precondition_error("on focal segment");
  // sqrt(z-1) sqrt(z+1) has its cut exactly on [-1,1] and is positive for z > 1.
  const cplx root = std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  return std::conj((2 * a * a - 1) * z - 2 * a * b * root);
}

// JSON schema: {"islands":[{"type":"disk","center":[re,im],"radius":r}, ...]}

inline cplx json_point(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw input_error("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline island_spec island_from_json(const nlohmann::json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "disk") return disk{json_point(j.at("center")), j.at("radius").get<double>()};
    if (type == "ellipse")
      return ellipse{json_point(j.at("center")), j.at("a").get<double>(), j.at("b").get<double>(),
                     j.value("angle", 0.0)};
    auto vertices = [&] {
      std::vector<cplx> v;
      for (const auto& p : j.at("vertices")) v.push_back(json_point(p));
      return v;
    };
    if (type == "polygon") return polygon{vertices()};
    if (type == "arc_polygon")
      return arc_polygon{vertices(), j.at("curvatures").get<std::vector<double>>()};
    if (type == "lemniscate")
      return lemniscate_island{j.at("m").get<int>(), j.at("r").get<double>(), j.at("island").get<int>()};
    throw input_error("unknown island type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("bad island: ") + e.what());
  }
}

inline nlohmann::json island_to_json(const island_spec& island) {
  auto pt = [](cplx z) { return nlohmann::json::array({z.real(), z.imag()}); };
  auto pts = [&](const std::vector<cplx>& v) {
    auto a = nlohmann::json::array();
    for (auto z : v) a.push_back(pt(z));
    return a;
  };
  return std::visit(
      [&](const auto& s) -> nlohmann::json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, disk>)
          return {{"type", "disk"}, {"center", pt(s.center)}, {"radius", s.radius}};
        else if constexpr (std::is_same_v<S, ellipse>)
          return {{"type", "ellipse"}, {"center", pt(s.center)}, {"a", s.a}, {"b", s.b}, {"angle", s.angle}};
        else if constexpr (std::is_same_v<S, polygon>)
          return {{"type", "polygon"}, {"vertices", pts(s.vertices)}};
        else if constexpr (std::is_same_v<S, arc_polygon>)
          return {{"type", "arc_polygon"}, {"vertices", pts(s.vertices)}, {"curvatures", s.curvatures}};
        else
          return {{"type", "lemniscate"}, {"m", s.m}, {"r", s.r}, {"island", s.index}};
      },
      island);
}

inline archipelago_spec archipelago_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("islands") || !j["islands"].is_array())
    throw input_error("archipelago JSON needs an \"islands\" array");
  archipelago_spec arch;
  for (const auto& is : j["islands"]) arch.islands.push_back(island_from_json(is));
  validate(arch);
  return arch;
}

inline nlohmann::json archipelago_to_json(const archipelago_spec& arch) {
  auto a = nlohmann::json::array();
  for (const auto& is : arch.islands) a.push_back(island_to_json(is));
  return {{"islands", a}};
}

/// All m islands of |z^m - 1| < r^m.
inline archipelago_spec lemniscate_archipelago(int m, double r) {
  archipelago_spec arch;
  for (int j = 1; j <= m; ++j) arch.islands.push_back(lemniscate_island{m, r, j});
  return arch;
}

}  // namespace bergman
