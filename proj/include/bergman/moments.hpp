#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "io.hpp"
#include "quadrature.hpp"
#include "scalar.hpp"

namespace bergman {

/// Hermitian Gram matrix of power moments, mu(m, n) = integral of z^n conj(z)^m dA.
template <class Real>
struct moment_matrix {
  using complex_type = std::complex<Real>;

  int degree = 0;
  int precision_bits = bergman::precision_bits<Real>();
  std::vector<complex_type> entries;  // (degree+1)^2, row m, column n
  std::vector<std::string> warnings;

  moment_matrix() = default;
  explicit moment_matrix(int deg) : degree(deg), entries((deg + 1) * (deg + 1)) {}

  int size() const { return degree + 1; }
  complex_type& operator()(int m, int n) { return entries[m * size() + n]; }
  const complex_type& operator()(int m, int n) const { return entries[m * size() + n]; }
};

/// Real moments sigma(j, k) = integral of x^j y^k, for j + k <= degree.
template <class Real>
struct real_moment_table {
  int degree = 0;
  std::vector<Real> values;
  std::vector<char> present;
  std::vector<Real> residuals;  // least-squares residual norm per total degree k

  real_moment_table() = default;
  explicit real_moment_table(int deg)
      : degree(deg), values((deg + 1) * (deg + 1)), present((deg + 1) * (deg + 1), 0),
        residuals(deg + 1) {}

  void set(int j, int k, const Real& v) {
    values[j * (degree + 1) + k] = v;
    present[j * (degree + 1) + k] = 1;
  }
  bool has(int j, int k) const {
    return j >= 0 && k >= 0 && j + k <= degree && present[j * (degree + 1) + k];
  }
  const Real& at(int j, int k) const {
    if (!has(j, k))
      throw input_error("missing real moment sigma(" + std::to_string(j) + "," + std::to_string(k) + ")");
    return values[j * (degree + 1) + k];
  }
};

struct quadrature_config {
  double rel_tol = 0;  // 0 selects a tolerance matched to the working precision
  int nodes_per_panel = 16;
  int initial_panels = 4;
  int max_doublings = 10;
};

template <class Real>
Real default_quadrature_tolerance() {
  using std::ldexp;
  const double bits_tol = std::ldexp(1.0, 16 - precision_bits<Real>());
  return Real(std::min(1e-12, bits_tol));
}

namespace detail {

template <class Real>
std::vector<Real> binomial_row(int n) {
  std::vector<Real> row(n + 1);
  row[0] = 1;
  for (int k = 1; k <= n; ++k) row[k] = row[k - 1] * Real(n - k + 1) / Real(k);
  return row;
}

template <class Real>
std::vector<std::vector<Real>> binomial_table(int n) {
  std::vector<std::vector<Real>> t;
  for (int i = 0; i <= n; ++i) t.push_back(binomial_row<Real>(i));
  return t;
}

// Upper-triangular accumulator S(m, n), m <= n, of integrand sums.
template <class Real>
struct moment_accumulator {
  using C = std::complex<Real>;
  int degree;
  std::vector<C> sums;
  std::vector<C> zpow, cpow;

  explicit moment_accumulator(int d) : degree(d), sums((d + 1) * (d + 1)), zpow(d + 1), cpow(d + 1) {}

  C& at(int m, int n) { return sums[m * (degree + 1) + n]; }
  const C& at(int m, int n) const { return sums[m * (degree + 1) + n]; }

  // Adds weight * z^n conj(z)^(m+1) dz / (2i (m+1)) for all m <= n.
  void add(const C& z, const C& dz_weight) {
    const C zc = std::conj(z);
    zpow[0] = C(1);
    for (int k = 1; k <= degree; ++k) zpow[k] = zpow[k - 1] * z;
    // cpow[m] = conj(z)^(m+1) dz w / (2i(m+1))
    C running = zc * dz_weight / C(0, 2);
    for (int m = 0; m <= degree; ++m) {
      cpow[m] = running / Real(m + 1);
      running *= zc;
    }
    Real re, im;
    for (int m = 0; m <= degree; ++m) {
      const Real& cr = cpow[m].real();
      const Real& ci = cpow[m].imag();
      C* row = &sums[m * (degree + 1)];
      for (int n = m; n <= degree; ++n) {
        const Real& zr = zpow[n].real();
        const Real& zi = zpow[n].imag();
        re = cr * zr;
        re -= ci * zi;
        im = cr * zi;
        im += ci * zr;
        row[n] += C(re, im);
      }
    }
  }

  void scale(const Real& s) {
    for (auto& v : sums) v *= s;
  }
};

// Largest entry change relative to the Cauchy-Schwarz scale sqrt(S(m,m) S(n,n)).
template <class Real>
Real relative_change(const moment_accumulator<Real>& a, const moment_accumulator<Real>& b, int& wm,
                     int& wn) {
  using std::abs;
  using std::sqrt;
  Real worst = 0;
  for (int m = 0; m <= a.degree; ++m)
    for (int n = m; n <= a.degree; ++n) {
      const Real scale = sqrt(abs(b.at(m, m).real()) * abs(b.at(n, n).real())) + abs(b.at(m, n));
      const Real diff = abs(a.at(m, n) - b.at(m, n));
      const Real rel = scale > 0 ? diff / scale : diff;
      if (rel > worst) worst = rel, wm = m, wn = n;
    }
  return worst;
}

template <class Real>
void disk_moments(const disk& d, moment_accumulator<Real>& acc) {
  using C = std::complex<Real>;
  const int deg = acc.degree;
  const C c(Real(d.center.real()), Real(d.center.imag()));
  const Real rho(d.radius);
  const auto binom = binomial_table<Real>(deg);
  std::vector<C> cp(deg + 1), ccp(deg + 1);
  cp[0] = ccp[0] = C(1);
  for (int k = 1; k <= deg; ++k) {
    cp[k] = cp[k - 1] * c;
    ccp[k] = ccp[k - 1] * std::conj(c);
  }
  // integral over |u| < rho of |u|^(2a) = pi rho^(2a+2) / (a+1)
  std::vector<Real> radial(deg + 1);
  Real r2 = rho * rho, rp = r2;
  for (int a = 0; a <= deg; ++a) {
    radial[a] = pi<Real>() * rp / Real(a + 1);
    rp *= r2;
  }
  for (int m = 0; m <= deg; ++m)
    for (int n = m; n <= deg; ++n) {
      C s(0);
      for (int a = 0; a <= m; ++a)
        s += binom[n][a] * binom[m][a] * radial[a] * cp[n - a] * ccp[m - a];
      acc.at(m, n) += s;
    }
}

// Exact Gauss-Legendre for straight edges: integrand degree is at most 2*deg+1 in s.
template <class Real>
void segment_moments(cplx a, cplx b, moment_accumulator<Real>& acc) {
  using C = std::complex<Real>;
  const auto& rule = gauss_legendre<Real>(acc.degree + 1);
  const C za(Real(a.real()), Real(a.imag())), zb(Real(b.real()), Real(b.imag()));
  const C dz = (zb - za) / Real(2);
  const C mid = (za + zb) / Real(2);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc.add(mid + dz * rule.nodes[i], dz * rule.weights[i]);
}

template <class Real>
void arc_moments_panels(const arc_geometry& g, int panels, int nodes, moment_accumulator<Real>& acc) {
  using C = std::complex<Real>;
  const auto& rule = gauss_legendre<Real>(nodes);
  const C center(Real(g.center.real()), Real(g.center.imag()));
  const C start(Real(g.start.real()), Real(g.start.imag()));
  const Real sweep(g.sweep);
  const Real h = Real(1) / Real(panels);
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const Real s = h * (Real(p) + (rule.nodes[i] + 1) / 2);
      const C rot = cis<Real>(sweep * s);
      const C z = center + start * rot;
      const C dz = C(0, 1) * sweep * start * rot;
      acc.add(z, dz * (rule.weights[i] * h / 2));
    }
}

}  // namespace detail

/// Power moments of the area measure on the archipelago up to `degree` in
/// each variable, reduced to boundary integrals by Green's theorem.
template <class Real>
void check_positive_definite(moment_matrix<Real>& mm);

template <class Real>
moment_matrix<Real> compute_moments(const archipelago_spec& arch, int degree,
                                    const quadrature_config& quad = {}) {
  using C = std::complex<Real>;
  if (degree < 0) throw precondition_error("moment degree must be >= 0");
  const Real tol = quad.rel_tol > 0 ? Real(quad.rel_tol) : default_quadrature_tolerance<Real>();
  detail::moment_accumulator<Real> total(degree);

  auto fail = [&](const detail::moment_accumulator<Real>& prev, const detail::moment_accumulator<Real>& cur,
                  int m, int n) {
    std::ostringstream os;
    os << "moment quadrature did not converge after " << quad.max_doublings << " doublings; mu(" << m
       << "," << n << ") estimates " << to_string_full(prev.at(m, n).real()) << "+"
       << to_string_full(prev.at(m, n).imag()) << "i and " << to_string_full(cur.at(m, n).real()) << "+"
       << to_string_full(cur.at(m, n).imag()) << "i";
    throw numerical_error(os.str());
  };

  for (const auto& island : arch.islands) {
    detail::moment_accumulator<Real> acc(degree);
    if (const auto* d = std::get_if<disk>(&island)) {
      detail::disk_moments(*d, acc);
    } else if (const auto* p = std::get_if<polygon>(&island)) {
      const auto& v = p->vertices;
      for (std::size_t i = 0; i < v.size(); ++i) detail::segment_moments(v[i], v[(i + 1) % v.size()], acc);
    } else if (const auto* ap = std::get_if<arc_polygon>(&island)) {
      const auto& v = ap->vertices;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const cplx a = v[i], b = v[(i + 1) % v.size()];
        if (ap->curvatures[i] == 0) {
          detail::segment_moments(a, b, acc);
          continue;
        }
        const auto g = detail::make_arc(a, b, ap->curvatures[i]);
        int panels = quad.initial_panels;
        detail::moment_accumulator<Real> prev(degree);
        detail::arc_moments_panels(g, panels, quad.nodes_per_panel, prev);
        for (int it = 0;; ++it) {
          panels *= 2;
          detail::moment_accumulator<Real> cur(degree);
          detail::arc_moments_panels(g, panels, quad.nodes_per_panel, cur);
          int wm = 0, wn = 0;
          if (detail::relative_change(prev, cur, wm, wn) <= tol) {
            for (std::size_t k = 0; k < acc.sums.size(); ++k) acc.sums[k] += cur.sums[k];
            break;
          }
          if (it + 1 >= quad.max_doublings) fail(prev, cur, wm, wn);
          prev = std::move(cur);
        }
      }
    } else {
      // Smooth closed curves: periodic trapezoid rule, doubling the node count
      // and reusing the previous nodes until successive estimates agree.
      int nodes = quad.nodes_per_panel * quad.initial_panels;
      detail::moment_accumulator<Real> raw(degree);
      for (int i = 0; i < nodes; ++i) {
        const auto b = boundary_point<Real>(island, Real(i) / Real(nodes));
        raw.add(b.point, b.tangent);
      }
      auto prev = raw;
      prev.scale(Real(1) / Real(nodes));
      for (int it = 0;; ++it) {
        for (int i = 0; i < nodes; ++i) {
          const auto b = boundary_point<Real>(island, (Real(2 * i + 1)) / Real(2 * nodes));
          raw.add(b.point, b.tangent);
        }
        nodes *= 2;
        auto cur = raw;
        cur.scale(Real(1) / Real(nodes));
        int wm = 0, wn = 0;
        if (detail::relative_change(prev, cur, wm, wn) <= tol) {
          acc = std::move(cur);
          break;
        }
        if (it + 1 >= quad.max_doublings) fail(prev, cur, wm, wn);
        prev = std::move(cur);
      }
    }
    for (std::size_t k = 0; k < total.sums.size(); ++k) total.sums[k] += acc.sums[k];
  }

  moment_matrix<Real> mm(degree);
  for (int m = 0; m <= degree; ++m) {
    mm(m, m) = C(total.at(m, m).real(), Real(0));
    for (int n = m + 1; n <= degree; ++n) {
      mm(m, n) = total.at(m, n);
      mm(n, m) = std::conj(total.at(m, n));
    }
  }
  check_positive_definite(mm);
  return mm;
}

/// Cholesky of the moment matrix at working precision; returns the first
/// non-positive pivot index or -1.
template <class Real>
int cholesky_failure_index(const moment_matrix<Real>& mm) {
  using C = std::complex<Real>;
  const int n = mm.size();
  std::vector<C> l(n * n);
  for (int j = 0; j < n; ++j) {
    Real d = mm(j, j).real();
    for (int k = 0; k < j; ++k) d -= abs2(l[j * n + k]);
    if (!(d > 0)) return j;
    using std::sqrt;
    const Real ljj = sqrt(d);
    l[j * n + j] = C(ljj);
    for (int i = j + 1; i < n; ++i) {
      C s = mm(i, j);
      for (int k = 0; k < j; ++k) s -= l[i * n + k] * std::conj(l[j * n + k]);
      l[i * n + j] = s / ljj;
    }
  }
  return -1;
}

/// Attaches a warning when the matrix is not numerically positive definite.
template <class Real>
void check_positive_definite(moment_matrix<Real>& mm) {
  const int idx = cholesky_failure_index(mm);
  if (idx >= 0)
    mm.warnings.push_back("moment matrix not positive definite at working precision (pivot " +
                          std::to_string(idx) + ")");
}

/// Complex moments from real moments through the binomial expansion of
/// (x+iy)^n (x-iy)^m. Output degree is floor(sigma.degree / 2).
template <class Real>
moment_matrix<Real> real_to_complex_moments(const real_moment_table<Real>& sigma) {
  using C = std::complex<Real>;
  const int deg = sigma.degree / 2;
  const auto binom = detail::binomial_table<Real>(deg);
  // i^a (-i)^b
  auto phase = [](int a, int b) {
    static const C units[4] = {C(1), C(0, 1), C(-1), C(0, -1)};
    return units[((a - b) % 4 + 4) % 4];
  };
  moment_matrix<Real> mm(deg);
  for (int m = 0; m <= deg; ++m)
    for (int n = 0; n <= deg; ++n) {
      C s(0);
      for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= m; ++b)
          s += phase(a, b) * (binom[n][a] * binom[m][b] * sigma.at(n + m - a - b, a + b));
      mm(m, n) = s;
    }
  for (int m = 0; m <= deg; ++m) mm(m, m) = C(mm(m, m).real());
  return mm;
}

template <class Real>
struct radon_sample {
  Real theta;
  int k;
  Real value;
};

namespace detail {

// Householder least squares for a dense real system (rows >= cols).
template <class Real>
std::vector<Real> least_squares(std::vector<std::vector<Real>> a, std::vector<Real> b, Real& residual,
                                Real& min_diag) {
  using std::abs;
  using std::sqrt;
  const std::size_t rows = a.size(), cols = a[0].size();
  for (std::size_t j = 0; j < cols; ++j) {
    Real norm = 0;
    for (std::size_t i = j; i < rows; ++i) norm += a[i][j] * a[i][j];
    norm = sqrt(norm);
    if (norm == 0) continue;
    const Real alpha = a[j][j] > 0 ? -norm : norm;
    std::vector<Real> v(rows, Real(0));
    for (std::size_t i = j; i < rows; ++i) v[i] = a[i][j];
    v[j] -= alpha;
    Real vnorm2 = 0;
    for (std::size_t i = j; i < rows; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0) continue;
    for (std::size_t c = j; c < cols; ++c) {
      Real dot = 0;
      for (std::size_t i = j; i < rows; ++i) dot += v[i] * a[i][c];
      const Real f = 2 * dot / vnorm2;
      for (std::size_t i = j; i < rows; ++i) a[i][c] -= f * v[i];
    }
    Real dot = 0;
    for (std::size_t i = j; i < rows; ++i) dot += v[i] * b[i];
    const Real f = 2 * dot / vnorm2;
    for (std::size_t i = j; i < rows; ++i) b[i] -= f * v[i];
  }
  Real maxd = 0;
  min_diag = abs(a[0][0]);
  for (std::size_t j = 0; j < cols; ++j) {
    maxd = std::max(maxd, Real(abs(a[j][j])));
    min_diag = std::min(min_diag, Real(abs(a[j][j])));
  }
  min_diag /= maxd;
  std::vector<Real> x(cols);
  for (std::size_t jj = cols; jj-- > 0;) {
    Real s = b[jj];
    for (std::size_t c = jj + 1; c < cols; ++c) s -= a[jj][c] * x[c];
    x[jj] = s / a[jj][jj];
  }
  residual = 0;
  for (std::size_t i = cols; i < rows; ++i) residual += b[i] * b[i];
  residual = sqrt(residual);
  return x;
}

}  // namespace detail

/// Real moments from moments of parallel projections a_k(theta), solving
/// a_k(theta) = sum_i C(k,i) cos^i sin^(k-i) sigma(i, k-i) per k by least squares.
template <class Real>
real_moment_table<Real> radon_to_real_moments(const std::vector<radon_sample<Real>>& samples, int degree) {
  using std::cos;
  using std::sin;
  using std::fmod;
  using std::abs;
  real_moment_table<Real> table(degree);
  const Real p = pi<Real>();
  for (int k = 0; k <= degree; ++k) {
    std::vector<const radon_sample<Real>*> rows;
    for (const auto& s : samples)
      if (s.k == k) rows.push_back(&s);
    std::vector<double> angles;
    for (auto* s : rows) {
      double a = to_double(fmod(s->theta, p));
      if (a < 0) a += to_double(p);
      if (std::abs(a - to_double(p)) < 1e-12) a = 0;
      angles.push_back(a);
    }
    std::sort(angles.begin(), angles.end());
    const auto distinct =
        std::unique(angles.begin(), angles.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }) -
        angles.begin();
    if (distinct < k + 1) throw input_error("insufficient projection angles for k=" + std::to_string(k));
    const auto binom = detail::binomial_row<Real>(k);
    std::vector<std::vector<Real>> a;
    std::vector<Real> b;
    for (auto* s : rows) {
      const Real c = cos(s->theta), sn = sin(s->theta);
      std::vector<Real> row(k + 1);
      for (int i = 0; i <= k; ++i) {
        using std::pow;
        row[i] = binom[i] * pow(c, i) * pow(sn, k - i);
      }
      a.push_back(std::move(row));
      b.push_back(s->value);
    }
    Real residual, min_diag;
    const auto x = detail::least_squares(a, b, residual, min_diag);
    if (min_diag < epsilon<Real>() * 1e3)
      throw input_error("insufficient projection angles for k=" + std::to_string(k));
    for (int i = 0; i <= k; ++i) table.set(i, k - i, x[i]);
    table.residuals[k] = residual;
  }
  return table;
}

// Moment CSV: "degree,<n>,precision_bits,<p>" then "m,n,re,im" rows with m <= n.

template <class Real>
std::string moments_to_csv(const moment_matrix<Real>& mm) {
  std::ostringstream os;
  os << "degree," << mm.degree << ",precision_bits," << mm.precision_bits << "\n";
  for (int m = 0; m <= mm.degree; ++m)
    for (int n = m; n <= mm.degree; ++n)
      os << m << "," << n << "," << to_string_full(mm(m, n).real()) << ","
         << to_string_full(mm(m, n).imag()) << "\n";
  return os.str();
}

template <class Real>
moment_matrix<Real> moments_from_csv(const std::string& text) {
  using C = std::complex<Real>;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto where = [&] { return "moment CSV line " + std::to_string(lineno); };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (line.find_first_not_of(" \t\r") == std::string::npos) throw input_error("moment CSV: empty file");
  const auto head = split(line, ',');
  if (head.size() != 4 || head[0] != "degree" || head[2] != "precision_bits")
    throw input_error(where() + ": expected header 'degree,<n>,precision_bits,<p>'");
  const int degree = parse_int(head[1], where());
  if (degree < 0) throw input_error(where() + ": negative degree");
  moment_matrix<Real> mm(degree);
  mm.precision_bits = parse_int(head[3], where());
  std::vector<char> seen(mm.entries.size(), 0);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw input_error(where() + ": expected 'm,n,re,im'");
    const int m = parse_int(f[0], where()), n = parse_int(f[1], where());
    if (m < 0 || n < 0 || m > degree || n > degree) throw input_error(where() + ": index out of range");
    const C v(parse_real_at<Real>(f[2], where()), parse_real_at<Real>(f[3], where()));
    if (m == n && v.imag() != 0) throw input_error(where() + ": Hermitian violation (complex diagonal)");
    if (seen[n * mm.size() + m] && mm(n, m) != std::conj(v))
      throw input_error(where() + ": Hermitian violation at (" + f[0] + "," + f[1] + ")");
    mm(m, n) = v;
    mm(n, m) = std::conj(v);
    seen[m * mm.size() + n] = seen[n * mm.size() + m] = 1;
  }
  for (int m = 0; m <= degree; ++m)
    for (int n = m; n <= degree; ++n)
      if (!seen[m * mm.size() + n])
        throw input_error("moment CSV: missing entry (" + std::to_string(m) + "," + std::to_string(n) + ")");
  return mm;
}

template <class Real>
void save_moments(const moment_matrix<Real>& mm, const std::filesystem::path& path) {
  write_file_atomic(path, moments_to_csv(mm));
}

template <class Real>
moment_matrix<Real> load_moments(const std::filesystem::path& path) {
  return moments_from_csv<Real>(read_file(path));
}

/// Radon CSV rows "theta,k,a" (an optional header line starting with "theta" is skipped).
template <class Real>
std::vector<radon_sample<Real>> radon_from_csv(const std::string& text) {
  std::vector<radon_sample<Real>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (lineno == 1 && line.rfind("theta", 0) == 0) continue;
    const auto f = split(line, ',');
    const std::string where = "radon CSV line " + std::to_string(lineno);
    if (f.size() != 3) throw input_error(where + ": expected 'theta,k,a'");
    out.push_back({parse_real_at<Real>(f[0], where), parse_int(f[1], where), parse_real_at<Real>(f[2], where)});
  }
  if (out.empty()) throw input_error("radon CSV: no samples");
  return out;
}

}  // namespace bergman
