#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "moments.hpp"
#include "scalar.hpp"

namespace bergman {

/// The archipelago |z^m - 1| < r^m, 0 < r < 1, with m islands.
struct lemniscate_spec {
  int m = 3;
  double r = 0.9;

  /// tau(s) = 2 - 2/m - 2s/m
  double tau(int s) const { return 2.0 - 2.0 / m - 2.0 * s / m; }
  void check() const {
    if (m < 2) throw precondition_error("lemniscate needs m >= 2");
    if (!(r > 0 && r < 1)) throw precondition_error("lemniscate needs 0 < r < 1");
  }
};

/// Gamma function by the Lanczos approximation (g = 7, 9 terms) with reflection.
inline double gamma_function(double x) {
  static const std::array<double, 9> c = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                          771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                          -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const double pi = std::acos(-1.0);
  if (x < 0.5) return pi / (std::sin(pi * x) * gamma_function(1 - x));
  x -= 1;
  double a = c[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  return std::sqrt(2 * pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

template <class Real>
struct exact_top {
  std::vector<Real> monic;  // coefficients of z^(m-1) (z^m - 1)^k, constant term first
  Real lambda;
};

/// p_{km+m-1}(z) = z^(m-1) (z^m - 1)^k and lambda = sqrt(m(k+1) / (pi r^(2m(k+1)))).
template <class Real>
exact_top<Real> exact_top_subsequence(const lemniscate_spec& spec, int k) {
  using std::pow;
  using std::sqrt;
  spec.check();
  if (k < 0) throw precondition_error("exact_top_subsequence needs k >= 0");
  const int m = spec.m;
  exact_top<Real> out;
  out.monic.assign(std::size_t(k) * m + m, Real(0));
  Real binom = 1;
  for (int i = 0; i <= k; ++i) {
    // coefficient of (z^m)^i in (z^m - 1)^k is C(k,i) (-1)^(k-i)
    out.monic[std::size_t(i) * m + m - 1] = ((k - i) % 2 ? -binom : binom);
    binom = binom * Real(k - i) / Real(i + 1);
  }
  const Real r = Real(spec.r);
  out.lambda = sqrt(Real(m * (k + 1)) / (pi<Real>() * pow(r, 2 * m * (k + 1))));
  return out;
}

/// c_l = (1/2pi) int e^{-il theta} |gamma e^{i theta} + 1|^{-tau} d theta for
/// l = 0..K, by the trapezoid rule with the node count doubled until the
/// largest change is below tol * c_0.
template <class Real>
std::vector<Real> toeplitz_moments(const Real& gamma, const Real& tau, int K, double tol = 0) {
  using C = std::complex<Real>;
  using std::abs;
  using std::pow;
  if (!(abs(gamma) < 1)) throw precondition_error("toeplitz_moments needs |gamma| < 1");
  if (K < 0) throw precondition_error("toeplitz_moments needs K >= 0");
  const Real tolerance = tol > 0 ? Real(tol) : Real(std::min(1e-14, std::ldexp(1.0, 16 - precision_bits<Real>())));
  auto estimate = [&](int N, Real& imag_worst) {
    std::vector<Real> c(K + 1, Real(0));
    std::vector<Real> s(K + 1, Real(0));
    for (int i = 0; i < N; ++i) {
      const Real theta = 2 * pi<Real>() * Real(i) / Real(N);
      const C e(cos(theta), sin(theta));
      const Real w = pow(abs2(gamma * e + Real(1)), -tau / 2);
      const C step = std::conj(e);
      C ph(1);
      for (int l = 0; l <= K; ++l) {
        c[l] += w * ph.real();
        s[l] += w * ph.imag();
        ph *= step;
      }
    }
    imag_worst = 0;
    for (int l = 0; l <= K; ++l) {
      c[l] /= Real(N);
      imag_worst = std::max(imag_worst, Real(abs(s[l]) / Real(N)));
    }
    return c;
  };
  int N = 64;
  while (N < 2 * (K + 1)) N *= 2;
  Real imag;
  auto prev = estimate(N, imag);
  for (int it = 0; it < 16; ++it) {
    N *= 2;
    auto cur = estimate(N, imag);
    Real change = 0;
    for (int l = 0; l <= K; ++l) change = std::max(change, Real(abs(cur[l] - prev[l])));
    if (change <= tolerance * abs(cur[0])) {
      if (imag > Real(1e-13) * abs(cur[0]))
        throw numerical_error("Toeplitz moments have a nonzero imaginary part");
      return cur;
    }
    prev = std::move(cur);
  }
  throw numerical_error("Toeplitz moments did not converge");
}

/// Monic Szego polynomials pi_0..pi_K for the weight behind the moments c,
/// from the Cholesky factor of the Toeplitz matrix T_ij = c_|i-j|.
template <class Real>
struct szego_basis {
  Real gamma = 0, tau = 0;
  std::vector<Real> c;
  std::vector<std::vector<Real>> monic;  // monic[k][i], coefficient of w^i in pi_k
  std::vector<Real> at_minus_gamma;      // pi_k(-gamma)
  std::vector<Real> norm2;               // (1/2pi) int |pi_k|^2 weight d theta
};

template <class Real>
szego_basis<Real> szego_polynomials(const std::vector<Real>& c, const Real& gamma, const Real& tau, int K) {
  using std::sqrt;
  if (int(c.size()) < K + 1) throw precondition_error("szego_polynomials needs K+1 Toeplitz moments");
  const int n = K + 1;
  std::vector<Real> L(std::size_t(n) * n, Real(0));
  auto l = [&](int i, int j) -> Real& { return L[std::size_t(i) * n + j]; };
  for (int j = 0; j < n; ++j) {
    Real d = c[0];
    for (int p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0)) throw numerical_error("Toeplitz matrix is not positive definite at order " + std::to_string(j));
    l(j, j) = sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      Real s = c[i - j];
      for (int p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / l(j, j);
    }
  }
  szego_basis<Real> out;
  out.gamma = gamma;
  out.tau = tau;
  out.c.assign(c.begin(), c.begin() + n);
  // row k of L^{-1}, scaled to be monic: solve L^T y = e_k
  for (int k = 0; k < n; ++k) {
    std::vector<Real> y(k + 1, Real(0));
    y[k] = 1 / l(k, k);
    for (int i = k - 1; i >= 0; --i) {
      Real s = 0;
      for (int p = i + 1; p <= k; ++p) s += l(p, i) * y[p];
      y[i] = -s / l(i, i);
    }
    const Real lead = y[k];
    for (auto& v : y) v /= lead;
    Real value = 0;
    for (int i = k; i >= 0; --i) value = value * (-gamma) + y[i];
    out.monic.push_back(std::move(y));
    out.at_minus_gamma.push_back(value);
    out.norm2.push_back(l(k, k) * l(k, k));
  }
  return out;
}

template <class Real>
struct szego_result {
  std::vector<Real> monic;
  Real at_minus_gamma;
};

/// Monic pi_k and pi_k(-gamma) for the moments c.
template <class Real>
szego_result<Real> szego_monic(const std::vector<Real>& c, const Real& gamma, int k) {
  auto sb = szego_polynomials(c, gamma, Real(0), k);
  return {sb.monic[k], sb.at_minus_gamma[k]};
}

/// Szego data for the lemniscate weight of residue class s, up to degree K.
template <class Real>
szego_basis<Real> lemniscate_szego(const lemniscate_spec& spec, int s, int K) {
  using std::pow;
  spec.check();
  const Real gamma = pow(Real(spec.r), spec.m);
  const Real tau = Real(2) - Real(2) / Real(spec.m) - Real(2 * s) / Real(spec.m);
  return szego_polynomials(toeplitz_moments(gamma, tau, K), gamma, tau, K);
}

namespace detail {

template <class Real>
void check_szego_index(const lemniscate_spec& spec, int s, int k, const szego_basis<Real>& sb) {
  using std::abs;
  if (s < 0 || s > spec.m - 2) throw precondition_error("residue s must lie in [0, m-2] (use exact_top_subsequence)");
  if (k < 0 || k + 1 >= int(sb.monic.size())) throw precondition_error("Szego basis degree too low");
  Real scale = 0, g = 1;
  for (const auto& v : sb.monic[k]) {
    scale += abs(v) * g;
    g *= sb.gamma;
  }
  if (abs(sb.at_minus_gamma[k]) <= Real(1e3) * epsilon<Real>() * scale)
    throw numerical_error("Szego value near zero: k too small or tau near an even integer");
}

// beta_k(w) = [pi_{k+1}(w) - rho pi_k(w)] / (w + gamma), by synthetic division.
template <class Real>
std::vector<Real> beta_coefficients(const szego_basis<Real>& sb, int k, Real* remainder = nullptr) {
  using std::abs;
  const Real rho = sb.at_minus_gamma[k + 1] / sb.at_minus_gamma[k];
  std::vector<Real> num(sb.monic[k + 1]);
  for (int i = 0; i <= k; ++i) num[i] -= rho * sb.monic[k][i];
  std::vector<Real> q(k + 1);
  Real carry = 0;
  for (int i = k + 1; i >= 1; --i) {
    carry = num[i] + (i <= k ? -sb.gamma * q[i] : Real(0));
    q[i - 1] = carry;
  }
  Real rem = num[0] - sb.gamma * q[0];
  Real scale = 0;
  for (const auto& v : num) scale += abs(v);
  if (remainder) *remainder = abs(rem) / scale;
  return q;
}

}  // namespace detail

/// Monic coefficients (in z, constant term first) of p_{km+s} for
/// s in [0, m-2]: p(z) = z^s r^{mk} beta_k((z^m - 1) / r^m).
template <class Real>
std::vector<Real> bergman_from_szego(const lemniscate_spec& spec, int s, int k, const szego_basis<Real>& sb,
                                     Real* remainder = nullptr) {
  using std::pow;
  detail::check_szego_index(spec, s, k, sb);
  Real rem;
  const auto beta = detail::beta_coefficients(sb, k, &rem);
  if (remainder) *remainder = rem;
  if (rem > Real(1e-10)) throw numerical_error("synthetic division left a nonzero remainder");
  const int m = spec.m;
  const Real rm = pow(Real(spec.r), m);
  std::vector<Real> out(std::size_t(k) * m + s + 1, Real(0));
  // sum_i beta_i r^{m(k-i)} (z^m - 1)^i
  Real rpow = 1;  // r^{m(k-i)}, i descending from k
  for (int i = k; i >= 0; --i) {
    const Real a = beta[i] * rpow;
    Real binom = 1;
    for (int q = 0; q <= i; ++q) {
      out[std::size_t(q) * m + s] += a * ((i - q) % 2 ? -binom : binom);
      binom = binom * Real(i - q) / Real(q + 1);
    }
    rpow *= rm;
  }
  out.back() = 1;
  return out;
}

/// p_{km+s}(z) evaluated through beta_k in the w variable, without expanding in z.
template <class Real>
std::complex<Real> eval_bergman_from_szego(const lemniscate_spec& spec, int s, int k, const szego_basis<Real>& sb,
                                           const std::complex<Real>& z) {
  using C = std::complex<Real>;
  using std::pow;
  detail::check_szego_index(spec, s, k, sb);
  const Real rm = pow(Real(spec.r), spec.m);
  C zm(1);
  for (int i = 0; i < spec.m; ++i) zm *= z;
  const C w = (zm - Real(1)) / rm;
  const Real rho = sb.at_minus_gamma[k + 1] / sb.at_minus_gamma[k];
  C a(0), b(0);
  for (int i = k + 1; i >= 0; --i) a = a * w + sb.monic[k + 1][i];
  for (int i = k; i >= 0; --i) b = b * w + sb.monic[k][i];
  C beta;
  if (std::abs(to_double(w + sb.gamma)) > 1e-8) {
    beta = (a - rho * b) / (w + sb.gamma);
  } else {
    const auto q = detail::beta_coefficients(sb, k);
    beta = C(0);
    for (int i = k; i >= 0; --i) beta = beta * w + q[i];
  }
  C zs(1);
  for (int i = 0; i < s; ++i) zs *= z;
  return zs * pow(rm, k) * beta;
}

/// lambda_{km+s} from the Szego data:
/// lambda^{-2} = -pi_{k+1}(-g) r^{2mk+m} / (pi_k(-g) 2m (k - tau/2 + 1)) * int |pi_k|^2 / |r^m w + 1|^tau |dw|.
template <class Real>
Real lambda_from_szego(const lemniscate_spec& spec, int s, int k, const szego_basis<Real>& sb) {
  using std::pow;
  using std::sqrt;
  detail::check_szego_index(spec, s, k, sb);
  const int m = spec.m;
  const Real r = Real(spec.r);
  const Real integral = 2 * pi<Real>() * sb.norm2[k];
  const Real inv2 = -sb.at_minus_gamma[k + 1] * pow(r, 2 * m * k + m) /
                    (sb.at_minus_gamma[k] * Real(2 * m) * (Real(k) - sb.tau / 2 + 1)) * integral;
  if (!(inv2 > 0)) throw numerical_error("Szego lambda path gave a non-positive norm");
  return 1 / sqrt(inv2);
}

/// lim lambda_{km+s} r^{km+s+1} sqrt(pi/(km+s+1)) = 1 / r^{m-s-1}.
inline double predict_lambda_limit(const lemniscate_spec& spec, int s) {
  spec.check();
  if (s < 0 || s > spec.m - 1) throw precondition_error("residue s must lie in [0, m-1]");
  return 1 / std::pow(spec.r, spec.m - s - 1);
}

/// lim p_{km+s}(z) / (z^s (z^m - 1)^k) = ((z^m - 1 + r^{2m}) / (z^m - 1))^{tau/2}, equal to one at infinity.
inline cplx predict_exterior_ratio(const lemniscate_spec& spec, int s, cplx z) {
  spec.check();
  if (s < 0 || s > spec.m - 1) throw precondition_error("residue s must lie in [0, m-1]");
  const double r2m = std::pow(spec.r, 2 * spec.m);
  const cplx u = std::pow(z, spec.m) - 1.0;
  if (std::abs(u) < r2m * (1 - 1e-12)) throw precondition_error("point inside |z^m - 1| < r^{2m}");
  if (std::abs(u + r2m) <= 1e-12 * r2m) throw precondition_error("point at z^m - 1 = -r^{2m}");
  return std::exp(spec.tau(s) / 2 * std::log(1.0 + r2m / u));
}

/// Leading term sin(tau pi/2) Gamma(tau/2) / pi of (-1)^k k^{tau/2} r^{-mk} pi_{k,s}(-r^m).
/// At tau = 0 the limit value 1 is returned.
inline double predict_pi_value(const lemniscate_spec& spec, int s) {
  spec.check();
  if (s < 0 || s > spec.m - 1) throw precondition_error("residue s must lie in [0, m-1]");
  const double tau = spec.tau(s);
  const double pi = std::acos(-1.0);
  if (std::abs(tau) < 1e-12) return 1;
  const double half = tau / 2;
  if (std::abs(half - std::round(half)) < 1e-12) throw precondition_error("tau is an even integer");
  return std::sin(tau * pi / 2) * gamma_function(tau / 2) / pi;
}

/// Leading behaviour of pi_{k+1}(-r^m) / pi_k(-r^m): -r^m (1 - tau / (2k)).
inline double predict_pi_ratio(const lemniscate_spec& spec, int s, int k) {
  return -std::pow(spec.r, spec.m) * (1 - spec.tau(s) / (2.0 * k));
}

/// Limit of (-1)^{k+1} k^{2+tau/2} r^{-m(2k+4)} p_{km+s}(z) for z in island j
/// with |z^m - 1| < r^{2m}, s in [0, m-2].
inline cplx predict_interior_limit(const lemniscate_spec& spec, int s, int j, cplx z) {
  spec.check();
  if (s < 0 || s > spec.m - 2) throw precondition_error("residue s must lie in [0, m-2]");
  const int m = spec.m;
  const double pi = std::acos(-1.0), tau = spec.tau(s), r2m = std::pow(spec.r, 2 * m);
  const cplx u = std::pow(z, m) - 1.0;
  if (!(std::abs(u) < r2m)) throw precondition_error("point outside |z^m - 1| < r^{2m}");
  const cplx phase = std::polar(1.0, 2 * pi * j * (s + 1) / m);
  return phase * std::pow(z, m - 1) * tau * gamma_function(tau / 2) * std::sin(tau * pi / 2) /
         (2 * pi * std::pow(1 - r2m, tau / 2) * (u + r2m) * (u + r2m));
}

}  // namespace bergman
