#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "json.hpp"

#include "moments.hpp"
#include "scalar.hpp"

namespace bergman {

/// Orthonormal Bergman polynomials P_0..P_degree of a moment matrix.
///
/// The Hessenberg matrix stores multiplication by z in the basis:
/// z P_k = sum_{j <= k+1} hess(j, k) P_j, for columns k = 0..degree-1.
/// coeff(k, i) is the coefficient of z^i in P_k.
template <class Real>
struct bergman_basis {
  using complex_type = std::complex<Real>;

  int degree = 0;
  int precision_bits = bergman::precision_bits<Real>();
  std::vector<Real> lambda;             // leading coefficients, lambda[k] = coeff(k, k)
  std::vector<complex_type> hessenberg;  // (degree+1) x degree, column-major by column k
  std::vector<complex_type> coeffs;      // (degree+1) x (degree+1), row k
  Real orthonormality_residual = 0;

  bergman_basis() = default;
  explicit bergman_basis(int n)
      : degree(n), lambda(n + 1), hessenberg((n + 1) * n), coeffs((n + 1) * (n + 1)) {}

  complex_type& hess(int j, int k) { return hessenberg[k * (degree + 1) + j]; }
  const complex_type& hess(int j, int k) const { return hessenberg[k * (degree + 1) + j]; }
  complex_type& coeff(int k, int i) { return coeffs[k * (degree + 1) + i]; }
  const complex_type& coeff(int k, int i) const { return coeffs[k * (degree + 1) + i]; }

  /// Same basis rounded to another real type (double for fast field evaluation).
  template <class To>
  bergman_basis<To> convert() const {
    bergman_basis<To> out(degree);
    out.precision_bits = precision_bits;
    for (int k = 0; k <= degree; ++k) out.lambda[k] = real_cast<To>(lambda[k]);
    for (std::size_t i = 0; i < hessenberg.size(); ++i) out.hessenberg[i] = complex_cast<To>(hessenberg[i]);
    for (std::size_t i = 0; i < coeffs.size(); ++i) out.coeffs[i] = complex_cast<To>(coeffs[i]);
    out.orthonormality_residual = real_cast<To>(orthonormality_residual);
    return out;
  }
};

namespace detail {

// u = M v, with (M v)[r] = sum_i mu(r, i) v[i] over the leading `len` entries.
template <class Real>
void moment_apply(const moment_matrix<Real>& mm, const std::vector<std::complex<Real>>& v, int len,
                  std::vector<std::complex<Real>>& out) {
  using C = std::complex<Real>;
  out.assign(len, C(0));
  Real re, im;
  for (int r = 0; r < len; ++r) {
    Real sr = 0, si = 0;
    const C* row = &mm.entries[r * mm.size()];
    for (int i = 0; i < len; ++i) {
      const Real& ar = row[i].real();
      const Real& ai = row[i].imag();
      const Real& br = v[i].real();
      const Real& bi = v[i].imag();
      re = ar * br;
      re -= ai * bi;
      im = ar * bi;
      im += ai * br;
      sr += re;
      si += im;
    }
    out[r] = C(sr, si);
  }
}

// <f, g> = sum_r conj(g[r]) (M f)[r], given mf = M f.
template <class Real>
std::complex<Real> inner_from_applied(const std::vector<std::complex<Real>>& mf,
                                      const std::complex<Real>* g, int len) {
  Real sr = 0, si = 0;
  for (int r = 0; r < len; ++r) {
    // conj(g) * mf
    sr += g[r].real() * mf[r].real() + g[r].imag() * mf[r].imag();
    si += g[r].real() * mf[r].imag() - g[r].imag() * mf[r].real();
  }
  return {sr, si};
}

}  // namespace detail

struct orthonormalize_options {
  double breakdown_factor = 1e3;  // breakdown when H(k,k-1) <= factor * eps * |z P_{k-1}|
};

/// Arnoldi Gram-Schmidt: at step k, z P_{k-1} is orthogonalized against
/// P_0..P_{k-1} (classical Gram-Schmidt with one reorthogonalization pass),
/// with all inner products taken through the moment matrix.
template <class Real>
bergman_basis<Real> orthonormalize(const moment_matrix<Real>& mm, int n,
                                   const orthonormalize_options& opts = {}) {
  using C = std::complex<Real>;
  using std::sqrt;
  if (n < 0) throw precondition_error("basis degree must be >= 0");
  if (n > mm.degree - 1 && !(n == 0 && mm.degree == 0))
    throw precondition_error("basis degree " + std::to_string(n) + " needs moments of degree >= " +
                             std::to_string(n + 1) + " (have " + std::to_string(mm.degree) + ")");
  if (!(mm(0, 0).real() > 0)) throw precondition_error("moment mu(0,0) must be positive");

  bergman_basis<Real> basis(n);
  basis.precision_bits = std::min(mm.precision_bits, precision_bits<Real>());
  const int len = n + 1;
  basis.coeff(0, 0) = C(1 / sqrt(mm(0, 0).real()));
  basis.lambda[0] = basis.coeff(0, 0).real();

  std::vector<C> v(len), mv;
  for (int k = 1; k <= n; ++k) {
    // v = z P_{k-1}
    std::fill(v.begin(), v.end(), C(0));
    for (int i = 0; i < k; ++i) v[i + 1] = basis.coeff(k - 1, i);
    detail::moment_apply(mm, v, k + 1, mv);
    const Real start_norm = sqrt(detail::inner_from_applied(mv, v.data(), k + 1).real());

    for (int pass = 0; pass < 2; ++pass) {
      std::vector<C> h(k);
      for (int j = 0; j < k; ++j) h[j] = detail::inner_from_applied(mv, &basis.coeff(j, 0), k + 1);
      for (int j = 0; j < k; ++j) {
        basis.hess(j, k - 1) += h[j];
        for (int i = 0; i <= j; ++i) v[i] -= h[j] * basis.coeff(j, i);
      }
      detail::moment_apply(mm, v, k + 1, mv);
    }
    const Real norm2 = detail::inner_from_applied(mv, v.data(), k + 1).real();
    const Real norm = norm2 > 0 ? sqrt(norm2) : Real(0);
    if (!(norm > Real(opts.breakdown_factor) * epsilon<Real>() * start_norm))
      throw numerical_error("Arnoldi breakdown at k=" + std::to_string(k));
    basis.hess(k, k - 1) = C(norm);
    for (int i = 0; i <= k; ++i) basis.coeff(k, i) = v[i] / norm;
    // The leading coefficient is real: it is lambda_{k-1} / norm.
    basis.coeff(k, k) = C(basis.coeff(k, k).real());
    basis.lambda[k] = basis.coeff(k, k).real();
  }

  // max |<P_j, P_k> - delta_jk|
  Real worst = 0;
  std::vector<C> pk(len);
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i < len; ++i) pk[i] = basis.coeff(k, i);
    detail::moment_apply(mm, pk, len, mv);
    for (int j = 0; j <= n; ++j) {
      C g = detail::inner_from_applied(mv, &basis.coeff(j, 0), len);
      if (j == k) g -= C(1);
      using std::abs;
      worst = std::max(worst, Real(abs(g)));
    }
  }
  basis.orthonormality_residual = worst;
  return basis;
}

/// P_0(z)..P_n(z) by the Hessenberg forward recurrence.
template <class Real>
std::vector<std::complex<Real>> eval_polys(const bergman_basis<Real>& basis, const std::complex<Real>& z, int n) {
  using C = std::complex<Real>;
  if (n < 0 || n > basis.degree) throw precondition_error("eval_polys: degree out of range");
  std::vector<C> p(n + 1);
  p[0] = C(basis.lambda[0]);
  for (int k = 0; k < n; ++k) {
    C s = z * p[k];
    for (int j = 0; j <= k; ++j) s -= basis.hess(j, k) * p[j];
    p[k + 1] = s / basis.hess(k + 1, k).real();
  }
  return p;
}

/// P_n(z) from the monomial coefficient table (Horner), for cross-checks.
template <class Real>
std::complex<Real> eval_from_coefficients(const bergman_basis<Real>& basis, int k, const std::complex<Real>& z) {
  std::complex<Real> s(0);
  for (int i = k; i >= 0; --i) s = s * z + basis.coeff(k, i);
  return s;
}

/// Coefficients of the monic polynomial P_k / lambda_k, constant term first.
template <class Real>
std::vector<std::complex<Real>> monic_coefficients(const bergman_basis<Real>& basis, int k) {
  if (k < 0 || k > basis.degree) throw precondition_error("monic_coefficients: degree out of range");
  std::vector<std::complex<Real>> out(k + 1);
  for (int i = 0; i <= k; ++i) out[i] = basis.coeff(k, i) / basis.lambda[k];
  out[k] = std::complex<Real>(1);
  return out;
}

struct capacity_estimate {
  double normalized;  // (sqrt((n+1)/pi) / lambda_n)^(1/(n+1))
  double raw;         // lambda_n^(-1/n)
};

template <class Real>
capacity_estimate estimate_capacity(const bergman_basis<Real>& basis) {
  using std::log;
  using std::exp;
  if (basis.degree < 10) throw precondition_error("estimate_capacity needs degree >= 10");
  const int n = basis.degree;
  const Real ln = log(basis.lambda[n]);
  const Real normalized = exp((log(Real(n + 1) / pi<Real>()) / 2 - ln) / Real(n + 1));
  const Real raw = exp(-ln / Real(n));
  return {to_double(normalized), to_double(raw)};
}

template <class Real>
nlohmann::json basis_to_json(const bergman_basis<Real>& basis) {
  auto cstr = [](const std::complex<Real>& z) {
    return nlohmann::json::array({to_string_full(z.real()), to_string_full(z.imag())});
  };
  nlohmann::json j;
  j["degree"] = basis.degree;
  j["precision_bits"] = basis.precision_bits;
  auto lam = nlohmann::json::array();
  for (const auto& l : basis.lambda) lam.push_back(to_string_full(l));
  j["lambda"] = lam;
  auto hess = nlohmann::json::array();
  for (int k = 0; k < basis.degree; ++k) {
    auto col = nlohmann::json::array();
    for (int r = 0; r <= basis.degree; ++r) col.push_back(cstr(basis.hess(r, k)));
    hess.push_back(col);
  }
  j["hessenberg"] = hess;
  auto coeffs = nlohmann::json::array();
  for (int k = 0; k <= basis.degree; ++k) {
    auto row = nlohmann::json::array();
    for (int i = 0; i <= basis.degree; ++i) row.push_back(cstr(basis.coeff(k, i)));
    coeffs.push_back(row);
  }
  j["coefficients"] = coeffs;
  j["orthonormality_residual"] = to_double(basis.orthonormality_residual);
  return j;
}

template <class Real>
bergman_basis<Real> basis_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("degree").get<int>();
    if (n < 0) throw input_error("basis JSON: negative degree");
    bergman_basis<Real> b(n);
    b.precision_bits = j.at("precision_bits").get<int>();
    auto real = [](const nlohmann::json& s) { return parse_real<Real>(s.get<std::string>()); };
    auto cval = [&](const nlohmann::json& p) { return std::complex<Real>(real(p.at(0)), real(p.at(1))); };
    const auto& lam = j.at("lambda");
    const auto& hess = j.at("hessenberg");
    const auto& coeffs = j.at("coefficients");
    if (lam.size() != std::size_t(n + 1) || hess.size() != std::size_t(n) || coeffs.size() != std::size_t(n + 1))
      throw input_error("basis JSON: array sizes do not match degree");
    for (int k = 0; k <= n; ++k) b.lambda[k] = real(lam[k]);
    for (int k = 0; k < n; ++k)
      for (int r = 0; r <= n; ++r) b.hess(r, k) = cval(hess[k].at(r));
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= n; ++i) b.coeff(k, i) = cval(coeffs[k].at(i));
    b.orthonormality_residual = Real(j.value("orthonormality_residual", 0.0));
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("basis JSON: ") + e.what());
  }
}

}  // namespace bergman
