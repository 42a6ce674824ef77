#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "scalar.hpp"

namespace bergman {

/// Eigenvalues of an upper Hessenberg complex matrix (row-major n x n) by the
/// single-shift QR algorithm with Wilkinson shifts and deflation.
template <class Real>
std::vector<std::complex<Real>> hessenberg_eigenvalues(std::vector<std::complex<Real>> h, int n,
                                                       int max_iterations_per_eigenvalue = 60) {
  using C = std::complex<Real>;
  using std::abs;
  using std::sqrt;
  auto at = [&](int i, int j) -> C& { return h[std::size_t(i) * n + j]; };
  auto l1 = [](const C& z) { return Real(abs(z.real()) + abs(z.imag())); };
  const Real eps = epsilon<Real>();

  Real matrix_norm = 0;
  for (const auto& x : h) matrix_norm = std::max(matrix_norm, l1(x));

  std::vector<C> eig;
  eig.reserve(n);
  std::vector<C> cs(n), sn(n);
  int hi = n - 1, iter = 0, total_iter = 0;
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(at(0, 0));
      --hi;
      continue;
    }
    int lo = hi;
    for (; lo > 0; --lo) {
      Real scale = l1(at(lo - 1, lo - 1)) + l1(at(lo, lo));
      if (scale == 0) scale = matrix_norm;
      if (l1(at(lo, lo - 1)) <= eps * scale) {
        at(lo, lo - 1) = C(0);
        break;
      }
    }
    if (lo == hi) {
      eig.push_back(at(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++iter > max_iterations_per_eigenvalue)
      throw numerical_error("QR eigenvalue iteration did not converge (" + std::to_string(hi + 1) +
                            " eigenvalues left)");
    ++total_iter;

    C mu;
    if (iter % 10 == 0) {
      // exceptional shift
      mu = at(hi, hi) + C(l1(at(hi, hi - 1)) + (hi >= 2 ? l1(at(hi - 1, hi - 2)) : Real(0)));
    } else {
      const C a = at(hi - 1, hi - 1), b = at(hi - 1, hi), c = at(hi, hi - 1), d = at(hi, hi);
      const C half = (a - d) / Real(2);
      const C disc = sqrt(half * half + b * c);
      const C m1 = (a + d) / Real(2) + disc, m2 = (a + d) / Real(2) - disc;
      mu = abs(m1 - d) < abs(m2 - d) ? m1 : m2;
    }

    for (int k = lo; k <= hi; ++k) at(k, k) -= mu;
    // H - mu I = Q R by Givens rotations on rows
    for (int k = lo; k < hi; ++k) {
      const C x = at(k, k), y = at(k + 1, k);
      const Real r = sqrt(abs2(x) + abs2(y));
      if (r == 0) {
        cs[k] = C(1);
        sn[k] = C(0);
        continue;
      }
      const C g11 = std::conj(x) / r, g12 = std::conj(y) / r, g21 = -y / r, g22 = x / r;
      cs[k] = x / r;
      sn[k] = y / r;
      for (int j = k; j <= hi; ++j) {
        const C u = at(k, j), v = at(k + 1, j);
        at(k, j) = g11 * u + g12 * v;
        at(k + 1, j) = g21 * u + g22 * v;
      }
      at(k + 1, k) = C(0);
    }
    // R Q
    for (int k = lo; k < hi; ++k) {
      const C p = cs[k], q = sn[k];
      for (int i = lo; i <= std::min(k + 1, hi); ++i) {
        const C u = at(i, k), v = at(i, k + 1);
        at(i, k) = u * p + v * q;
        at(i, k + 1) = -u * std::conj(q) + v * std::conj(p);
      }
    }
    for (int k = lo; k <= hi; ++k) at(k, k) += mu;
  }
  return eig;
}

/// Roots of a monic polynomial (coefficients constant term first) as
/// eigenvalues of its companion matrix.
template <class Real>
std::vector<std::complex<Real>> companion_roots(const std::vector<std::complex<Real>>& monic) {
  using C = std::complex<Real>;
  const int n = int(monic.size()) - 1;
  if (n < 1) return {};
  std::vector<C> h(std::size_t(n) * n, C(0));
  for (int j = 0; j < n; ++j) h[j] = -monic[n - 1 - j] / monic[n];
  for (int i = 1; i < n; ++i) h[std::size_t(i) * n + i - 1] = C(1);
  return hessenberg_eigenvalues(std::move(h), n, 200);
}

}  // namespace bergman
