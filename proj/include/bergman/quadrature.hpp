#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "scalar.hpp"

namespace bergman {

template <class Real>
struct gauss_rule {
  std::vector<Real> nodes;  // ascending, in (-1, 1)
  std::vector<Real> weights;
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
template <class Real>
void legendre_with_derivative(int n, const Real& x, Real& p, Real& dp) {
  Real p0 = 1, p1 = x;
  if (n == 0) {
    p = 1;
    dp = 0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1);
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1,1], nodes refined by Newton at the
/// working precision. Rules are cached per (type, n).
template <class Real>
const gauss_rule<Real>& gauss_legendre(int n) {
  static std::map<int, gauss_rule<Real>> cache;
  static std::mutex guard;
  std::lock_guard<std::mutex> lock(guard);
  if (auto it = cache.find(n); it != cache.end()) return it->second;

  gauss_rule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Real tol = epsilon<Real>() * 4;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess for the i-th largest root
    const double theta = std::acos(-1.0) * (4.0 * i + 3) / (4.0 * n + 2);
    Real x = std::cos(theta) * (1 - (n - 1.0) / (8.0 * n * n * n));
    Real p, dp;
    for (int it = 0; it < 100; ++it) {
      detail::legendre_with_derivative(n, x, p, dp);
      const Real dx = p / dp;
      x -= dx;
      using std::abs;
      if (abs(dx) <= tol) break;
    }
    detail::legendre_with_derivative(n, x, p, dp);
    const Real w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace bergman
