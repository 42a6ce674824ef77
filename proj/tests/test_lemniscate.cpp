#include <gtest/gtest.h>

#include <cmath>

#include "bergman/basis.hpp"
#include "bergman/lemniscate.hpp"

using namespace bergman;

namespace {

const double kPi = std::acos(-1.0);
const lemniscate_spec spec{3, 0.9};

const szego_basis<mp256>& szego(int s) {
  static const auto s0 = lemniscate_szego<mp256>(spec, 0, 201);
  static const auto s1 = lemniscate_szego<mp256>(spec, 1, 201);
  return s == 0 ? s0 : s1;
}

// c_l = sum_j a_j a_{j+l} gamma^{2j+l}, a_j = binom(-tau/2, j)
std::vector<double> series_moments(double gamma, double tau, int K) {
  std::vector<double> a(400);
  a[0] = 1;
  for (int j = 1; j < 400; ++j) a[j] = a[j - 1] * (-tau / 2 - (j - 1)) / j;
  std::vector<double> c(K + 1, 0);
  for (int l = 0; l <= K; ++l)
    for (int j = 0; j + l < 400; ++j) c[l] += a[j] * a[j + l] * std::pow(gamma, 2 * j + l);
  return c;
}

double table_normalized(double lambda, int n) { return lambda * std::pow(0.9, n + 1) * std::sqrt(kPi / (n + 1)); }

}  // namespace

TEST(Spec, Tau) {
  EXPECT_NEAR(spec.tau(0), 4.0 / 3, 1e-15);
  EXPECT_NEAR(spec.tau(1), 2.0 / 3, 1e-15);
  EXPECT_NEAR(spec.tau(2), 0, 1e-15);
  EXPECT_THROW((lemniscate_spec{1, 0.5}.check()), error);
  EXPECT_THROW((lemniscate_spec{3, 1.0}.check()), error);
}

TEST(GammaFunction, Oracles) {
  EXPECT_NEAR(gamma_function(0.5), std::sqrt(kPi), 1e-13);
  EXPECT_NEAR(gamma_function(1), 1, 1e-13);
  EXPECT_NEAR(gamma_function(2.0 / 3) * gamma_function(1.0 / 3), 2 * kPi / std::sqrt(3.0), 1e-12);
  for (double x : {0.1, 0.7, 1.3, 4.5, 10.0, -0.5}) EXPECT_NEAR(gamma_function(x) / std::tgamma(x), 1, 1e-12) << x;
}

TEST(ExactTop, Examples) {
  const auto t0 = exact_top_subsequence<double>(spec, 0);
  ASSERT_EQ(t0.monic.size(), 3u);
  EXPECT_EQ(t0.monic[2], 1);
  EXPECT_EQ(t0.monic[0], 0);
  EXPECT_NEAR(t0.lambda, std::sqrt(3 / (kPi * std::pow(0.9, 6))), 1e-14);
  const auto t12 = exact_top_subsequence<double>(spec, 12);
  EXPECT_NEAR(t12.lambda, 214.535664, 5e-7);
  const auto m2 = exact_top_subsequence<double>(lemniscate_spec{2, 0.5}, 1);
  EXPECT_EQ(m2.monic, (std::vector<double>{0, -1, 0, 1}));
}

TEST(ToeplitzMoments, FlatWeight) {
  for (const auto& c : {toeplitz_moments<double>(0.729, 0, 10), toeplitz_moments<double>(1e-20, 4.0 / 3, 10)}) {
    EXPECT_NEAR(c[0], 1, 1e-14);
    for (int l = 1; l <= 10; ++l) EXPECT_NEAR(c[l], 0, 1e-14);
  }
  EXPECT_THROW(toeplitz_moments<double>(1.0, 1, 3), error);
}

TEST(ToeplitzMoments, SeriesOracle) {
  const auto c = toeplitz_moments<double>(0.729, 4.0 / 3, 40);
  const auto o = series_moments(0.729, 4.0 / 3, 40);
  for (int l = 0; l <= 40; ++l) EXPECT_NEAR(c[l], o[l], 1e-12 * o[0]) << l;
  EXPECT_NO_THROW(szego_polynomials(c, 0.729, 4.0 / 3, 40));
}

TEST(SzegoMonic, FlatWeightGivesPowers) {
  const auto c = toeplitz_moments<double>(0.729, 0, 6);
  const auto r = szego_monic(c, 0.729, 5);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(r.monic[i], 0, 1e-14);
  EXPECT_EQ(r.monic[5], 1);
}

TEST(SzegoMonic, EvenTauFactor) {
  const double g = 0.729;
  const auto c = toeplitz_moments<mp128>(mp128(g), mp128(2), 8);
  for (int k = 1; k <= 7; ++k) {
    const auto r = szego_monic(c, mp128(g), k);
    // w^{k-1} (w + gamma)
    for (int i = 0; i <= k; ++i) {
      const double expected = i == k ? 1 : (i == k - 1 ? g : 0);
      EXPECT_NEAR(to_double(r.monic[i]), expected, 1e-20);
    }
    EXPECT_NEAR(to_double(r.at_minus_gamma), 0, 1e-20);
  }
}

TEST(SzegoMonic, SignPattern) {
  for (int s = 0; s <= 1; ++s)
    for (int k = 0; k <= 200; ++k) {
      const double v = to_double(szego(s).at_minus_gamma[k]);
      EXPECT_GT(k % 2 ? -v : v, 0) << s << "," << k;
    }
}

TEST(BergmanFromSzego, MatchesMomentPipeline) {
  const auto b = orthonormalize(compute_moments<mp256>(lemniscate_archipelago(3, 0.9), 33), 32);
  for (int s = 0; s <= 1; ++s) {
    mp256 rem;
    const auto p = bergman_from_szego(spec, s, 10, szego(s), &rem);
    EXPECT_LT(to_double(rem), 1e-10);
    const auto q = monic_coefficients(b, 30 + s);
    ASSERT_EQ(p.size(), q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_LT(to_double(abs(q[i] - std::complex<mp256>(p[i]))), 1e-8 * (1 + to_double(abs(p[i])))) << s << "," << i;
      if (int(i) % 3 != s) EXPECT_EQ(p[i], 0);
    }
  }
}

TEST(BergmanFromSzego, SmallLemniscate) {
  const lemniscate_spec sp{2, 0.5};
  const auto sb = lemniscate_szego<mp256>(sp, 0, 21);
  const auto b = orthonormalize(compute_moments<mp256>(lemniscate_archipelago(2, 0.5), 42), 41);
  for (int k = 0; k <= 20; k += 5) {
    const auto p = bergman_from_szego(sp, 0, k, sb);
    const auto q = monic_coefficients(b, 2 * k);
    for (std::size_t i = 0; i < p.size(); ++i)
      EXPECT_LT(to_double(abs(q[i] - std::complex<mp256>(p[i]))), 1e-8 * (1 + to_double(abs(p[i])))) << k << "," << i;
  }
}

TEST(BergmanFromSzego, Rejections) {
  EXPECT_THROW(bergman_from_szego(spec, 2, 5, szego(0)), error);
  EXPECT_THROW(bergman_from_szego(spec, 0, 201, szego(0)), error);
  const auto c = toeplitz_moments<mp128>(mp128(0.729), mp128(2), 8);
  const auto sb = szego_polynomials(c, mp128(0.729), mp128(2), 8);
  EXPECT_THROW(bergman_from_szego(lemniscate_spec{3, 0.9}, 0, 3, sb), error);
}

TEST(LambdaFromSzego, TableOne) {
  const double table[] = {214.535664, 305.078943, 305.314216, 305.396681, 433.231373,
                          433.526043, 433.629077, 613.834469, 614.205506, 614.334958,
                          868.011830, 868.481244, 868.644692, 1225.297855, 1225.894247};
  const double normalized[] = {1.000000, 1.263740, 1.124276, 1.000000, 1.261795, 1.123400, 1.000000, 1.260094,
                               1.122633, 1.000000, 1.258593, 1.121956, 1.000000, 1.257261, 1.121355};
  for (int n = 38; n <= 52; ++n) {
    const int k = n / 3, s = n % 3;
    const double lambda = s == 2 ? to_double(exact_top_subsequence<mp256>(spec, k).lambda)
                                 : to_double(lambda_from_szego(spec, s, k, szego(s)));
    EXPECT_LT(std::abs(lambda / table[n - 38] - 1), 1e-8) << n;
    EXPECT_NEAR(table_normalized(lambda, n), normalized[n - 38], 2e-6) << n;
  }
}

TEST(Predictors, LambdaLimit) {
  EXPECT_NEAR(predict_lambda_limit(spec, 0), 1.2345679, 1e-7);
  EXPECT_NEAR(predict_lambda_limit(spec, 1), 1.1111111, 1e-7);
  EXPECT_EQ(predict_lambda_limit(spec, 2), 1);
  EXPECT_THROW(predict_lambda_limit(spec, 3), error);
  for (int s = 0; s <= 1; ++s) {
    const int k = 200, n = 3 * k + s;
    const double v = table_normalized(to_double(lambda_from_szego(spec, s, k, szego(s))), n);
    EXPECT_LT(std::abs(v / predict_lambda_limit(spec, s) - 1), 0.01) << s;
  }
}

TEST(Predictors, ExteriorRatio) {
  EXPECT_NEAR(std::abs(predict_exterior_ratio(spec, 0, cplx(1e8, 3e7)) - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(predict_exterior_ratio(spec, 2, cplx(0.3, 1.7)) - 1.0), 0, 1e-15);
  const cplx expected = std::pow((7 + std::pow(0.9, 6)) / 7, 2.0 / 3);
  EXPECT_NEAR(std::abs(predict_exterior_ratio(spec, 0, cplx(2)) - expected), 0, 1e-14);
  const auto p = eval_bergman_from_szego(spec, 0, 100, szego(0), std::complex<mp256>(2));
  const double ratio = to_double(p.real() / pow(mp256(7), 100));
  EXPECT_LT(std::abs(ratio / expected.real() - 1), 0.01);
  EXPECT_THROW(predict_exterior_ratio(spec, 0, cplx(1.0)), error);
}

TEST(Predictors, PiValue) {
  const double expected = std::sin(2 * kPi / 3) * gamma_function(2.0 / 3) / kPi;
  EXPECT_NEAR(predict_pi_value(spec, 0), expected, 1e-14);
  EXPECT_EQ(predict_pi_value(spec, 2), 1);
  const int k = 200;
  for (int s = 0; s <= 1; ++s) {
    const double tau = spec.tau(s);
    const double scaled = to_double(szego(s).at_minus_gamma[k] * pow(mp256(k), tau / 2) / pow(szego(s).gamma, k));
    EXPECT_LT(std::abs(scaled / predict_pi_value(spec, s) - 1), 0.02) << s;
    const double ratio = to_double(szego(s).at_minus_gamma[k + 1] / szego(s).at_minus_gamma[k]);
    EXPECT_LT(std::abs(ratio / predict_pi_ratio(spec, s, k) - 1), 0.01) << s;
  }
}

TEST(Predictors, InteriorLimit) {
  const int k = 150;
  for (int s = 0; s <= 1; ++s)
    for (int j = 0; j < 3; ++j)
      for (double t : {0.0, 0.2}) {
        const cplx z = std::pow(1.0 + cplx(t, 0.1), 1.0 / 3) * std::polar(1.0, 2 * kPi * j / 3);
        const auto p = eval_bergman_from_szego(spec, s, k, szego(s), std::complex<mp256>(z.real(), z.imag()));
        const double tau = spec.tau(s);
        const auto scale = pow(mp256(k), 2 + tau / 2) / pow(mp256(0.9), 3 * (2 * k + 4));
        const cplx scaled = to_double(p * scale) * double(k % 2 ? 1 : -1);
        const cplx limit = predict_interior_limit(spec, s, j, z);
        EXPECT_LT(std::abs(scaled - limit) / std::abs(limit), 0.05) << s << "," << j << "," << t;
      }
  EXPECT_THROW(predict_interior_limit(spec, 0, 0, cplx(2)), error);
  EXPECT_THROW(predict_interior_limit(spec, 2, 0, cplx(1)), error);
}
