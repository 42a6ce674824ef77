#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bergman/basis.hpp"
#include "bergman/green.hpp"

using namespace bergman;

namespace {

const double kPi = std::acos(-1.0);

const std::vector<disk> two_disks{disk{{-2, 0}, 1}, disk{{3, 0}, 2.0 / 3}};
const std::vector<disk> symmetric{disk{{-2, 0}, 1}, disk{{2, 0}, 1}};
const std::vector<disk> three_disks{disk{{-1, 0}, 0.5}, disk{{2, 0}, 1}, disk{{0, 2}, 0.5}};

const green_model& two_disk_model() {
  static const auto gm = fit_green(two_disks, 12, 80);
  return gm;
}

}  // namespace

TEST(FitGreen, SingleDisk) {
  for (double r : {0.5, 1.0, 3.0}) {
    const auto gm = fit_green({disk{{0, 0}, r}}, 4, 64);
    EXPECT_NEAR(gm.d[0], 1, 1e-15);
    EXPECT_NEAR(gm.c0, -std::log(r), 1e-12);
    EXPECT_NEAR(gm.capacity(), r, 1e-12);
    for (const auto& a : gm.alpha[0]) EXPECT_LT(std::abs(a), 1e-12);
  }
}

TEST(FitGreen, SymmetricWeights) {
  const auto gm = fit_green(symmetric, 8, 128);
  EXPECT_NEAR(gm.d[0], 0.5, 1e-8);
  EXPECT_NEAR(gm.d[1], 0.5, 1e-8);
  EXPECT_EQ(gm.d[0] + gm.d[1], 1);
}

TEST(FitGreen, TwoDiskResidual) {
  const auto& gm = two_disk_model();
  EXPECT_EQ(gm.K, 12);
  EXPECT_LT(gm.residual, 1e-8);
  for (double d : gm.d) {
    EXPECT_GT(d, 0);
    EXPECT_LT(d, 1);
  }
}

TEST(FitGreen, Errors) {
  EXPECT_THROW(fit_green({}, 4, 64), error);
  EXPECT_THROW(fit_green(two_disks, 12, 40), error);
  EXPECT_THROW(fit_green({disk{{0, 0}, 1}, disk{{1, 0}, 1}}, 4, 64), error);
  try {
    fit_green(two_disks, 4, 64, green_fit_options{1e-30, 8});
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::numerical);
    EXPECT_NE(std::string(e.what()).find("residuals:"), std::string::npos);
  }
  EXPECT_THROW(fit_green_points({0, 0}, {1, 1}, {{1, cplx(0, 1), -1, cplx(0, -1)}, {1, cplx(0, 1), -1, cplx(0, -1)}}, 0),
               error);
}

TEST(GreenEval, Examples) {
  const auto unit = fit_green({disk{{0, 0}, 1}}, 4, 64);
  EXPECT_NEAR(green_eval(unit, cplx(std::exp(1.0))), 1, 1e-12);
  const auto& gm = two_disk_model();
  const cplx far(0.6e8, 0.8e8);
  EXPECT_NEAR(green_eval(gm, far) - std::log(std::abs(far)) - gm.c0, 0, 1e-6);
  for (const auto& d : two_disks)
    for (int l = 0; l < 7; ++l)
      EXPECT_LT(std::abs(detail::green_value(gm, d.center + std::polar(d.radius, 0.3 + l))), 1e-8);
  EXPECT_THROW(green_eval(gm, cplx(-2, 0.5)), error);
  EXPECT_THROW(green_eval(gm, cplx(-1, 0)), error);
}

TEST(GreenEval, MaximumPrinciple) {
  const auto& gm = two_disk_model();
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> x(-6, 6), y(-4, 4);
  int tested = 0;
  while (tested < 300) {
    const cplx z(x(rng), y(rng));
    if (std::abs(z - two_disks[0].center) <= 1 || std::abs(z - two_disks[1].center) <= 2.0 / 3) continue;
    EXPECT_GT(green_eval(gm, z), 0);
    ++tested;
  }
  for (int l = 0; l < 8; ++l) {
    const cplx dir = std::polar(1.0, 2 * kPi * l / 8 + 0.2);
    double prev = green_eval(gm, 6.0 * dir);
    for (double t = 7; t < 40; t += 1) {
      const double g = green_eval(gm, t * dir);
      EXPECT_GT(g, prev);
      prev = g;
    }
  }
}

TEST(Periods, SymmetricAndFlux) {
  const auto ps = periods(fit_green(symmetric, 16, 128));
  EXPECT_NEAR(ps.b[0], 0.5, 1e-8);
  EXPECT_NEAR(ps.b[1], 0.5, 1e-8);
  const auto p2 = periods(two_disk_model());
  EXPECT_EQ(p2.b[0] + p2.b[1], 1);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(p2.flux[j], p2.b[j], 1e-6);
}

TEST(CriticalLevels, SymmetricDisks) {
  const auto gm = fit_green(symmetric, 16, 128);
  const auto cl = critical_levels(gm);
  ASSERT_EQ(cl.saddles.size(), 1u);
  EXPECT_LT(std::abs(cl.saddles[0].z), 1e-8);
  EXPECT_NEAR(cl.r_prime, std::exp(green_eval(gm, cplx(0))), 1e-10);
  EXPECT_EQ(cl.r_prime, cl.r_double_prime);
  EXPECT_NEAR(cl.island_levels[0], cl.r_prime, 1e-12);
  EXPECT_NEAR(cl.island_levels[1], cl.r_prime, 1e-12);
}

TEST(CriticalLevels, SingleDiskRejected) {
  EXPECT_THROW(critical_levels(fit_green({disk{{0, 0}, 1}}, 4, 64)), error);
}

TEST(CriticalLevels, ThreeDisks) {
  const auto gm = fit_green(three_disks, 12, 128);
  const auto cl = critical_levels(gm);
  ASSERT_EQ(cl.saddles.size(), 2u);
  EXPECT_LT(cl.r_prime, cl.r_double_prime);
  for (const auto& s : cl.saddles) {
    EXPECT_LT(std::abs(detail::green_derivative(gm, s.z)), 1e-10);
    EXPECT_EQ(s.islands.size(), 2u);
  }
  EXPECT_EQ(*std::min_element(cl.island_levels.begin(), cl.island_levels.end()), cl.r_prime);
  EXPECT_EQ(cl.island_levels[0], cl.r_double_prime);
  EXPECT_EQ(cl.island_levels[1], cl.r_prime);
  EXPECT_EQ(cl.island_levels[2], cl.r_prime);
}

TEST(LevelCurve, SingleDiskCircle) {
  const auto gm = fit_green({disk{{1, -1}, 0.5}}, 4, 64);
  const auto lines = level_curve(gm, 2.0, level_curve_options{200, false});
  ASSERT_EQ(lines.size(), 1u);
  const double cell = green_frame(gm, 2.0, 200).cell_diagonal();
  for (const auto& z : lines[0].points) EXPECT_LT(std::abs(std::abs(z - cplx(1, -1)) - 1.0), cell);
  const auto refined = level_curve(gm, 2.0);
  for (const auto& z : refined[0].points) EXPECT_NEAR(std::abs(z - cplx(1, -1)), 1.0, 1e-10);
}

TEST(LevelCurve, Topology) {
  const auto& gm = two_disk_model();
  const auto cl = critical_levels(gm);
  const auto low = level_curve(gm, 1 + (cl.r_prime - 1) / 2);
  EXPECT_EQ(low.size(), 2u);
  const auto high = level_curve(gm, cl.r_double_prime * 1.2);
  ASSERT_EQ(high.size(), 1u);
  EXPECT_TRUE(high[0].closed);
  for (const auto& pl : low) EXPECT_TRUE(pl.closed);
  EXPECT_THROW(level_curve(gm, cl.r_prime), error);
  EXPECT_THROW(level_curve(gm, 0.9), error);

  const auto g3 = fit_green(three_disks, 12, 128);
  const auto c3 = critical_levels(g3);
  EXPECT_EQ(level_curve(g3, 1 + (c3.r_prime - 1) / 2).size(), 3u);
  EXPECT_EQ(level_curve(g3, (c3.r_prime + c3.r_double_prime) / 2).size(), 2u);
  EXPECT_EQ(level_curve(g3, c3.r_double_prime * 1.1).size(), 1u);
}

TEST(LevelCurve, CapacityScalesWithLevel) {
  const auto& gm = two_disk_model();
  const double R = 2;
  const auto lines = level_curve(gm, R);
  ASSERT_EQ(lines.size(), 1u);
  std::vector<std::vector<cplx>> nodes{lines[0].points, {}};
  const auto refit = fit_green_points(gm.centers, gm.radii, nodes, 12);
  EXPECT_LT(std::abs(refit.capacity() / (R * gm.capacity()) - 1), 1e-4);
}

TEST(Capacity, MatchesBergmanEstimate) {
  const archipelago_spec arch{{two_disks[0], two_disks[1]}};
  const auto b = orthonormalize(compute_moments<mp512>(arch, 101), 100);
  const double est = estimate_capacity(b).normalized;
  const double cap = two_disk_model().capacity();
  EXPECT_LT(std::abs(est - cap) / cap, 0.02);
}

TEST(GreenJson, RoundTrip) {
  const auto& gm = two_disk_model();
  const auto j = green_to_json(gm);
  EXPECT_NEAR(j["capacity"].get<double>(), gm.capacity(), 1e-15);
  const auto back = green_from_json(nlohmann::json::parse(j.dump()));
  for (double x : {4.0, -0.5, 7.5}) EXPECT_NEAR(detail::green_value(back, cplx(x, 1.3)), detail::green_value(gm, cplx(x, 1.3)), 1e-13);
  EXPECT_THROW(green_from_json(nlohmann::json::parse("{\"centers\":[]}")), error);
}
