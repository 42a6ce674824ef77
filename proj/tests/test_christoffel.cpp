#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bergman/christoffel.hpp"
#include "bergman/green.hpp"

using namespace bergman;

namespace {

const double kPi = std::acos(-1.0);

const archipelago_spec& two_disks() {
  static const archipelago_spec a{{disk{{-2, 0}, 1}, disk{{3, 0}, 2.0 / 3}}};
  return a;
}

const bergman_basis<mp512>& two_disk_basis() {
  static const auto b = orthonormalize(compute_moments<mp512>(two_disks(), 121), 120);
  return b;
}

const bergman_basis<double>& two_disk_double() {
  static const auto b = two_disk_basis().convert<double>();
  return b;
}

bergman_basis<double> unit_disk(int n) { return orthonormalize(compute_moments<double>({{disk{{0, 0}, 1}}}, n + 1), n); }

christoffel_field analytic_disk_field(int res) {
  christoffel_field f;
  f.grid = {-1, 1, -1, 1, res, res};
  f.n = 1;
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) f.values.push_back(std::sqrt(kPi) * (1 - std::norm(f.grid.node(i, j))));
  return f;
}

}  // namespace

TEST(LambdaN, UnitDiskExamples) {
  const auto b = unit_disk(200);
  for (int n : {0, 3, 50}) EXPECT_NEAR(lambda_n(b, cplx(0), n), std::sqrt(kPi), 1e-14);
  EXPECT_NEAR(lambda_n(b, cplx(1), 2), std::sqrt(kPi / 6), 1e-14);
  EXPECT_NEAR(lambda_n(b, cplx(1), 2), 0.7236, 1e-4);
  EXPECT_NEAR(lambda_n(b, cplx(0.5), 200), std::sqrt(kPi) * 0.75, 1e-12);
  EXPECT_NEAR(lambda_n(b, cplx(0.5), 200), 1.32934, 1e-5);
  EXPECT_THROW(lambda_n(b, cplx(0), 201), error);
}

TEST(LambdaN, ExteriorDoesNotOverflow) {
  const auto b = unit_disk(300);
  const double z = 10;
  // log of sum_{k<=n} (k+1)/pi z^{2k}, accumulated relative to the top term
  const int n = 300;
  double rel = 0;
  for (int k = 0; k <= n; ++k) rel += (k + 1.0) / (n + 1.0) * std::pow(z, 2.0 * (k - n));
  const double log_expected = -0.5 * (std::log((n + 1) / kPi) + 2 * n * std::log(z) + std::log(rel));
  const double v = lambda_n(b, cplx(z), n);
  ASSERT_GT(v, 0);
  EXPECT_NEAR(std::log(v), log_expected, 1e-10);
}

TEST(Field, SingleNode) {
  const auto f = evaluate_field(unit_disk(4), grid_spec{0, 0, 0, 0, 1, 1}, 3);
  ASSERT_EQ(f.values.size(), 1u);
  EXPECT_NEAR(f.values[0], std::sqrt(kPi), 1e-14);
  EXPECT_THROW(evaluate_field(unit_disk(4), grid_spec{0, 1, 0, 1, 0, 1}, 3), error);
  EXPECT_THROW(evaluate_field(unit_disk(4), grid_spec{}, 5), error);
}

TEST(Field, RefinementKeepsSharedNodes) {
  const auto b = unit_disk(20);
  const auto coarse = evaluate_field(b, grid_spec{-2, 2, -1, 1, 11, 6}, 20);
  const auto fine = evaluate_field(b, grid_spec{-2, 2, -1, 1, 21, 11}, 20);
  for (int j = 0; j < 6; ++j)
    for (int i = 0; i < 11; ++i) EXPECT_EQ(coarse.at(i, j), fine.at(2 * i, 2 * j));
}

TEST(Field, LemniscateRotationSymmetry) {
  const auto b = orthonormalize(compute_moments<mp128>(lemniscate_archipelago(3, 0.9), 31), 30);
  const cplx rot = std::polar(1.0, 2 * kPi / 3);
  const auto f = evaluate_field(b, grid_spec{-1.5, 1.5, -1.5, 1.5, 13, 13}, 30);
  const auto bd = b.convert<double>();
  for (int j = 0; j < 13; ++j)
    for (int i = 0; i < 13; ++i) {
      const double v = f.at(i, j);
      EXPECT_NEAR(lambda_n(bd, f.grid.node(i, j) * rot, 30), v, 1e-8 * v);
    }
}

TEST(Field, PositiveEverywhere) {
  const auto f = evaluate_field(two_disk_basis(), grid_spec{-4, 4, -2, 2, 41, 21}, 100);
  for (double v : f.values) EXPECT_GT(v, 0);
}

TEST(LevelCurves, AnalyticDiskCircle) {
  const auto f = analytic_disk_field(101);
  const auto set = extract_level_curves(f, {std::sqrt(kPi) * 0.51});
  ASSERT_EQ(set.size(), 1u);
  ASSERT_EQ(set[0].lines.size(), 1u);
  EXPECT_TRUE(set[0].lines[0].closed);
  const double cell = f.grid.dx();
  for (const auto& z : set[0].lines[0].points) EXPECT_LT(std::abs(std::abs(z) - 0.7), 2 * cell);
}

TEST(LevelCurves, LevelAboveRangeIsEmpty) {
  const auto f = analytic_disk_field(21);
  const auto set = extract_level_curves(f, {10.0});
  ASSERT_EQ(set.size(), 1u);
  EXPECT_TRUE(set[0].lines.empty());
  EXPECT_THROW(extract_level_curves(f, {-1.0}), error);
}

TEST(LevelCurves, TwoDisksSmallLevel) {
  const auto f = evaluate_field(two_disk_basis(), grid_spec{-4, 4, -2, 2, 200, 100}, 100);
  const auto set = extract_level_curves(f, {0.01}, two_disk_basis());
  ASSERT_EQ(set[0].lines.size(), 2u);
  for (const auto& pl : set[0].lines) EXPECT_TRUE(pl.closed);
  const auto csv = level_curves_to_csv(set);
  EXPECT_EQ(csv.rfind("level,poly_id,x,y\n", 0), 0u);
}

TEST(Reconstruct, UnitDiskCalibration) {
  const auto b = unit_disk(100);
  const auto f = evaluate_field(b, grid_spec{-1.5, 1.5, -1.5, 1.5, 400, 400}, 100);
  const auto r = reconstruct_boundary(f, b);
  EXPECT_EQ(r.method, reconstruction_method::level);
  EXPECT_NEAR(r.level, reconstruction_kappa / 100, 1e-15);
  ASSERT_EQ(r.curves[0].lines.size(), 1u);
  EXPECT_TRUE(r.curves[0].lines[0].closed);
  EXPECT_LT(hausdorff_to_boundary(r.curves[0].lines, {{disk{{0, 0}, 1}}}), 0.02);
  double bias = 0;
  for (const auto& z : r.curves[0].lines[0].points) bias += std::abs(z) - 1;
  EXPECT_LT(std::abs(bias / r.curves[0].lines[0].points.size()), 2e-3);
}

TEST(Reconstruct, KappaValue) {
  EXPECT_NEAR(reconstruction_kappa, 100 * std::sqrt(2 * kPi / (101.0 * 102.0)), 1e-15);
  EXPECT_NEAR(reconstruction_kappa, 2.46961, 1e-5);
}

TEST(Reconstruct, TwoDisks) {
  const auto f = evaluate_field(two_disk_basis(), grid_spec{-4, 4, -2, 2, 400, 400}, 100);
  const auto r = reconstruct_boundary(f, two_disk_basis());
  ASSERT_EQ(r.curves[0].lines.size(), 2u);
  for (const auto& pl : r.curves[0].lines) EXPECT_TRUE(pl.closed);
  EXPECT_LT(hausdorff_to_boundary(r.curves[0].lines, two_disks()), 0.05);

  const auto ridge = reconstruct_boundary(f, two_disk_basis(), reconstruction_method::ridge);
  EXPECT_EQ(ridge.method, reconstruction_method::ridge);
  EXPECT_EQ(method_name(ridge.method), "ridge");
  EXPECT_FALSE(ridge.curves[0].lines.empty());
}

TEST(Reconstruct, LowDegree) {
  const auto f = evaluate_field(two_disk_basis(), grid_spec{-4, 4, -2, 2, 200, 100}, 5);
  try {
    const auto r = reconstruct_boundary(f, two_disk_basis());
    EXPECT_GT(hausdorff_to_boundary(r.curves[0].lines, two_disks()), 0.2);
  } catch (const error& e) {
    EXPECT_EQ(e.kind(), error_kind::precondition);
    EXPECT_NE(std::string(e.what()).find("degree too low"), std::string::npos);
  }
}

TEST(Properties, Monotone) {
  const auto& b = two_disk_double();
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> x(-4, 4), y(-2, 2);
  for (int t = 0; t < 50; ++t) {
    const cplx z(x(rng), y(rng));
    double prev = lambda_n(b, z, 0);
    for (int n = 1; n <= 100; n += 9) {
      const double v = lambda_n(b, z, n);
      EXPECT_LE(v, prev * (1 + 1e-12));
      prev = v;
    }
  }
}

TEST(Properties, InteriorLowerBound) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  const auto unit = unit_disk(100);
  for (int t = 0; t < 200; ++t) {
    const cplx z = std::polar(std::sqrt(u(rng)), 2 * kPi * u(rng));
    EXPECT_LE(std::sqrt(kPi) * (1 - std::abs(z)), lambda_n(unit, z, 100) * (1 + 1e-12));
  }
  const auto& b = two_disk_double();
  for (int t = 0; t < 200; ++t) {
    const auto& d = std::get<disk>(two_disks().islands[t % 2]);
    const cplx z = d.center + d.radius * std::polar(std::sqrt(u(rng)), 2 * kPi * u(rng));
    EXPECT_LE(std::sqrt(kPi) * distance_to_boundary(two_disks(), z), lambda_n(b, z, 100) * (1 + 1e-12));
  }
}

TEST(Properties, DominatedBySingleIsland) {
  const disk d{{-2, 0}, 1};
  const auto single = orthonormalize(compute_moments<mp512>({{d}}, 61), 60).convert<double>();
  const auto& full = two_disk_double();
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const cplx z = d.center + 0.99 * std::polar(std::sqrt(u(rng)), 2 * kPi * u(rng));
    EXPECT_GE(lambda_n(full, z, 60), lambda_n(single, z, 60) - 1e-10);
  }
}

TEST(Properties, BoundaryRate) {
  const disk d{{0.1, -0.05}, 0.7};
  const auto basis = orthonormalize(compute_moments<mp256>({{d}}, 201), 200);
  EXPECT_LT(basis.orthonormality_residual, 1e-8);
  const auto b = basis.convert<double>();
  for (int l = 0; l < 16; ++l) {
    const cplx z = d.center + d.radius * std::polar(1.0, 2 * kPi * l / 16);
    const double v = 200 * lambda_n(b, z, 200);
    EXPECT_LT(std::abs(v / (std::sqrt(2 * kPi) * d.radius) - 1), 0.05);
  }
}

TEST(Properties, ExteriorDecaySlope) {
  const auto gm = fit_green({disk{{-2, 0}, 1}, disk{{3, 0}, 2.0 / 3}}, 12, 256);
  const cplx z(0.5, 6);
  const auto& b = two_disk_double();
  // least-squares slope of log Lambda_n over n = 60..120
  double sn = 0, sl = 0, snn = 0, snl = 0;
  int count = 0;
  for (int n = 60; n <= 120; n += 5) {
    const double l = std::log(lambda_n(b, z, n));
    sn += n;
    sl += l;
    snn += double(n) * n;
    snl += n * l;
    ++count;
  }
  const double slope = (count * snl - sn * sl) / (count * snn - sn * sn);
  const double g = green_eval(gm, z);
  EXPECT_LT(std::abs(slope / -g - 1), 0.05);
}

TEST(Export, FieldCsvAndHeader) {
  const auto f = evaluate_field(unit_disk(2), grid_spec{0, 1, 0, 1, 2, 2}, 2);
  const auto csv = field_to_csv(f);
  EXPECT_EQ(csv.rfind("x,y,value\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  const auto h = field_header(f);
  EXPECT_EQ(h["nx"], 2);
  EXPECT_EQ(h["n"], 2);
}
