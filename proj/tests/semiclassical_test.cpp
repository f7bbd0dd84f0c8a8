#include <gtest/gtest.h>

#include <cmath>

#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/semiclassical.hpp"
#include "oracles.hpp"

using namespace butterfly_lab;
using oracle::kPi;

namespace {

const double kS3 = std::sqrt(3.0);

// (x, xi) with p_triangle = -3/2, -1 and 0.
constexpr double kMinX = 2 * std::numbers::pi / 3, kMinXi = -2 * std::numbers::pi / 3;
constexpr double kMinusOneX = std::numbers::pi, kMinusOneXi = 0.0;
constexpr double kZeroX = 2 * std::numbers::pi / 3, kZeroXi = 0.0;

std::vector<double> eigen_sorted(const ComplexMatrix& m) { return oracle::schur_eigenvalues(m); }

}  // namespace

TEST(PTriangle, Examples) {
  EXPECT_DOUBLE_EQ(p_triangle(0, 0), 3.0);
  EXPECT_NEAR(p_triangle(kMinX, kMinXi), -1.5, 1e-15);
  EXPECT_NEAR(p_triangle(kPi, 0), -1.0, 1e-15);
  EXPECT_NEAR(p_triangle(kZeroX, kZeroXi), 0.0, 1e-15);
}

TEST(PTriangle, RangeOnDenseGrid) {
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 300; ++j) {
      const double v = p_triangle(2 * kPi * i / 300, 2 * kPi * j / 300);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  EXPECT_GE(lo, -1.5 - 1e-12);
  EXPECT_LE(hi, 3.0 + 1e-12);
  EXPECT_NEAR(lo, -1.5, 1e-12);  // 300 is divisible by 3, so the minimiser is on the grid
}

TEST(HouSymbol, CharacteristicPolynomialAtZeroH) {
  oracle::Gen gen(71);
  for (int i = 0; i < 30; ++i) {
    const double x = gen.angle(), xi = gen.angle();
    const ComplexMatrix m = hou_symbol({x, xi, 0.0});
    EXPECT_TRUE(is_hermitian(m));
    const auto c = oracle::faddeev_leverrier(m);
    const double p = p_triangle(x, xi);
    EXPECT_NEAR(static_cast<double>(c[3].real()), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(std::abs(c[2])), 0.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(c[1].real()), -(6 + 2 * p), 1e-12);
    EXPECT_NEAR(static_cast<double>(std::abs(c[0])), 0.0, 1e-12);
  }
}

TEST(HouSymbol, ConstantTermWithH) {
  oracle::Gen gen(72);
  for (int i = 0; i < 30; ++i) {
    const SymbolPoint pt{gen.angle(), gen.angle(), gen.uniform(-1, 1)};
    const auto c = oracle::faddeev_leverrier(hou_symbol(pt));
    const double p = p_triangle(pt.x, pt.xi);
    EXPECT_NEAR(static_cast<double>(c[0].real()), -4 * std::sin(3 * pt.h / 8) * (1 + p), 1e-12);
    EXPECT_NEAR(static_cast<double>(c[1].real()), -(6 + 2 * p), 1e-12);
  }
}

TEST(HouSymbol, OriginSpectrum) {
  const auto ev = eigen_sorted(hou_symbol({0, 0, 0}));
  EXPECT_NEAR(ev[0], -2 * kS3, 1e-12);
  EXPECT_NEAR(ev[1], 0.0, 1e-12);
  EXPECT_NEAR(ev[2], 2 * kS3, 1e-12);
  EXPECT_NEAR(middle_eigenvalue({0, 0, 0}), 0.0, 1e-12);
}

TEST(KernelVector, Examples) {
  const Eigen::Vector3cd e = kernel_vector(0, 0);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(e(k) - 1.0 / kS3), 0.0, 1e-15);
  const Eigen::Vector3cd f = kernel_vector(kPi, kPi);
  EXPECT_NEAR(std::abs(f(0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f(1) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f(2)), 0.0, 1e-15);
}

TEST(KernelVector, UnitAndAnnihilated) {
  oracle::Gen gen(73);
  for (int i = 0; i < 50; ++i) {
    const double x = gen.angle(), xi = gen.angle();
    const Eigen::Vector3cd e = kernel_vector(x, xi);
    EXPECT_NEAR(e.norm(), 1.0, 1e-14);
    EXPECT_LT((hou_symbol({x, xi, 0}) * e).norm(), 1e-12);
  }
}

TEST(BlockDiagonalizer, OriginAndMinimum) {
  const auto check = [](double x, double xi, double a, double b) {
    const Eigen::Matrix3cd u = block_diagonalizer(x, xi);
    const Eigen::Matrix3cd d = u.adjoint() * hou_symbol({x, xi, 0}) * u;
    EXPECT_LT(std::abs(d(0, 0)), 1e-12);
    ComplexMatrix block = d.bottomRightCorner(2, 2);
    const auto ev = eigen_sorted(block);
    EXPECT_NEAR(ev[0], a, 1e-12);
    EXPECT_NEAR(ev[1], b, 1e-12);
  };
  check(0, 0, -2 * kS3, 2 * kS3);
  check(kMinX, kMinXi, -kS3, kS3);
}

TEST(BlockDiagonalizer, UnitaryBlockDiagonalOnRandomPoints) {
  oracle::Gen gen(74);
  const double eps = 1e-9;
  for (int i = 0; i < 50; ++i) {
    const double x = gen.angle(), xi = gen.angle();
    const Eigen::Matrix3cd u = block_diagonalizer(x, xi);
    EXPECT_LT(oracle::unitarity_defect(u), 1e-12);
    EXPECT_LT((u.col(0) - kernel_vector(x, xi)).norm(), 1e-14);
    const Eigen::Matrix3cd d = u.adjoint() * hou_symbol({x, xi, 0}) * u;
    for (int k = 0; k < 3; ++k) {
      EXPECT_LT(std::abs(d(0, k)), 1e-12);
      EXPECT_LT(std::abs(d(k, 0)), 1e-12);
    }
    for (double v : eigen_sorted(d.bottomRightCorner(2, 2))) {
      const double a = std::abs(v);
      EXPECT_GE(a, kS3 - eps);
      EXPECT_LE(a, 2 * kS3 + eps);
    }
  }
}

TEST(MiddleEigenDerivative, Examples) {
  EXPECT_NEAR(middle_eigen_derivative(0, 0), -0.5, 1e-15);
  EXPECT_NEAR(middle_eigen_derivative(kMinusOneX, kMinusOneXi), 0.0, 1e-15);
  EXPECT_NEAR(middle_eigen_derivative(kMinX, kMinXi), 0.25, 1e-14);
}

TEST(MiddleEigenDerivative, MatchesFiniteDifferences) {
  oracle::Gen gen(75);
  for (int i = 0; i < 50; ++i) {
    const double x = gen.angle(), xi = gen.angle();
    EXPECT_NEAR(middle_eigen_derivative(x, xi), middle_eigen_derivative_fd(x, xi), 1e-6);
  }
}

TEST(Subprincipal, Examples) {
  EXPECT_NEAR(subprincipal(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(subprincipal(kMinX, kMinXi), -0.75, 1e-14);
  EXPECT_NEAR(subprincipal(kZeroX, kZeroXi), -0.25, 1e-14);
}

TEST(Subprincipal, DecompositionOnRandomPoints) {
  oracle::Gen gen(76);
  for (int i = 0; i < 50; ++i) {
    const double x = gen.angle(), xi = gen.angle();
    const double p = p_triangle(x, xi);
    EXPECT_NEAR(kernel_correction(x, xi), p / (3 + p), 1e-15);
    EXPECT_NEAR(kernel_correction_fd(x, xi), kernel_correction(x, xi), 1e-5);
    EXPECT_NEAR(subprincipal(x, xi), middle_eigen_derivative(x, xi) + kernel_correction(x, xi), 1e-14);
    EXPECT_NEAR(subprincipal(x, xi), -(3 - p) / (4 * (3 + p)), 1e-14);
  }
}

TEST(Subprincipal, SignalsWhenCheckCannotHold) {
  EXPECT_THROW(subprincipal(0.3, 1.1, 0.0), NumericalError);
}

TEST(SubprincipalReport, SixtyFourGrid) {
  const SubprincipalReport r = subprincipal_report(64);
  EXPECT_EQ(r.grid, 64);
  EXPECT_LT(r.max_derivative_error, 1e-6);
  EXPECT_LT(r.max_correction_error, 1e-5);
  EXPECT_LT(r.max_decomposition_error, 1e-5);
  EXPECT_NEAR(r.min_subprincipal, -0.75, 1e-6);
  EXPECT_NEAR(r.max_subprincipal, 0.0, 1e-6);
  EXPECT_LE(r.min_subprincipal, r.grid_min_subprincipal);
  EXPECT_LT(r.max_kernel_block, 1e-12);
  EXPECT_LT(r.max_block_spectrum_violation, 1e-9);
  EXPECT_LT(r.max_unitarity_defect, 1e-12);
  EXPECT_LT(r.max_u0_jump, 0.5);
  EXPECT_GT(r.middle_gap_margin, 0.0);
  const auto j = to_json(r);
  EXPECT_TRUE(j.contains("min_subprincipal"));
}

TEST(SubprincipalReport, CoarseGridStillFindsMinimum) {
  const SubprincipalReport r = subprincipal_report(8);
  EXPECT_NEAR(r.min_subprincipal, -0.75, 0.02);
}

TEST(EffectiveBandHull, PositiveH) {
  const BandHull hull = effective_band_hull(0.01, 128);
  EXPECT_NEAR(hull.lo, -0.0075, 1e-4);
  EXPECT_NEAR(hull.hi, 0.0, 1e-4);
  EXPECT_LT(hull.eigen_lo, hull.eigen_hi);
  EXPECT_GT(hull.c_empirical, 0.0);
  EXPECT_TRUE(to_json(hull).contains("c_empirical"));
}

TEST(EffectiveBandHull, NegativeHIsReflected) {
  const BandHull hull = effective_band_hull(-0.01, 128);
  EXPECT_NEAR(hull.lo, 0.0, 1e-4);
  EXPECT_NEAR(hull.hi, 0.0075, 1e-4);
}

TEST(EffectiveBandHull, RejectsOutOfRange) {
  EXPECT_THROW(effective_band_hull(0.0, 64), std::invalid_argument);
  EXPECT_THROW(effective_band_hull(0.3, 64), std::invalid_argument);
  EXPECT_THROW(effective_band_hull(0.01, 4), std::invalid_argument);
}

TEST(HullRefinement, WidthOverHTendsToThreeQuarters) {
  const HullRefinement r = hull_refinement({0.02, 0.01, 0.005}, 128);
  ASSERT_EQ(r.width_ratio.size(), 3u);
  EXPECT_NEAR(r.extrapolated, 0.75, 0.02 * 0.75);
  for (double w : r.width_ratio) EXPECT_NEAR(w, 0.75, 0.05);
  EXPECT_TRUE(to_json(r).contains("extrapolated"));
  EXPECT_THROW(hull_refinement({0.02}, 16), std::invalid_argument);
  EXPECT_THROW(hull_refinement({0.01, 0.02}, 16), std::invalid_argument);
}
