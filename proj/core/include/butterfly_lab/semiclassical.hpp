#pragma once

#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "butterfly_lab/lattice.hpp"

// Hou model at omega = 0, gamma = 4 pi + h: the 3x3 symbol M(x, xi, h), its kernel
// vector at h = 0 and the subprincipal symbol of the reduced scalar operator.
namespace butterfly_lab {

struct SymbolPoint {
  double x = 0.0;
  double xi = 0.0;
  double h = 0.0;
};

// cos x + cos xi + cos(x - xi), range [-3/2, 3].
double p_triangle(double x, double xi);

ComplexMatrix hou_symbol(const SymbolPoint& pt);

// Second of the three sorted eigenvalues of hou_symbol.
double middle_eigenvalue(const SymbolPoint& pt);

// Unit kernel vector of M(x, xi, 0) in the fixed gauge alpha * (1 + e^{-ix}, 1 + e^{i(x - xi)}, 1 + e^{i xi}).
Eigen::Vector3cd kernel_vector(double x, double xi);

// U0 = (e0, f, g) with f built from the real unitary B whose first row is (1, 1, 1)/sqrt 3
// and g = conj(e0 x f).
Eigen::Matrix3cd block_diagonalizer(double x, double xi);

// Closed form -3 (1 + p) / (4 (3 + p)).
double middle_eigen_derivative(double x, double xi);
// Central difference of middle_eigenvalue in h.
double middle_eigen_derivative_fd(double x, double xi, double delta = 1e-5);

// Closed form p / (3 + p).
double kernel_correction(double x, double xi);
// Im <M0 d_xi e0, d_x e0> with <a, b> = sum_i a_i conj(b_i), by central differences of kernel_vector.
double kernel_correction_fd(double x, double xi, double step = 1e-5);

// -(3 - p) / (4 (3 + p)). Also checks that it equals d_h lambda + the kernel correction
// (both by finite differences) within `tolerance`; throws NumericalError otherwise.
double subprincipal(double x, double xi, double tolerance = 1e-5);

struct SubprincipalReport {
  int grid = 0;
  double max_derivative_error = 0.0;
  double max_correction_error = 0.0;
  double max_decomposition_error = 0.0;
  // Over the grid, then refined by a compass search from the best grid point.
  double grid_min_subprincipal = 0.0;
  double grid_max_subprincipal = 0.0;
  double min_subprincipal = 0.0;
  double max_subprincipal = 0.0;
  // Block structure of U0^* M0 U0: largest entry of the first row/column, distance of the
  // 2x2 block spectrum outside [-2 sqrt3, -sqrt3] u [sqrt3, 2 sqrt3], unitarity defect.
  double max_kernel_block = 0.0;
  double max_block_spectrum_violation = 0.0;
  double max_unitarity_defect = 0.0;
  // Largest entrywise jump of U0 between grid neighbours (periodic wrap included).
  double max_u0_jump = 0.0;
  // Middle eigenvalue at h = 0 stays strictly inside (-sqrt3, sqrt3): smallest distance to the boundary.
  double middle_gap_margin = 0.0;
};

SubprincipalReport subprincipal_report(int grid);

struct BandHull {
  double h = 0.0;
  int grid = 0;
  // Hull of the effective symbol lambda_mid(x, xi, h) + h * kernel correction.
  double lo = 0.0;
  double hi = 0.0;
  // Hull of the bare middle eigenvalue, for comparison.
  double eigen_lo = 0.0;
  double eigen_hi = 0.0;
  // max distance to the first-order hull [-3h/4, 0] (reflected for h < 0), divided by h^2.
  double c_empirical = 0.0;
};

// Requires 0 < |h| <= 0.2 and grid >= 8.
BandHull effective_band_hull(double h, int grid);

struct HullRefinement {
  std::vector<double> h;
  std::vector<double> width_ratio;
  // Richardson extrapolation of width/|h| to h -> 0 from the two smallest steps.
  double extrapolated = 0.0;
};

// hs must be distinct and halve from one entry to the next.
HullRefinement hull_refinement(const std::vector<double>& hs, int grid);

nlohmann::json to_json(const SubprincipalReport& report);
nlohmann::json to_json(const BandHull& hull);
nlohmann::json to_json(const HullRefinement& refinement);

}  // namespace butterfly_lab
