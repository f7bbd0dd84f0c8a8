#include "butterfly_lab/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/parallel.hpp"

namespace butterfly_lab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
const Complex kI{0.0, 1.0};

Complex ei(double a) { return std::polar(1.0, a); }

// Sum a_i conj(b_i).
Complex inner(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) { return b.dot(a); }

// Minimises f from (x, xi) by a compass search, step halving down to 1e-10.
std::pair<double, double> compass_min(const std::function<double(double, double)>& f, double x, double xi,
                                      double step) {
  double best = f(x, xi);
  while (step > 1e-10) {
    bool moved = false;
    for (auto [dx, dy] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}, {1.0, 1.0}, {-1.0, -1.0},
                          {1.0, -1.0}, {-1.0, 1.0}}) {
      const double v = f(x + dx * step, xi + dy * step);
      if (v < best) {
        best = v;
        x += dx * step;
        xi += dy * step;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  return {x, xi};
}

double grid_coord(int i, int grid) { return 2.0 * kPi * i / grid; }

}  // namespace

double p_triangle(double x, double xi) { return std::cos(x) + std::cos(xi) + std::cos(x - xi); }

ComplexMatrix hou_symbol(const SymbolPoint& pt) {
  const double x = pt.x;
  const double xi = pt.xi;
  const Complex up = kI * ei(pt.h / 8.0);
  const Complex dn = -kI * ei(-pt.h / 8.0);
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 1) = up * (ei(-x) + ei(-(x - xi)));
  m(0, 2) = dn * (ei(-x) + ei(-xi));
  m(1, 0) = dn * (ei(x) + ei(x - xi));
  m(1, 2) = up * (ei(x - xi) + ei(-xi));
  m(2, 0) = up * (ei(x) + ei(xi));
  m(2, 1) = dn * (ei(-(x - xi)) + ei(xi));
  return m;
}

double middle_eigenvalue(const SymbolPoint& pt) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(hou_symbol(pt), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

Eigen::Vector3cd kernel_vector(double x, double xi) {
  const double alpha = 1.0 / std::sqrt(6.0 + 2.0 * p_triangle(x, xi));
  return alpha * Eigen::Vector3cd(1.0 + ei(-x), 1.0 + ei(x - xi), 1.0 + ei(xi));
}

Eigen::Matrix3cd block_diagonalizer(double x, double xi) {
  Eigen::Matrix3d b;
  b << 1.0 / kSqrt3, 1.0 / kSqrt3, 1.0 / kSqrt3,
       1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0,
       1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0);
  const Eigen::Vector3cd e0 = kernel_vector(x, xi);
  const Eigen::Vector3cd be = b.cast<Complex>() * e0;
  const Complex a = be(0);
  const Complex bb = be(1);
  const double n = std::sqrt(std::norm(a) + std::norm(bb));
  const Eigen::Vector3cd f =
      b.transpose().cast<Complex>() * Eigen::Vector3cd(-std::conj(bb), std::conj(a), 0.0) / n;
  // Plain bilinear wedge (Eigen's cross() conjugates complex operands).
  const Eigen::Vector3cd wedge(e0(1) * f(2) - e0(2) * f(1), e0(2) * f(0) - e0(0) * f(2), e0(0) * f(1) - e0(1) * f(0));
  const Eigen::Vector3cd g = wedge.conjugate();
  Eigen::Matrix3cd u;
  u.col(0) = e0;
  u.col(1) = f;
  u.col(2) = g;
  return u;
}

double middle_eigen_derivative(double x, double xi) {
  const double p = p_triangle(x, xi);
  return -3.0 * (1.0 + p) / (4.0 * (3.0 + p));
}

double middle_eigen_derivative_fd(double x, double xi, double delta) {
  return (middle_eigenvalue({x, xi, delta}) - middle_eigenvalue({x, xi, -delta})) / (2.0 * delta);
}

double kernel_correction(double x, double xi) {
  const double p = p_triangle(x, xi);
  return p / (3.0 + p);
}

double kernel_correction_fd(double x, double xi, double step) {
  const Eigen::Vector3cd dx = (kernel_vector(x + step, xi) - kernel_vector(x - step, xi)) / (2.0 * step);
  const Eigen::Vector3cd dxi = (kernel_vector(x, xi + step) - kernel_vector(x, xi - step)) / (2.0 * step);
  const Eigen::Matrix3cd m0 = hou_symbol({x, xi, 0.0});
  return inner(m0 * dxi, dx).imag();
}

double subprincipal(double x, double xi, double tolerance) {
  const double p = p_triangle(x, xi);
  const double sigma = -(3.0 - p) / (4.0 * (3.0 + p));
  const double decomposed = middle_eigen_derivative_fd(x, xi) + kernel_correction_fd(x, xi);
  if (!(std::abs(decomposed - sigma) <= tolerance)) {
    throw NumericalError("subprincipal decomposition off by " + std::to_string(std::abs(decomposed - sigma)));
  }
  return sigma;
}

SubprincipalReport subprincipal_report(int grid) {
  if (grid < 2) throw std::invalid_argument("subprincipal_report: grid must be >= 2");
  struct Row {
    double deriv = 0.0, corr = 0.0, decomp = 0.0, kernel_block = 0.0, spectrum = 0.0, unitary = 0.0, jump = 0.0;
    double smin = INFINITY, smax = -INFINITY, margin = INFINITY;
    int imin = 0, imax = 0;
  };
  std::vector<Row> rows(grid);
  parallel_for(static_cast<std::size_t>(grid), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    Row& r = rows[ii];
    const double x = grid_coord(i, grid);
    for (int j = 0; j < grid; ++j) {
      const double xi = grid_coord(j, grid);
      const double p = p_triangle(x, xi);
      const double sigma = -(3.0 - p) / (4.0 * (3.0 + p));
      const double dh = middle_eigen_derivative_fd(x, xi);
      const double corr = kernel_correction_fd(x, xi);
      r.deriv = std::max(r.deriv, std::abs(dh - middle_eigen_derivative(x, xi)));
      r.corr = std::max(r.corr, std::abs(corr - kernel_correction(x, xi)));
      r.decomp = std::max(r.decomp, std::abs(dh + corr - sigma));
      if (sigma < r.smin) {
        r.smin = sigma;
        r.imin = j;
      }
      if (sigma > r.smax) {
        r.smax = sigma;
        r.imax = j;
      }

      const Eigen::Matrix3cd u = block_diagonalizer(x, xi);
      const Eigen::Matrix3cd m0 = hou_symbol({x, xi, 0.0});
      const Eigen::Matrix3cd t = u.adjoint() * m0 * u;
      r.unitary = std::max(r.unitary, (u.adjoint() * u - Eigen::Matrix3cd::Identity()).cwiseAbs().maxCoeff());
      r.kernel_block = std::max({r.kernel_block, t.row(0).cwiseAbs().maxCoeff(), t.col(0).cwiseAbs().maxCoeff()});
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(t.block<2, 2>(1, 1), Eigen::EigenvaluesOnly);
      for (int k = 0; k < 2; ++k) {
        const double a = std::abs(es.eigenvalues()(k));
        r.spectrum = std::max({r.spectrum, kSqrt3 - a, a - 2.0 * kSqrt3});
      }
      const double mid = middle_eigenvalue({x, xi, 0.0});
      r.margin = std::min(r.margin, kSqrt3 - std::abs(mid));

      const Eigen::Matrix3cd ux = block_diagonalizer(grid_coord((i + 1) % grid, grid), xi);
      const Eigen::Matrix3cd uy = block_diagonalizer(x, grid_coord((j + 1) % grid, grid));
      r.jump = std::max({r.jump, (ux - u).cwiseAbs().maxCoeff(), (uy - u).cwiseAbs().maxCoeff()});
    }
  });

  SubprincipalReport rep;
  rep.grid = grid;
  rep.grid_min_subprincipal = INFINITY;
  rep.grid_max_subprincipal = -INFINITY;
  rep.middle_gap_margin = INFINITY;
  int min_at[2] = {0, 0};
  int max_at[2] = {0, 0};
  for (int i = 0; i < grid; ++i) {
    const Row& r = rows[i];
    rep.max_derivative_error = std::max(rep.max_derivative_error, r.deriv);
    rep.max_correction_error = std::max(rep.max_correction_error, r.corr);
    rep.max_decomposition_error = std::max(rep.max_decomposition_error, r.decomp);
    rep.max_kernel_block = std::max(rep.max_kernel_block, r.kernel_block);
    rep.max_block_spectrum_violation = std::max(rep.max_block_spectrum_violation, r.spectrum);
    rep.max_unitarity_defect = std::max(rep.max_unitarity_defect, r.unitary);
    rep.max_u0_jump = std::max(rep.max_u0_jump, r.jump);
    rep.middle_gap_margin = std::min(rep.middle_gap_margin, r.margin);
    if (r.smin < rep.grid_min_subprincipal) {
      rep.grid_min_subprincipal = r.smin;
      min_at[0] = i;
      min_at[1] = r.imin;
    }
    if (r.smax > rep.grid_max_subprincipal) {
      rep.grid_max_subprincipal = r.smax;
      max_at[0] = i;
      max_at[1] = r.imax;
    }
  }

  auto sigma = [](double x, double xi) {
    const double p = p_triangle(x, xi);
    return -(3.0 - p) / (4.0 * (3.0 + p));
  };
  const double step = 2.0 * kPi / grid;
  const auto [ax, axi] = compass_min(sigma, grid_coord(min_at[0], grid), grid_coord(min_at[1], grid), step);
  const auto [bx, bxi] = compass_min([&](double x, double xi) { return -sigma(x, xi); }, grid_coord(max_at[0], grid),
                                     grid_coord(max_at[1], grid), step);
  rep.min_subprincipal = subprincipal(ax, axi);
  rep.max_subprincipal = subprincipal(bx, bxi);
  return rep;
}

BandHull effective_band_hull(double h, int grid) {
  if (!(h != 0.0 && std::abs(h) <= 0.2)) throw std::invalid_argument("effective_band_hull: need 0 < |h| <= 0.2");
  if (grid < 8) throw std::invalid_argument("effective_band_hull: grid must be >= 8");
  auto effective = [h](double x, double xi) {
    return middle_eigenvalue({x, xi, h}) + h * kernel_correction_fd(x, xi);
  };
  struct Row {
    double lo = INFINITY, hi = -INFINITY, elo = INFINITY, ehi = -INFINITY;
    int jlo = 0, jhi = 0;
  };
  std::vector<Row> rows(grid);
  parallel_for(static_cast<std::size_t>(grid), [&](std::size_t ii) {
    Row& r = rows[ii];
    const double x = grid_coord(static_cast<int>(ii), grid);
    for (int j = 0; j < grid; ++j) {
      const double xi = grid_coord(j, grid);
      const double mid = middle_eigenvalue({x, xi, h});
      const double v = mid + h * kernel_correction_fd(x, xi);
      if (v < r.lo) {
        r.lo = v;
        r.jlo = j;
      }
      if (v > r.hi) {
        r.hi = v;
        r.jhi = j;
      }
      r.elo = std::min(r.elo, mid);
      r.ehi = std::max(r.ehi, mid);
    }
  });
  BandHull out;
  out.h = h;
  out.grid = grid;
  out.lo = INFINITY;
  out.hi = -INFINITY;
  out.eigen_lo = INFINITY;
  out.eigen_hi = -INFINITY;
  int lo_at[2] = {0, 0};
  int hi_at[2] = {0, 0};
  for (int i = 0; i < grid; ++i) {
    const Row& r = rows[i];
    if (r.lo < out.lo) {
      out.lo = r.lo;
      lo_at[0] = i;
      lo_at[1] = r.jlo;
    }
    if (r.hi > out.hi) {
      out.hi = r.hi;
      hi_at[0] = i;
      hi_at[1] = r.jhi;
    }
    out.eigen_lo = std::min(out.eigen_lo, r.elo);
    out.eigen_hi = std::max(out.eigen_hi, r.ehi);
  }
  const double step = 2.0 * kPi / grid;
  const auto [ax, axi] = compass_min(effective, grid_coord(lo_at[0], grid), grid_coord(lo_at[1], grid), step);
  const auto [bx, bxi] = compass_min([&](double x, double xi) { return -effective(x, xi); },
                                     grid_coord(hi_at[0], grid), grid_coord(hi_at[1], grid), step);
  out.lo = std::min(out.lo, effective(ax, axi));
  out.hi = std::max(out.hi, effective(bx, bxi));

  const double pred_lo = h > 0.0 ? -0.75 * h : 0.0;
  const double pred_hi = h > 0.0 ? 0.0 : -0.75 * h;
  out.c_empirical = std::max(std::abs(out.lo - pred_lo), std::abs(out.hi - pred_hi)) / (h * h);
  return out;
}

HullRefinement hull_refinement(const std::vector<double>& hs, int grid) {
  if (hs.size() < 2) throw std::invalid_argument("hull_refinement: need at least two steps");
  HullRefinement out;
  out.h = hs;
  for (double h : hs) {
    const BandHull b = effective_band_hull(h, grid);
    out.width_ratio.push_back((b.hi - b.lo) / std::abs(h));
  }
  const std::size_t n = hs.size();
  const double t = std::abs(hs[n - 2] / hs[n - 1]);
  if (!(t > 1.0)) throw std::invalid_argument("hull_refinement: steps must decrease");
  out.extrapolated = (t * out.width_ratio[n - 1] - out.width_ratio[n - 2]) / (t - 1.0);
  return out;
}

nlohmann::json to_json(const SubprincipalReport& r) {
  return {{"grid", r.grid},
          {"max_derivative_error", r.max_derivative_error},
          {"max_correction_error", r.max_correction_error},
          {"max_decomposition_error", r.max_decomposition_error},
          {"grid_min_subprincipal", r.grid_min_subprincipal},
          {"grid_max_subprincipal", r.grid_max_subprincipal},
          {"min_subprincipal", r.min_subprincipal},
          {"max_subprincipal", r.max_subprincipal},
          {"max_kernel_block", r.max_kernel_block},
          {"max_block_spectrum_violation", r.max_block_spectrum_violation},
          {"max_unitarity_defect", r.max_unitarity_defect},
          {"max_u0_jump", r.max_u0_jump},
          {"middle_gap_margin", r.middle_gap_margin},
          {"u0_smoothness", "grid-continuity heuristic only"}};
}

nlohmann::json to_json(const BandHull& b) {
  return {{"h", b.h},         {"grid", b.grid},         {"lo", b.lo},
          {"hi", b.hi},       {"eigen_lo", b.eigen_lo}, {"eigen_hi", b.eigen_hi},
          {"c_empirical", b.c_empirical}};
}

nlohmann::json to_json(const HullRefinement& r) {
  return {{"h", r.h}, {"width_ratio", r.width_ratio}, {"extrapolated", r.extrapolated}};
}

}  // namespace butterfly_lab
