#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "butterfly_lab/polynomial.hpp"

namespace butterfly_lab {

struct RootOptions {
  // A root counts as real when |Im| < imag_tolerance * (1 + |Re|).
  double imag_tolerance = 1e-8;
  // Absolute uncertainty of polynomial values; <= 0 means 64 eps * sum|c_k|.
  double value_noise = 0.0;
};

struct RootResult {
  // Real roots with multiplicity, ascending.
  std::vector<double> real;
  // Roots that stayed complex after cluster resolution.
  std::vector<std::complex<double>> complex;
  bool all_real() const { return complex.empty(); }
};

// Parlett-Reinsch balancing with radix-2 scale factors (in place).
void balance_matrix(Eigen::MatrixXd& a);

// Eigenvalues of the balanced colleague (Chebyshev companion) matrix, in lambda units.
std::vector<std::complex<double>> colleague_roots(const RealPolynomial& p);

// Roots of p; nearly-multiple roots whose spread is consistent with value noise
// are resolved on p^{(m-1)} and returned as exact m-fold real roots.
RootResult polynomial_roots(const RealPolynomial& p, const RootOptions& options = {});

}  // namespace butterfly_lab
