#include "butterfly_lab/charpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "butterfly_lab/errors.hpp"
#include "butterfly_lab/polynomial.hpp"

namespace butterfly_lab {

Complex lu_determinant(const ComplexMatrix& m) {
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

double charpoly_from_eigenvalues(const RealVector& eigenvalues, double lambda) {
  double v = 1.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) v *= (lambda - eigenvalues(i));
  return v;
}

std::vector<Complex> char_poly(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("char_poly needs a square matrix");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return {Complex(1.0, 0.0)};
  double radius = 0.0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, m.row(i).cwiseAbs().sum());
  const double lo = -(radius + 1.0);
  const double hi = radius + 1.0;
  const int nodes = n + 1;
  const auto x = RealPolynomial::chebyshev_nodes(nodes, lo, hi);
  std::vector<double> re(nodes);
  std::vector<double> im(nodes);
  for (int j = 0; j < nodes; ++j) {
    const Complex d = lu_determinant(ComplexMatrix::Identity(n, n) * x[j] - m);
    re[j] = d.real();
    im[j] = d.imag();
  }
  const auto pr = RealPolynomial::interpolate(re, lo, hi).coefficients();
  const auto pi = RealPolynomial::interpolate(im, lo, hi).coefficients();
  std::vector<Complex> out(n + 1);
  double scale = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double a = k < static_cast<int>(pr.size()) ? pr[k] : 0.0;
    const double b = k < static_cast<int>(pi.size()) ? pi[k] : 0.0;
    out[k] = Complex(a, b);
    scale = std::max(scale, std::abs(out[k]));
  }
  out[n] = 1.0;
  if (is_hermitian(m)) {
    double residue = 0.0;
    for (const auto& c : out) residue = std::max(residue, std::abs(c.imag()));
    if (residue > 1e-10 * (1.0 + scale)) throw NumericalError("char_poly: Hermitian input produced complex coefficients");
    for (auto& c : out) c = Complex(c.real(), 0.0);
  }
  return out;
}

GrapheneDet reduced_graphene_det(const FluxRational& flux, const ThetaPoint& theta, Complex lambda) {
  const int q = flux.qi();
  const ComplexMatrix a = -lambda * ComplexMatrix::Identity(q, q) + std::polar(1.0, theta.theta1) * clock_matrix(flux) +
                          std::polar(1.0, theta.theta2) * shift_matrix(q);
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  const Complex closed = sign * (std::pow(lambda, q) - std::polar(1.0, q * theta.theta1) - std::polar(1.0, q * theta.theta2));
  return {lu_determinant(a), closed};
}

IdentityReport graphene_factorization_check(const FluxRational& flux, int samples, std::uint64_t seed,
                                            double tolerance) {
  IdentityReport report(seed);
  const int q = flux.qi();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> energy(-3.5, 3.5);
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ThetaPoint t{angle(rng), angle(rng)};
    const double lambda = energy(rng);
    const ComplexMatrix mg = model_matrix(ModelSpec::hexagonal(), flux, t);
    const ComplexMatrix mt = model_matrix(ModelSpec::triangular(0.0), flux, t);
    const Complex lhs = lu_determinant(lambda * ComplexMatrix::Identity(2 * q, 2 * q) - mg);
    const Complex rhs =
        sign * lu_determinant(mt + (3.0 - lambda * lambda) * ComplexMatrix::Identity(q, q));
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(lhs)));
  }
  report.record("graphene_factorization", worst, tolerance);
  return report;
}

}  // namespace butterfly_lab
