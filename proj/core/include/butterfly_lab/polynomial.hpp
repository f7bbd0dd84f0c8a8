#pragma once

#include <vector>

namespace butterfly_lab {

// Real polynomial in lambda stored as a Chebyshev series on a window [lo, hi]:
//   P(lambda) = sum_k c_k T_k(x),  x = (2 lambda - lo - hi) / (hi - lo).
// The window only affects conditioning; the polynomial is defined everywhere.
class RealPolynomial {
 public:
  RealPolynomial() : lo_(-1.0), hi_(1.0) {}

  static RealPolynomial from_chebyshev(std::vector<double> coeffs, double lo, double hi);
  // Ascending monomial coefficients, re-expanded on [lo, hi].
  static RealPolynomial from_monomial(const std::vector<double>& ascending, double lo = -1.0, double hi = 1.0);
  // Degree n-1 interpolant through values at chebyshev_nodes(n, lo, hi).
  static RealPolynomial interpolate(const std::vector<double>& values, double lo, double hi);
  // First-kind nodes, mapped to [lo, hi], in decreasing order.
  static std::vector<double> chebyshev_nodes(int n, double lo, double hi);
  // Chebyshev coefficients of the interpolant through `values` at chebyshev_nodes(values.size()).
  static std::vector<double> chebyshev_transform(const std::vector<double>& values);

  double operator()(double lambda) const;

  // Highest index with a nonzero Chebyshev coefficient (-1 for the zero polynomial).
  int degree() const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::vector<double>& chebyshev() const { return c_; }
  // Ascending monomial coefficients in lambda.
  std::vector<double> coefficients() const;
  double leading_coefficient() const;

  RealPolynomial derivative() const;
  // Drops trailing Chebyshev coefficients below rel * max|c|.
  RealPolynomial trimmed(double rel = 1e-10) const;
  // Same polynomial re-expanded on another window.
  RealPolynomial rewindowed(double lo, double hi) const;

  double coefficient_norm() const;  // sum |c_k|
  // Max |P| over a dense sample of the window (exact at the Chebyshev extrema grid).
  double sup_norm() const;

  RealPolynomial& operator+=(const RealPolynomial& other);
  RealPolynomial& operator*=(double s);
  friend RealPolynomial operator+(RealPolynomial a, const RealPolynomial& b) { return a += b; }
  friend RealPolynomial operator*(double s, RealPolynomial a) { return a *= s; }
  friend RealPolynomial operator-(RealPolynomial a, const RealPolynomial& b) { return a += (-1.0) * b; }

 private:
  std::vector<double> c_;
  double lo_;
  double hi_;
};

}  // namespace butterfly_lab
