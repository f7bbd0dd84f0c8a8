#include "butterfly_lab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace butterfly_lab {
namespace {

// Horner on ascending coefficients.
double eval_monomial(const std::vector<double>& a, double x) {
  double v = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * x + *it;
  return v;
}

}  // namespace

RealPolynomial RealPolynomial::from_chebyshev(std::vector<double> coeffs, double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("polynomial window must satisfy lo < hi");
  RealPolynomial p;
  p.c_ = std::move(coeffs);
  p.lo_ = lo;
  p.hi_ = hi;
  return p;
}

std::vector<double> RealPolynomial::chebyshev_nodes(int n, double lo, double hi) {
  std::vector<double> x(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int j = 0; j < n; ++j) x[j] = mid + half * std::cos(std::numbers::pi * (j + 0.5) / n);
  return x;
}

std::vector<double> RealPolynomial::chebyshev_transform(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<double> c(n, 0.0);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
    c[k] = (k == 0 ? 1.0 : 2.0) * s / n;
  }
  return c;
}

RealPolynomial RealPolynomial::interpolate(const std::vector<double>& values, double lo, double hi) {
  return from_chebyshev(chebyshev_transform(values), lo, hi);
}

RealPolynomial RealPolynomial::from_monomial(const std::vector<double>& ascending, double lo, double hi) {
  const int n = std::max<int>(1, static_cast<int>(ascending.size()));
  std::vector<double> values(n);
  const auto nodes = chebyshev_nodes(n, lo, hi);
  for (int j = 0; j < n; ++j) values[j] = eval_monomial(ascending, nodes[j]);
  auto p = interpolate(values, lo, hi);
  // Exact zeros beyond the true degree keep degree() honest.
  if (ascending.empty()) p.c_.assign(1, 0.0);
  return p;
}

double RealPolynomial::operator()(double lambda) const {
  if (c_.empty()) return 0.0;
  const double x = (2.0 * lambda - lo_ - hi_) / (hi_ - lo_);
  // Clenshaw recurrence.
  double b1 = 0.0;
  double b2 = 0.0;
  for (int k = static_cast<int>(c_.size()) - 1; k >= 1; --k) {
    const double b0 = c_[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c_[0] + x * b1 - b2;
}

int RealPolynomial::degree() const {
  for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k)
    if (c_[k] != 0.0) return k;
  return -1;
}

std::vector<double> RealPolynomial::coefficients() const {
  const int n = degree();
  if (n < 0) return {0.0};
  const double alpha = 2.0 / (hi_ - lo_);
  const double beta = -(hi_ + lo_) / (hi_ - lo_);
  // T_k(alpha*lambda + beta) as ascending monomials.
  std::vector<double> t_prev{1.0};
  std::vector<double> t_cur{beta, alpha};
  std::vector<double> out(n + 1, 0.0);
  out[0] += c_[0];
  if (n >= 1) {
    out[0] += c_[1] * beta;
    out[1] += c_[1] * alpha;
  }
  for (int k = 2; k <= n; ++k) {
    std::vector<double> t_next(k + 1, 0.0);
    for (std::size_t i = 0; i < t_cur.size(); ++i) {
      t_next[i] += 2.0 * beta * t_cur[i];
      t_next[i + 1] += 2.0 * alpha * t_cur[i];
    }
    for (std::size_t i = 0; i < t_prev.size(); ++i) t_next[i] -= t_prev[i];
    for (int i = 0; i <= k; ++i) out[i] += c_[k] * t_next[i];
    t_prev = std::move(t_cur);
    t_cur = std::move(t_next);
  }
  return out;
}

double RealPolynomial::leading_coefficient() const {
  const int n = degree();
  if (n < 0) return 0.0;
  if (n == 0) return c_[0];
  // T_n(x) = 2^{n-1} x^n + ..., x = alpha*lambda + beta.
  const double alpha = 2.0 / (hi_ - lo_);
  return c_[n] * std::pow(2.0, n - 1) * std::pow(alpha, n);
}

RealPolynomial RealPolynomial::derivative() const {
  const int n = degree();
  if (n <= 0) return from_chebyshev({0.0}, lo_, hi_);
  std::vector<double> d(n, 0.0);
  // d_{k-1} = d_{k+1} + 2k c_k, descending.
  std::vector<double> ext(n + 2, 0.0);
  for (int k = n; k >= 1; --k) ext[k - 1] = ext[k + 1] + 2.0 * k * c_[k];
  for (int k = 0; k < n; ++k) d[k] = ext[k];
  d[0] *= 0.5;
  const double scale = 2.0 / (hi_ - lo_);
  for (double& v : d) v *= scale;
  return from_chebyshev(std::move(d), lo_, hi_);
}

RealPolynomial RealPolynomial::trimmed(double rel) const {
  double m = 0.0;
  for (double v : c_) m = std::max(m, std::abs(v));
  std::vector<double> c = c_;
  while (c.size() > 1 && std::abs(c.back()) <= rel * m) c.pop_back();
  if (m == 0.0) c.assign(1, 0.0);
  return from_chebyshev(std::move(c), lo_, hi_);
}

RealPolynomial RealPolynomial::rewindowed(double lo, double hi) const {
  const int n = std::max(1, degree() + 1);
  const auto nodes = chebyshev_nodes(n, lo, hi);
  std::vector<double> values(n);
  for (int j = 0; j < n; ++j) values[j] = (*this)(nodes[j]);
  return interpolate(values, lo, hi);
}

double RealPolynomial::coefficient_norm() const {
  double s = 0.0;
  for (double v : c_) s += std::abs(v);
  return s;
}

double RealPolynomial::sup_norm() const {
  const int n = std::max(8, 4 * (degree() + 1));
  double m = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double x = std::cos(std::numbers::pi * j / n);
    m = std::max(m, std::abs((*this)(0.5 * (lo_ + hi_) + 0.5 * (hi_ - lo_) * x)));
  }
  return m;
}

RealPolynomial& RealPolynomial::operator+=(const RealPolynomial& other) {
  if (c_.empty()) {
    *this = other;
    return *this;
  }
  if (other.lo_ != lo_ || other.hi_ != hi_) {
    return *this += other.rewindowed(lo_, hi_);
  }
  if (other.c_.size() > c_.size()) c_.resize(other.c_.size(), 0.0);
  for (std::size_t k = 0; k < other.c_.size(); ++k) c_[k] += other.c_[k];
  return *this;
}

RealPolynomial& RealPolynomial::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

}  // namespace butterfly_lab
