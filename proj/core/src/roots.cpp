#include "butterfly_lab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace butterfly_lab {
namespace {

using Complex = std::complex<double>;

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

// Newton iteration on f with a bracket-free safeguard: steps that do not reduce
// |f| are rejected.
double newton(const RealPolynomial& f, const RealPolynomial& df, double x, int iters, double max_step) {
  double fx = f(x);
  for (int i = 0; i < iters && fx != 0.0; ++i) {
    const double d = df(x);
    if (d == 0.0) break;
    double step = fx / d;
    if (std::abs(step) > max_step) step = std::copysign(max_step, step);
    const double xn = x - step;
    const double fn = f(xn);
    if (!(std::abs(fn) < std::abs(fx))) break;
    x = xn;
    fx = fn;
  }
  return x;
}

struct Cluster {
  std::vector<Complex> members;
};

}  // namespace

void balance_matrix(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  constexpr double kRadix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / kRadix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= kRadix;
        c *= kRadix * kRadix;
      }
      g = r * kRadix;
      while (c > g) {
        f /= kRadix;
        c /= kRadix * kRadix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

std::vector<Complex> colleague_roots(const RealPolynomial& p) {
  const int n = p.degree();
  const double mid = 0.5 * (p.lo() + p.hi());
  const double half = 0.5 * (p.hi() - p.lo());
  const auto& c = p.chebyshev();
  if (n <= 0) return {};
  if (n == 1) return {Complex(mid + half * (-c[0] / c[1]), 0.0)};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a(0, 1) = 1.0;
  for (int i = 1; i < n - 1; ++i) {
    a(i, i - 1) = 0.5;
    a(i, i + 1) = 0.5;
  }
  a(n - 1, n - 2) += 0.5;
  for (int j = 0; j < n; ++j) a(n - 1, j) -= c[j] / (2.0 * c[n]);
  balance_matrix(a);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  std::vector<Complex> roots(n);
  for (int i = 0; i < n; ++i) roots[i] = mid + half * solver.eigenvalues()(i);
  return roots;
}

RootResult polynomial_roots(const RealPolynomial& p, const RootOptions& options) {
  RootResult result;
  const int n = p.degree();
  if (n <= 0) return result;
  auto roots = colleague_roots(p);
  std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });

  const double noise = options.value_noise > 0.0
                           ? options.value_noise
                           : 64.0 * std::numeric_limits<double>::epsilon() * p.coefficient_norm();
  const double width = p.hi() - p.lo();
  const RealPolynomial dp = p.derivative();

  // Derivatives up to order n, built lazily.
  std::vector<RealPolynomial> derivs{p, dp};
  auto deriv = [&](int k) -> const RealPolynomial& {
    while (static_cast<int>(derivs.size()) <= k) derivs.push_back(derivs.back().derivative());
    return derivs[k];
  };

  // Candidate m-fold root for a group: zero of p^{(m-1)} near the centroid,
  // accepted when every member lies within the noise-induced spread.
  auto resolve = [&](const std::vector<Complex>& group, double& x_out) -> bool {
    const int m = static_cast<int>(group.size());
    double centroid = 0.0;
    for (const auto& z : group) centroid += z.real();
    centroid /= m;
    double spread = 0.0;
    for (const auto& z : group) spread = std::max(spread, std::abs(z - centroid));
    const double x = newton(deriv(m - 1), deriv(m), centroid, 60, std::max(spread, 1e-12 * width));
    const double pm = std::abs(deriv(m)(x));
    if (pm == 0.0) return false;
    const double radius = std::pow(noise * factorial(m) / pm, 1.0 / m);
    for (const auto& z : group)
      if (std::abs(z - x) > 8.0 * radius + 1e-14 * (1.0 + std::abs(x))) return false;
    if (std::abs(p(x)) > 16.0 * noise) return false;
    x_out = x;
    return true;
  };

  std::size_t i = 0;
  while (i < roots.size()) {
    // Greedy: the largest group starting at i that resolves as one multiple root.
    std::size_t best_end = i + 1;
    double best_x = roots[i].real();
    bool best_resolved = false;
    for (std::size_t end = i + 2; end <= roots.size(); ++end) {
      if (std::abs(roots[end - 1] - roots[end - 2]) > 1e-3 * width) break;
      std::vector<Complex> group(roots.begin() + i, roots.begin() + end);
      double x = 0.0;
      if (resolve(group, x)) {
        best_end = end;
        best_x = x;
        best_resolved = true;
      }
    }
    if (best_resolved) {
      for (std::size_t k = i; k < best_end; ++k) result.real.push_back(best_x);
      i = best_end;
      continue;
    }
    const Complex z = roots[i];
    if (std::abs(z.imag()) < options.imag_tolerance * (1.0 + std::abs(z.real()))) {
      result.real.push_back(newton(p, dp, z.real(), 4, 1e-6 * width));
    } else {
      result.complex.push_back(z);
    }
    ++i;
  }
  std::sort(result.real.begin(), result.real.end());
  return result;
}

}  // namespace butterfly_lab
