#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "butterfly_lab/flux.hpp"
#include "butterfly_lab/lattice.hpp"
#include "butterfly_lab/polynomial.hpp"
#include "butterfly_lab/report.hpp"

namespace butterfly_lab {

// Trigonometric patterns in A = q*theta1, B = q*theta2.
enum class CouplingPattern { kCosTheta1, kCosTheta2, kCosDiff, kSinTheta1, kSinTheta2, kSinDiff };

inline constexpr std::array<CouplingPattern, 6> kAllPatterns = {
    CouplingPattern::kCosTheta1, CouplingPattern::kCosTheta2, CouplingPattern::kCosDiff,
    CouplingPattern::kSinTheta1, CouplingPattern::kSinTheta2, CouplingPattern::kSinDiff};

std::string_view pattern_name(CouplingPattern pattern);
bool is_sine(CouplingPattern pattern);
double pattern_value(CouplingPattern pattern, double a, double b);
inline double pattern_value(CouplingPattern pattern, int q, const ThetaPoint& t) {
  return pattern_value(pattern, q * t.theta1, q * t.theta2);
}

// Values of one term at sample abscissae with a rounding-noise bound per value.
struct TermSamples {
  std::vector<double> lambda;
  std::vector<double> value;
  std::vector<double> noise;
};

struct FitOptions {
  // Side of the theta grid; at least 3 so the seven patterns are independent.
  int theta_grid = 7;
  int validation_samples = 32;
  double tolerance = 1e-8;
  std::uint64_t seed = 42;
  // Throw NumericalError when fit_residual > tolerance.
  bool enforce_tolerance = true;
  // Add the theta points where +-1 coupling patterns reach their extremes, so the
  // sampled hull (and the fit window) covers the spectrum. Band edges from the
  // extremal route do not depend on the window.
  bool extremal_candidates = true;
};

// det(lambda I - M(theta)) = base(lambda) + sum_pattern pattern(q theta) * coupling(lambda).
//
// The polynomials are Chebyshev series on the fit window. Their in-band accuracy
// is limited by eps * max|P| over the window, which grows like (width/4)^dim, so
// the form also keeps the sampled spectra and the least-squares weights: every
// term is then an exact weighted sum of prod(lambda - e_i(theta_m)), accurate to
// rounding relative to the in-band scale. evaluate() and the *_value() accessors
// use that route.
struct ChambersForm {
  ModelSpec model;
  FluxRational flux{0, 1};
  int dim = 0;
  RealPolynomial base;
  std::array<RealPolynomial, 6> couplings;
  // max |P - F| / (1 + |P|) over the validation set.
  double fit_residual = 0.0;
  // max |P - F| over the validation set.
  double fit_abs_error = 0.0;
  // max |series - exact| / (1 + |exact|) over window samples, all seven terms.
  double coefficient_residual = 0.0;

  // Fit points, their sorted spectra, and the 7 x points pseudo-inverse of the
  // pattern design matrix (row 0: base, row 1 + k: kAllPatterns[k]).
  std::vector<ThetaPoint> points;
  std::vector<RealVector> spectra;
  Eigen::MatrixXd weights;

  // sum_m w_m prod_i (lambda - e_i(theta_m)) for a weight row combination.
  double combination_value(const Eigen::VectorXd& w, double lambda) const;
  // Same combination and its lambda-derivative.
  std::pair<double, double> combination_value_and_slope(const Eigen::VectorXd& w, double lambda) const;
  double base_value(double lambda) const;
  double coupling_value(CouplingPattern pattern, double lambda) const;
  // Value and a rounding-noise bound (cancellation among the weighted products).
  std::pair<double, double> combination_value_and_noise(const Eigen::VectorXd& w, double lambda) const;
  // n Chebyshev nodes of the window plus the eigenvalues at a few fit points.
  std::vector<double> sample_abscissae(int n) const;
  TermSamples sample_combination(const Eigen::VectorXd& w, const std::vector<double>& lambda) const;
  Eigen::VectorXd base_weights() const { return weights.row(0).transpose(); }
  Eigen::VectorXd coupling_weights(CouplingPattern pattern) const {
    return weights.row(1 + static_cast<int>(pattern)).transpose();
  }

  const RealPolynomial& coupling(CouplingPattern pattern) const {
    return couplings[static_cast<std::size_t>(pattern)];
  }
  double evaluate(const ThetaPoint& theta, double lambda) const;
  double window_lo() const { return base.lo(); }
  double window_hi() const { return base.hi(); }
  // Sup norm of base on the fit window; the scale for relative checks.
  double base_scale() const;
};

ChambersForm extract_chambers(const ModelSpec& model, const FluxRational& flux, const FitOptions& options = {});

// Max relative residual of the form against LU det(lambda I - M(theta)) at fresh random samples.
double chambers_residual(const ChambersForm& form, int samples, std::uint64_t seed);

// (lambda + 2 cos(3 omega - gamma/8))^q, expanded on [lo, hi].
RealPolynomial r_omega_closed_form(const FluxRational& flux, double omega, double lo = -1.0, double hi = 1.0);

TermSamples sample_polynomial(const RealPolynomial& p, const std::vector<double>& lambda);

// coupling ~ kappa * reference, judged pointwise where both are resolved above noise.
struct Proportionality {
  double kappa = 0.0;
  // max |coupling/reference - kappa| over resolved points (infinity if too few).
  double residual = 0.0;
  int resolved_points = 0;
};
Proportionality proportionality(const TermSamples& coupling, const TermSamples& reference);
Proportionality proportionality(const RealPolynomial& coupling, const RealPolynomial& reference);

// Largest sine coupling provably above rounding noise, relative to base_scale(). Absolute
// thresholds are meaningless once |det| reaches 1e10 at the window edge.
double sine_coupling_size(const ChambersForm& form);

// Cos couplings proportional to R_omega with |kappa| = 2, shift structure, sine terms vanishing, monic base.
IdentityReport verify_kagome_theorem(const FluxRational& flux, double omega, int samples, std::uint64_t seed = 42,
                                     double tolerance = 1e-8);

nlohmann::json to_json(const ChambersForm& form);

}  // namespace butterfly_lab
