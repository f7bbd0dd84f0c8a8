#include "butterfly_lab/chambers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "butterfly_lab/charpoly.hpp"
#include "butterfly_lab/errors.hpp"

namespace butterfly_lab {
namespace {

constexpr double kPi = std::numbers::pi;

// (A, B) points where every +-1 combination of the three cosines attains its extremes.
constexpr std::array<std::array<double, 2>, 8> kExtremalCandidates = {{
    {0.0, 0.0},
    {kPi, kPi},
    {kPi, 0.0},
    {0.0, kPi},
    {2.0 * kPi / 3.0, 4.0 * kPi / 3.0},
    {4.0 * kPi / 3.0, 2.0 * kPi / 3.0},
    {kPi / 3.0, 5.0 * kPi / 3.0},
    {5.0 * kPi / 3.0, kPi / 3.0},
}};

std::vector<ThetaPoint> fit_points(int q, int grid, bool candidates) {
  std::vector<std::array<double, 2>> ab;
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b) ab.push_back({2.0 * kPi * a / grid, 2.0 * kPi * b / grid});
  auto same_angle = [](double x, double y) {
    const double d = std::remainder(x - y, 2.0 * kPi);
    return std::abs(d) < 1e-12;
  };
  for (const auto& c : kExtremalCandidates) {
    if (!candidates) break;
    const bool seen = std::any_of(ab.begin(), ab.end(), [&](const auto& p) {
      return same_angle(p[0], c[0]) && same_angle(p[1], c[1]);
    });
    if (!seen) ab.push_back(c);
  }
  std::vector<ThetaPoint> out;
  out.reserve(ab.size());
  for (const auto& p : ab) out.push_back({p[0] / q, p[1] / q});
  return out;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::string_view pattern_name(CouplingPattern pattern) {
  switch (pattern) {
    case CouplingPattern::kCosTheta1: return "cos_q_theta1";
    case CouplingPattern::kCosTheta2: return "cos_q_theta2";
    case CouplingPattern::kCosDiff: return "cos_q_theta1_minus_theta2";
    case CouplingPattern::kSinTheta1: return "sin_q_theta1";
    case CouplingPattern::kSinTheta2: return "sin_q_theta2";
    case CouplingPattern::kSinDiff: return "sin_q_theta1_minus_theta2";
  }
  return "unknown";
}

bool is_sine(CouplingPattern pattern) {
  return pattern == CouplingPattern::kSinTheta1 || pattern == CouplingPattern::kSinTheta2 ||
         pattern == CouplingPattern::kSinDiff;
}

double pattern_value(CouplingPattern pattern, double a, double b) {
  switch (pattern) {
    case CouplingPattern::kCosTheta1: return std::cos(a);
    case CouplingPattern::kCosTheta2: return std::cos(b);
    case CouplingPattern::kCosDiff: return std::cos(a - b);
    case CouplingPattern::kSinTheta1: return std::sin(a);
    case CouplingPattern::kSinTheta2: return std::sin(b);
    case CouplingPattern::kSinDiff: return std::sin(a - b);
  }
  return 0.0;
}

double ChambersForm::combination_value(const Eigen::VectorXd& w, double lambda) const {
  double v = 0.0;
  for (std::size_t m = 0; m < spectra.size(); ++m) {
    if (w(m) == 0.0) continue;
    v += w(m) * charpoly_from_eigenvalues(spectra[m], lambda);
  }
  return v;
}

std::pair<double, double> ChambersForm::combination_value_and_slope(const Eigen::VectorXd& w, double lambda) const {
  double v = 0.0;
  double d = 0.0;
  for (std::size_t m = 0; m < spectra.size(); ++m) {
    if (w(m) == 0.0) continue;
    // Product rule accumulated alongside the product itself.
    double prod = 1.0;
    double slope = 0.0;
    const RealVector& e = spectra[m];
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const double f = lambda - e(i);
      slope = slope * f + prod;
      prod *= f;
    }
    v += w(m) * prod;
    d += w(m) * slope;
  }
  return {v, d};
}

std::pair<double, double> ChambersForm::combination_value_and_noise(const Eigen::VectorXd& w, double lambda) const {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double unit = static_cast<double>(dim + spectra.size() + 4) * eps;
  double v = 0.0;
  double noise = 0.0;
  for (std::size_t m = 0; m < spectra.size(); ++m) {
    if (w(m) == 0.0) continue;
    const RealVector& e = spectra[m];
    // Eigenvalues carry an absolute error of a few eps * |M|; near one of them the
    // product loses all relative accuracy. prod(|lambda - e_i| + delta) - |P| bounds
    // that first-order term, and rounding in the difference is covered by unit * |P|.
    const double delta = 16.0 * eps * (1.0 + e.cwiseAbs().maxCoeff());
    double prod = 1.0;
    double padded = 1.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      prod *= lambda - e(i);
      padded *= std::abs(lambda - e(i)) + delta;
    }
    v += w(m) * prod;
    noise += std::abs(w(m)) * (unit * std::abs(prod) + (padded - std::abs(prod)));
  }
  return {v, noise};
}

std::vector<double> ChambersForm::sample_abscissae(int n) const {
  std::vector<double> x = RealPolynomial::chebyshev_nodes(n, window_lo(), window_hi());
  // In-band points: Chebyshev nodes mostly land in gaps, where the couplings drown in
  // the size of the base term once the bands are thin.
  for (std::size_t m = 1; m < std::min<std::size_t>(spectra.size(), 4); ++m)
    for (Eigen::Index i = 0; i < spectra[m].size(); ++i) x.push_back(spectra[m](i));
  return x;
}

TermSamples ChambersForm::sample_combination(const Eigen::VectorXd& w, const std::vector<double>& lambda) const {
  TermSamples out;
  out.lambda = lambda;
  for (double x : lambda) {
    const auto [v, noise] = combination_value_and_noise(w, x);
    out.value.push_back(v);
    out.noise.push_back(noise);
  }
  return out;
}

double ChambersForm::base_value(double lambda) const { return combination_value(base_weights(), lambda); }

double ChambersForm::coupling_value(CouplingPattern pattern, double lambda) const {
  return combination_value(coupling_weights(pattern), lambda);
}

double ChambersForm::evaluate(const ThetaPoint& theta, double lambda) const {
  const int q = flux.qi();
  Eigen::VectorXd w = base_weights();
  for (auto pattern : kAllPatterns) w += pattern_value(pattern, q, theta) * coupling_weights(pattern);
  return combination_value(w, lambda);
}

double ChambersForm::base_scale() const { return std::max(base.sup_norm(), 1.0); }

ChambersForm extract_chambers(const ModelSpec& model, const FluxRational& flux, const FitOptions& options) {
  if (options.theta_grid < 3) throw std::invalid_argument("theta grid must be at least 3x3");
  const int q = flux.qi();
  const int dim = model_dimension(model.kind, q);
  const auto points = fit_points(q, options.theta_grid, options.extremal_candidates);
  const int m = static_cast<int>(points.size());

  std::vector<RealVector> spectra(m);
  double emin = INFINITY;
  double emax = -INFINITY;
  for (int i = 0; i < m; ++i) {
    spectra[i] = model_eigenvalues(model, flux, points[i]);
    emin = std::min(emin, spectra[i].minCoeff());
    emax = std::max(emax, spectra[i].maxCoeff());
  }
  // Tight window around the sampled spectrum: the padding shrinks like 1/dim^2 so
  // T_dim stays O(1) on the spectrum and in-band values keep their precision.
  const double width = std::max(emax - emin, 1e-3);
  const double pad = width * std::min(0.5, 1.0 / (static_cast<double>(dim) * dim)) + 1e-9;
  const double lo = emin - pad;
  const double hi = emax + pad;

  const int nodes = dim + 1;
  const auto lambdas = RealPolynomial::chebyshev_nodes(nodes, lo, hi);
  Eigen::MatrixXd design(m, 7);
  Eigen::MatrixXd rhs(m, nodes);
  std::vector<double> values(nodes);
  for (int i = 0; i < m; ++i) {
    const double a = q * points[i].theta1;
    const double b = q * points[i].theta2;
    design(i, 0) = 1.0;
    for (std::size_t k = 0; k < kAllPatterns.size(); ++k) design(i, 1 + k) = pattern_value(kAllPatterns[k], a, b);
    for (int j = 0; j < nodes; ++j) values[j] = charpoly_from_eigenvalues(spectra[i], lambdas[j]);
    const auto c = RealPolynomial::chebyshev_transform(values);
    for (int j = 0; j < nodes; ++j) rhs(i, j) = c[j];
  }
  // Pseudo-inverse rows; the same weights reconstruct exact values later.
  const Eigen::MatrixXd weights = design.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(m, m));
  const Eigen::MatrixXd beta = weights * rhs;

  ChambersForm form;
  form.model = model;
  form.flux = flux;
  form.dim = dim;
  auto row = [&](int r) {
    std::vector<double> c(nodes);
    for (int j = 0; j < nodes; ++j) c[j] = beta(r, j);
    return RealPolynomial::from_chebyshev(std::move(c), lo, hi);
  };
  form.base = row(0);
  for (std::size_t k = 0; k < kAllPatterns.size(); ++k) form.couplings[k] = row(static_cast<int>(k) + 1);
  form.points = points;
  form.spectra = std::move(spectra);
  form.weights = weights;

  double coeff_res = 0.0;
  for (double x : RealPolynomial::chebyshev_nodes(2 * nodes + 1, lo, hi)) {
    const double exact = form.base_value(x);
    coeff_res = std::max(coeff_res, std::abs(form.base(x) - exact) / (1.0 + std::abs(exact)));
    for (auto pattern : kAllPatterns) {
      const double c = form.coupling_value(pattern, x);
      coeff_res = std::max(coeff_res, std::abs(form.coupling(pattern)(x) - c) / (1.0 + std::abs(exact)));
    }
  }
  form.coefficient_residual = coeff_res;

  // Validation against an independent LU determinant at fresh (theta, lambda).
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> energy(lo, hi);
  double rel = 0.0;
  double abs_err = 0.0;
  for (int s = 0; s < options.validation_samples; ++s) {
    const ThetaPoint t{angle(rng), angle(rng)};
    const double lambda = energy(rng);
    const ComplexMatrix mm = model_matrix(model, flux, t);
    const double direct = lu_determinant(lambda * ComplexMatrix::Identity(dim, dim) - mm).real();
    const double err = std::abs(direct - form.evaluate(t, lambda));
    abs_err = std::max(abs_err, err);
    rel = std::max(rel, err / (1.0 + std::abs(direct)));
  }
  form.fit_residual = rel;
  form.fit_abs_error = abs_err;
  if (options.enforce_tolerance && !(rel <= options.tolerance)) {
    throw NumericalError("Chambers fit residual " + std::to_string(rel) + " exceeds tolerance for " +
                         std::string(to_string(model.kind)) + " " + flux.str());
  }
  return form;
}

double chambers_residual(const ChambersForm& form, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> energy(form.window_lo(), form.window_hi());
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const ThetaPoint t{angle(rng), angle(rng)};
    const double lambda = energy(rng);
    const ComplexMatrix m = model_matrix(form.model, form.flux, t);
    const double direct = lu_determinant(lambda * ComplexMatrix::Identity(form.dim, form.dim) - m).real();
    worst = std::max(worst, std::abs(direct - form.evaluate(t, lambda)) / (1.0 + std::abs(direct)));
  }
  return worst;
}

RealPolynomial r_omega_closed_form(const FluxRational& flux, double omega, double lo, double hi) {
  const int q = flux.qi();
  const double c = 2.0 * std::cos(3.0 * omega - flux.gamma() / 8.0);
  std::vector<double> coeffs(q + 1);
  for (int k = 0; k <= q; ++k) coeffs[k] = binomial(q, k) * std::pow(c, q - k);
  return RealPolynomial::from_monomial(coeffs, lo, hi);
}

TermSamples sample_polynomial(const RealPolynomial& p, const std::vector<double>& lambda) {
  TermSamples out;
  out.lambda = lambda;
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * p.coefficient_norm();
  for (double x : lambda) {
    out.value.push_back(p(x));
    out.noise.push_back(noise);
  }
  return out;
}

Proportionality proportionality(const TermSamples& coupling, const TermSamples& reference) {
  std::vector<double> ratios;
  std::vector<double> slack;
  for (std::size_t i = 0; i < reference.value.size(); ++i) {
    const double r = reference.value[i];
    const double noise = coupling.noise[i] + reference.noise[i];
    if (!(noise <= 1e-10 * std::abs(r))) continue;
    ratios.push_back(coupling.value[i] / r);
    slack.push_back(4.0 * noise / std::abs(r));
  }
  Proportionality out;
  out.resolved_points = static_cast<int>(ratios.size());
  if (ratios.size() < 4) {
    out.residual = INFINITY;
    return out;
  }
  double sum = 0.0;
  for (double r : ratios) sum += r;
  out.kappa = sum / static_cast<double>(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i)
    out.residual = std::max(out.residual, std::abs(ratios[i] - out.kappa) - slack[i] * (1.0 + std::abs(out.kappa)));
  out.residual = std::max(out.residual, 0.0);
  return out;
}

Proportionality proportionality(const RealPolynomial& coupling, const RealPolynomial& reference) {
  const int n = 4 * std::max(coupling.degree(), reference.degree()) + 16;
  const auto x = RealPolynomial::chebyshev_nodes(n, coupling.lo(), coupling.hi());
  return proportionality(sample_polynomial(coupling, x), sample_polynomial(reference, x));
}

double sine_coupling_size(const ChambersForm& form) {
  const std::vector<double> x = form.sample_abscissae(2 * form.dim + 16);
  double worst = 0.0;
  for (CouplingPattern p : kAllPatterns) {
    if (!is_sine(p)) continue;
    const TermSamples s = form.sample_combination(form.coupling_weights(p), x);
    for (std::size_t i = 0; i < s.value.size(); ++i) worst = std::max(worst, std::abs(s.value[i]) - 4.0 * s.noise[i]);
  }
  return std::max(worst, 0.0) / form.base_scale();
}

IdentityReport verify_kagome_theorem(const FluxRational& flux, double omega, int samples, std::uint64_t seed,
                                     double tolerance) {
  IdentityReport report(seed);
  FitOptions options;
  options.validation_samples = samples;
  options.seed = seed;
  options.enforce_tolerance = false;
  const ChambersForm form = extract_chambers(ModelSpec::kagome(omega), flux, options);
  const RealPolynomial r = r_omega_closed_form(flux, omega, form.window_lo(), form.window_hi());

  report.record("fit_residual", form.fit_residual, tolerance);
  const CouplingPattern cos_patterns[] = {CouplingPattern::kCosTheta1, CouplingPattern::kCosTheta2,
                                          CouplingPattern::kCosDiff};
  double kappa[3];
  for (int i = 0; i < 3; ++i) {
    const TermSamples c =
        form.sample_combination(form.coupling_weights(cos_patterns[i]), form.sample_abscissae(2 * form.dim + 16));
    const auto prop = proportionality(c, sample_polynomial(r, c.lambda));
    kappa[i] = prop.kappa;
    report.record("proportional_to_r_omega", prop.residual, tolerance);
    report.record("abs_constant_is_two", std::abs(std::abs(prop.kappa) - 2.0), tolerance);
    report.note(std::string("kappa_") + std::string(pattern_name(cos_patterns[i])), prop.kappa);
  }
  report.record("equal_abs_couplings",
                std::max(std::abs(std::abs(kappa[0]) - std::abs(kappa[1])), std::abs(std::abs(kappa[0]) - std::abs(kappa[2]))),
                tolerance);
  // The two single-angle terms carry (-1)^{pq} relative to the difference term.
  const double shift_sign = ((flux.p() * flux.q()) % 2 == 0) ? 1.0 : -1.0;
  report.record("shift_structure",
                std::max(std::abs(kappa[0] - shift_sign * kappa[2]), std::abs(kappa[1] - shift_sign * kappa[2])),
                tolerance);
  report.note("theorem_sign", kappa[2] >= 0.0 ? 1.0 : -1.0);
  report.note("shift_sign", shift_sign);

  report.record("sine_couplings_vanish", sine_coupling_size(form), tolerance);
  report.record("base_monic", std::abs(form.base.leading_coefficient() - 1.0), tolerance);
  report.record("base_degree", std::abs(form.base.degree() - 3 * flux.qi()), 0.5);
  return report;
}

nlohmann::json to_json(const ChambersForm& form) {
  nlohmann::json j;
  j["model"] = std::string(to_string(form.model.kind));
  j["p"] = form.flux.p();
  j["q"] = form.flux.q();
  j["dim"] = form.dim;
  if (form.model.kind == ModelKind::kKagome) j["omega"] = form.model.omega;
  if (form.model.kind == ModelKind::kTriangular) j["phi"] = form.model.phi_for(form.flux);
  if (form.model.kind == ModelKind::kSquare) j["half_normalization"] = form.model.harper_half_normalization;
  j["window"] = {form.window_lo(), form.window_hi()};
  j["base"] = form.base.coefficients();
  nlohmann::json couplings = nlohmann::json::array();
  for (auto pattern : kAllPatterns) {
    const auto& c = form.coupling(pattern);
    couplings.push_back({{"pattern", std::string(pattern_name(pattern))},
                         {"coefficients", c.trimmed(1e-10).coefficients()},
                         {"sup_norm", c.sup_norm()}});
  }
  j["couplings"] = couplings;
  j["fit_residual"] = form.fit_residual;
  j["coefficient_residual"] = form.coefficient_residual;
  return j;
}

}  // namespace butterfly_lab
