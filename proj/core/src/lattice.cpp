#include "butterfly_lab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/SVD>

namespace butterfly_lab {
namespace {

constexpr double kPi = std::numbers::pi;

Complex expi(double a) { return std::polar(1.0, a); }

ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

double spectrum_distance(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) return INFINITY;
  return (a - b).cwiseAbs().maxCoeff();
}

double unitarity_residual(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u - identity(static_cast<int>(u.rows())));
}

ComplexMatrix integer_power(const ComplexMatrix& m, int n) {
  ComplexMatrix out = identity(static_cast<int>(m.rows()));
  for (int i = 0; i < n; ++i) out = out * m;
  return out;
}

ComplexMatrix square_matrix(const ModelSpec& model, const FluxRational& flux, const ThetaPoint& t) {
  const ComplexMatrix j = clock_matrix(flux);
  const ComplexMatrix k = shift_matrix(flux.qi());
  const ComplexMatrix x = expi(t.theta1) * j + expi(t.theta2) * k;
  ComplexMatrix m = x + x.adjoint();
  if (model.harper_half_normalization) m *= 0.5;
  return m;
}

ComplexMatrix triangular_matrix(const ModelSpec& model, const FluxRational& flux, const ThetaPoint& t) {
  const ComplexMatrix j = clock_matrix(flux);
  const ComplexMatrix k = shift_matrix(flux.qi());
  const double phi = model.phi_for(flux);
  const ComplexMatrix x = expi(t.theta1) * j + expi(t.theta2) * k +
                          expi(phi + t.theta1 - t.theta2) * (j * k.adjoint());
  return x + x.adjoint();
}

// Off-diagonal block of the bipartite hexagonal matrix.
ComplexMatrix hexagonal_block(const FluxRational& flux, const ThetaPoint& t) {
  const int q = flux.qi();
  return identity(q) + expi(t.theta1) * clock_matrix(flux) + expi(t.theta2) * shift_matrix(q);
}

ComplexMatrix hexagonal_matrix(const FluxRational& flux, const ThetaPoint& t) {
  const int q = flux.qi();
  const ComplexMatrix a = hexagonal_block(flux, t);
  ComplexMatrix m = ComplexMatrix::Zero(2 * q, 2 * q);
  m.block(0, q, q, q) = a;
  m.block(q, 0, q, q) = a.adjoint();
  return m;
}

ComplexMatrix kagome_matrix(const FluxRational& flux, const ThetaPoint& t, double omega) {
  const int q = flux.qi();
  const double g = flux.gamma();
  const double w = omega + g / 8.0;
  const ComplexMatrix j = clock_matrix(flux);
  const ComplexMatrix k = shift_matrix(q);
  const ComplexMatrix js = j.adjoint();
  const ComplexMatrix ks = k.adjoint();
  const double t1 = t.theta1;
  const double t2 = t.theta2;
  const ComplexMatrix a = expi(w) * (expi(-t1) * js + expi(-g / 2.0 - (t1 - t2)) * (js * k));
  const ComplexMatrix b = expi(-w) * (expi(-t1) * js + expi(-t2) * ks);
  const ComplexMatrix c = expi(w) * (expi(-g / 2.0 + (t1 - t2)) * (j * ks) + expi(-t2) * ks);
  ComplexMatrix m = ComplexMatrix::Zero(3 * q, 3 * q);
  m.block(0, q, q, q) = a;
  m.block(0, 2 * q, q, q) = b;
  m.block(q, 2 * q, q, q) = c;
  m.block(q, 0, q, q) = a.adjoint();
  m.block(2 * q, 0, q, q) = b.adjoint();
  m.block(2 * q, q, q, q) = c.adjoint();
  return m;
}

}  // namespace

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= rel_tol * max_abs(m);
}

ComplexMatrix clock_matrix(const FluxRational& flux) {
  const int q = flux.qi();
  ComplexMatrix j = ComplexMatrix::Zero(q, q);
  for (int i = 0; i < q; ++i) j(i, i) = expi(flux.gamma() * i);
  return j;
}

ComplexMatrix shift_matrix(int q) {
  ComplexMatrix k = ComplexMatrix::Zero(q, q);
  for (int i = 0; i < q; ++i) k(i, (i + 1) % q) = 1.0;
  return k;
}

ComplexMatrix model_matrix(const ModelSpec& model, const FluxRational& flux, const ThetaPoint& theta) {
  switch (model.kind) {
    case ModelKind::kSquare: return square_matrix(model, flux, theta);
    case ModelKind::kTriangular: return triangular_matrix(model, flux, theta);
    case ModelKind::kHexagonal: return hexagonal_matrix(flux, theta);
    case ModelKind::kKagome: return kagome_matrix(flux, theta, model.omega);
  }
  return {};
}

RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

RealVector model_eigenvalues(const ModelSpec& model, const FluxRational& flux, const ThetaPoint& theta) {
  if (model.kind == ModelKind::kHexagonal) {
    // [[0, A], [A^*, 0]] has eigenvalues +-sigma_i(A): one q x q SVD instead of a 2q eigensolve.
    const int q = flux.qi();
    const ComplexMatrix a = hexagonal_block(flux, theta);
    const RealVector s = Eigen::BDCSVD<ComplexMatrix>(a).singularValues();
    RealVector out(2 * q);
    for (int i = 0; i < q; ++i) {
      out(i) = -s(i);
      out(2 * q - 1 - i) = s(i);
    }
    return out;
  }
  return hermitian_eigenvalues(model_matrix(model, flux, theta));
}

ComplexMatrix fourier_unitary(const FluxRational& flux) {
  const int q = flux.qi();
  ComplexMatrix u(q, q);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q));
  for (int j = 0; j < q; ++j)
    for (int k = 0; k < q; ++k) {
      // Reduce j*k mod q to keep the phase argument small.
      const long jk = (static_cast<long>(j) * k) % q;
      u(j, k) = scale * expi(-flux.gamma() * static_cast<double>(jk));
    }
  return u;
}

ComplexMatrix v_unitary(const FluxRational& flux) {
  const int q = flux.qi();
  const double g = flux.gamma();
  const Complex c = expi(g * (q - 1) / 2.0);
  Eigen::VectorXcd d(q);
  d(0) = 1.0;
  // 1-based recursion d_{j+1} = c e^{-i(j-1)gamma} d_j, written 0-based.
  for (int j = 1; j < q; ++j) d(j) = d(j - 1) * c * expi(-(j - 1) * g);
  return fourier_unitary(flux) * d.asDiagonal();
}

ComplexMatrix l_matrix(const FluxRational& flux) {
  const Complex c = expi(flux.gamma() * (flux.q() - 1) / 2.0);
  return c * clock_matrix(flux).adjoint() * shift_matrix(flux.qi());
}

Complex trace_word(const FluxRational& flux, int a, int b) {
  return (integer_power(clock_matrix(flux), a) * integer_power(shift_matrix(flux.qi()), b)).trace();
}

ComplexMatrix kagome_s_matrix(const FluxRational& flux, const ThetaPoint& theta, double omega) {
  const int q = flux.qi();
  const double g = flux.gamma();
  const double w = omega + g / 8.0;
  const double t1 = theta.theta1;
  const double t2 = theta.theta2;
  const ComplexMatrix i = identity(q);
  const ComplexMatrix j = clock_matrix(flux);
  const ComplexMatrix k = shift_matrix(q);
  ComplexMatrix s = ComplexMatrix::Zero(3 * q, 3 * q);
  s.block(0, q, q, q) = expi(w) * (i + expi(-g / 2.0 + t2) * k);
  s.block(0, 2 * q, q, q) = expi(-w) * (expi(t2) * k + expi(t1) * j);
  s.block(q, 0, q, q) = expi(-w) * (i + expi(g / 2.0 - t2) * k.adjoint());
  s.block(q, 2 * q, q, q) = expi(w) * (expi(-g / 2.0 + t1) * j + i);
  s.block(2 * q, 0, q, q) = expi(w) * (expi(-t2) * k.adjoint() + expi(-t1) * j.adjoint());
  s.block(2 * q, q, q, q) = expi(-w) * (expi(g / 2.0 - t1) * j.adjoint() + i);
  return s;
}

ComplexMatrix kagome_s_conjugator(const FluxRational& flux, const ThetaPoint& theta) {
  const int q = flux.qi();
  ComplexMatrix w = ComplexMatrix::Zero(3 * q, 3 * q);
  w.block(0, 0, q, q) = expi(-theta.theta1) * clock_matrix(flux).adjoint();
  w.block(q, q, q, q) = identity(q);
  w.block(2 * q, 2 * q, q, q) = expi(theta.theta2) * shift_matrix(q);
  return w;
}

ComplexMatrix kagome_n_matrix(const FluxRational& flux, const ThetaPoint& theta, double omega) {
  const double shift = static_cast<double>(flux.p()) * kPi;
  const double sign = (flux.p() % 2 == 0) ? 1.0 : -1.0;
  return sign * model_matrix(ModelSpec::kagome(omega), flux,
                             ThetaPoint{theta.theta1 + shift, theta.theta2 + shift});
}

ComplexMatrix kagome_rotation_conjugator(const FluxRational& flux) {
  const int q = flux.qi();
  const ComplexMatrix v = v_unitary(flux);
  ComplexMatrix p = ComplexMatrix::Zero(3 * q, 3 * q);
  p.block(0, q, q, q) = v;
  p.block(q, 2 * q, q, q) = v;
  p.block(2 * q, 0, q, q) = v;
  return p;
}

ComplexMatrix kagome_reflection_conjugator(const FluxRational& flux) {
  const int q = flux.qi();
  const ComplexMatrix u = fourier_unitary(flux);
  ComplexMatrix p = ComplexMatrix::Zero(3 * q, 3 * q);
  p.block(0, 2 * q, q, q) = u;
  p.block(q, q, q, q) = u;
  p.block(2 * q, 0, q, q) = u;
  return p;
}

ThetaPoint rotate_theta(const ThetaPoint& t) { return {t.theta2 - t.theta1, -t.theta1}; }
ThetaPoint reflect_theta(const ThetaPoint& t) { return {t.theta2, t.theta1}; }

IdentityReport verify_symmetries(const FluxRational& flux, double omega, int samples, std::uint64_t seed,
                                 double tolerance) {
  IdentityReport report(seed);
  const int q = flux.qi();
  const double g = flux.gamma();
  const ComplexMatrix j = clock_matrix(flux);
  const ComplexMatrix k = shift_matrix(q);
  const ComplexMatrix u = fourier_unitary(flux);
  const ComplexMatrix v = v_unitary(flux);
  const ComplexMatrix l = l_matrix(flux);
  const Complex phase = expi(-g);

  report.record("commutation_jk", max_abs(j * k - phase * k * j), tolerance);
  report.record("commutation_kstar_j", max_abs(k.adjoint() * j - phase * j * k.adjoint()), tolerance);
  report.record("unitarity", std::max({unitarity_residual(j), unitarity_residual(k), unitarity_residual(u),
                                       unitarity_residual(v)}),
                tolerance);
  report.record("power_q_identity",
                std::max(max_abs(integer_power(j, q) - identity(q)), max_abs(integer_power(k, q) - identity(q))),
                tolerance);
  report.record("fourier_kstar_to_j", max_abs(u.adjoint() * k.adjoint() * u - j), tolerance);
  report.record("fourier_j_to_k", max_abs(u.adjoint() * j * u - k), tolerance);
  report.record("v_kstar_to_j", max_abs(v.adjoint() * k.adjoint() * v - j), tolerance);
  report.record("v_j_to_l", max_abs(v.adjoint() * j * v - l), tolerance);
  report.record("v_l_to_kstar", max_abs(v.adjoint() * l * v - k.adjoint()), tolerance);

  double trace_residual = 0.0;
  for (int a = 0; a < 3 * q; ++a)
    for (int b = 0; b < 3 * q; ++b) {
      const Complex expected = (a % q == 0 && b % q == 0) ? Complex(q, 0) : Complex(0, 0);
      trace_residual = std::max(trace_residual, std::abs(trace_word(flux, a, b) - expected));
    }
  report.record("trace_identity", trace_residual, tolerance);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  std::uniform_int_distribution<int> cell(0, q - 1);
  const ComplexMatrix pr = kagome_rotation_conjugator(flux);
  const ComplexMatrix ps = kagome_reflection_conjugator(flux);
  const ModelSpec models[] = {ModelSpec::square(), ModelSpec::triangular(), ModelSpec::hexagonal(),
                              ModelSpec::kagome(omega)};
  for (int s = 0; s < samples; ++s) {
    const ThetaPoint t{angle(rng), angle(rng)};

    const ComplexMatrix mk = model_matrix(ModelSpec::kagome(omega), flux, t);
    const ComplexMatrix w = kagome_s_conjugator(flux, t);
    const ComplexMatrix sm = kagome_s_matrix(flux, t, omega);
    report.record("s_similarity", max_abs(w.adjoint() * mk * w - sm), tolerance);
    report.record("s_unitary_conjugator", unitarity_residual(w), tolerance);
    report.record("s_spectrum", spectrum_distance(hermitian_eigenvalues(mk), hermitian_eigenvalues(sm)), tolerance);

    const ComplexMatrix n = kagome_n_matrix(flux, t, omega);
    const ComplexMatrix nr = kagome_n_matrix(flux, rotate_theta(t), omega);
    const ComplexMatrix ns = kagome_n_matrix(flux, reflect_theta(t), omega);
    const RealVector en = hermitian_eigenvalues(n);
    report.record("n_rotation_conjugation", max_abs(pr.adjoint() * nr * pr - n), tolerance);
    report.record("n_reflection_conjugation", max_abs(ps.adjoint() * ns.conjugate() * ps - n), tolerance);
    report.record("n_rotation_spectrum", spectrum_distance(hermitian_eigenvalues(nr), en), tolerance);
    report.record("n_reflection_spectrum", spectrum_distance(hermitian_eigenvalues(ns), en), tolerance);

    // Full Hermitian eigensolve: model_eigenvalues would make the symmetry hold by construction.
    const RealVector eg = hermitian_eigenvalues(model_matrix(ModelSpec::hexagonal(), flux, t));
    report.record("graphene_chiral_symmetry", spectrum_distance(eg, -eg.reverse()), tolerance);

    const double period = 2.0 * kPi / q;
    const ThetaPoint shifted{t.theta1 + period * cell(rng), t.theta2 + period * cell(rng)};
    for (const auto& model : models) {
      const ComplexMatrix m = model_matrix(model, flux, t);
      report.record("hermitian", max_abs(m - m.adjoint()), tolerance);
      report.record("periodicity_spectrum",
                    spectrum_distance(hermitian_eigenvalues(m), model_eigenvalues(model, flux, shifted)),
                    tolerance);
    }
  }
  return report;
}

}  // namespace butterfly_lab
