#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "butterfly_lab/flux.hpp"
#include "butterfly_lab/report.hpp"

namespace butterfly_lab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// max|M - M^*| <= rel_tol * max|M|.
bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);
double max_abs(const ComplexMatrix& m);

// J = diag(e^{i j gamma}), j = 0..q-1.
ComplexMatrix clock_matrix(const FluxRational& flux);
// K(j, j+1 mod q) = 1.
ComplexMatrix shift_matrix(int q);

// Floquet matrix of the chosen lattice at Bloch point theta.
ComplexMatrix model_matrix(const ModelSpec& model, const FluxRational& flux, const ThetaPoint& theta);
// Sorted eigenvalues of model_matrix.
RealVector model_eigenvalues(const ModelSpec& model, const FluxRational& flux, const ThetaPoint& theta);
RealVector hermitian_eigenvalues(const ComplexMatrix& m);

// U(j,k) = q^{-1/2} e^{-i gamma j k}; U^*K^*U = J, U^*JU = K.
ComplexMatrix fourier_unitary(const FluxRational& flux);
// V = U D with the recursive phase diagonal D; V^*K^*V = J, V^*JV = L, V^*LV = K^*.
ComplexMatrix v_unitary(const FluxRational& flux);
// L = (-1)^p e^{-i gamma/2} J^* K.
ComplexMatrix l_matrix(const FluxRational& flux);

// Tr(J^a K^b) by explicit products.
Complex trace_word(const FluxRational& flux, int a, int b);

// Kagome similarity machinery.
ComplexMatrix kagome_s_matrix(const FluxRational& flux, const ThetaPoint& theta, double omega);
// W with W^* M_K W = S.
ComplexMatrix kagome_s_conjugator(const FluxRational& flux, const ThetaPoint& theta);
// N(theta) = (-1)^p M_K(theta + p*pi, omega).
ComplexMatrix kagome_n_matrix(const FluxRational& flux, const ThetaPoint& theta, double omega);
// P_r^* N(r theta) P_r = N(theta), r(t1, t2) = (t2 - t1, -t1).
ComplexMatrix kagome_rotation_conjugator(const FluxRational& flux);
// P_s^* conj(N(s theta)) P_s = N(theta), s(t1, t2) = (t2, t1).
ComplexMatrix kagome_reflection_conjugator(const FluxRational& flux);

ThetaPoint rotate_theta(const ThetaPoint& t);
ThetaPoint reflect_theta(const ThetaPoint& t);

// Max residuals of the algebraic identities over `samples` pseudo-random theta.
IdentityReport verify_symmetries(const FluxRational& flux, double omega, int samples,
                                 std::uint64_t seed = 42, double tolerance = 1e-10);

}  // namespace butterfly_lab
