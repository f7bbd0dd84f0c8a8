#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "butterfly_lab/lattice.hpp"
#include "butterfly_lab/report.hpp"

namespace butterfly_lab {

// det(M) by partial-pivot LU.
Complex lu_determinant(const ComplexMatrix& m);

// det(lambda I - M) = prod (lambda - e_i) over Hermitian eigenvalues e.
double charpoly_from_eigenvalues(const RealVector& eigenvalues, double lambda);

// Ascending coefficients of det(lambda I - M), leading coefficient exactly 1.
// Values det(lambda I - M) are taken by LU at dim+1 Chebyshev nodes spanning the
// Gershgorin disc and interpolated. Hermitian inputs get real coefficients;
// throws NumericalError if their imaginary residue exceeds 1e-10 (relative).
std::vector<Complex> char_poly(const ComplexMatrix& m);

struct GrapheneDet {
  Complex direct;
  Complex closed_form;
};

// det(-lambda I + e^{i t1} J + e^{i t2} K) by LU and by (-1)^q (lambda^q - e^{i q t1} - e^{i q t2}).
GrapheneDet reduced_graphene_det(const FluxRational& flux, const ThetaPoint& theta, Complex lambda);

// Relative residual of det(lambda - M_G) = (-1)^q det(M_T(theta, 0) + 3 - lambda^2)
// over random (theta, lambda), both sides by LU.
IdentityReport graphene_factorization_check(const FluxRational& flux, int samples, std::uint64_t seed = 42,
                                            double tolerance = 1e-10);

}  // namespace butterfly_lab
