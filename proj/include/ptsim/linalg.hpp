#pragma once

#include <cstddef>
#include <vector>

#include "ptsim/matrix.hpp"

namespace ptsim {

/// Unitary triangularisation A = rotation * triangular * rotation^dagger.
///
/// The diagonal of `triangular` is ordered by descending imaginary part (least
/// decaying mode first), ties broken by ascending real part. Rotation phases
/// and, for degenerate eigenvalues, the rotation itself are not unique;
/// consumers should rely only on reconstruction, unitarity and triangularity.
struct SchurFactorization {
    CMatrix rotation;
    CMatrix triangular;
    std::vector<cplx> diagonal_order;
};

/// Hard cap for the permanent (cost 2^N * N).
inline constexpr std::size_t kMaxPermanentSize = 20;

/// exp(A * t) by scaling and squaring with a degree-13 Pade approximant.
/// Valid for defective A.
CMatrix mat_exp(const CMatrix& a, double t);

/// Householder-Hessenberg reduction followed by single-shift complex QR.
/// Throws NumericalError when the iteration budget (100 N^2 sweeps) runs out.
SchurFactorization schur_decompose(const CMatrix& a);

/// All eigenvalues with multiplicity, in Schur diagonal order.
std::vector<cplx> eigenvalues(const CMatrix& a);

/// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const CMatrix& a);

/// Partial-pivoting LU determinant.
cplx determinant(const CMatrix& a);

/// Ryser inclusion-exclusion with Gray-code column toggling.
cplx permanent(const CMatrix& a);

/// Largest singular value.
double spectral_norm(const CMatrix& a);

/// Solve A X = B with partial pivoting.
CMatrix solve(const CMatrix& a, const CMatrix& b);

}  // namespace ptsim
