#pragma once

#include "fockcat/types.hpp"

namespace fockcat::linalg {

/// exp(G) for anti-Hermitian G, via the eigendecomposition of the Hermitian
/// matrix iG. The result is unitary to working precision.
CMatrix expm_antihermitian(const CMatrix& generator);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues below
/// `floor` (relative to the largest) are treated as zero.
CMatrix sqrt_psd(const CMatrix& m, double floor = 1e-13);

/// Largest elementwise |M - M^dagger|.
double hermiticity_deviation(const CMatrix& m);

RVector hermitian_eigenvalues(const CMatrix& m);

/// Kronecker product a (x) b, with b's index running fastest.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Frobenius-norm distance to the identity of U * U^dagger.
double unitarity_defect(const CMatrix& u);

}  // namespace fockcat::linalg
