#pragma once

#include <vector>

#include "qkac/matrix.hpp"

namespace qkac {

struct LinalgOptions {
    /// Accept M as Hermitian when max|M - M^dagger| <= hermitian_tol * max(1, max|M|).
    double hermitian_tol = 1e-10;
    int max_sweeps = 100;
    /// Jacobi stops once the off-diagonal Frobenius norm is below this times ||M||_F.
    double offdiag_rel_threshold = 1e-12;
};

struct HermitianEigen {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // columns
    int sweeps = 0;
};

bool is_hermitian(const ComplexMatrix& m, const LinalgOptions& opts = {});

/// Throws NotHermitian unless is_hermitian(m, opts).
void require_hermitian(const ComplexMatrix& m, const LinalgOptions& opts = {});

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Sweeps visit all index pairs in round-robin (tournament) order: each round
/// applies n/2 disjoint rotations at once, which lets the column and row updates
/// stream over contiguous memory. The result satisfies M = U diag(lambda) U^dagger.
HermitianEigen herm_eigen(const ComplexMatrix& m, const LinalgOptions& opts = {});

/// Sum of singular values. Hermitian input takes the sum of |eigenvalues|,
/// anything else goes through the eigenvalues of M^dagger M.
double trace_norm(const ComplexMatrix& m, const LinalgOptions& opts = {});

/// Largest singular value.
double operator_norm(const ComplexMatrix& m, const LinalgOptions& opts = {});

/// U f(Lambda) U^dagger for an eigendecomposition and per-eigenvalue function values.
ComplexMatrix reconstruct(const HermitianEigen& eig, const std::vector<Complex>& values);

/// exp(-i t H) for Hermitian H.
ComplexMatrix herm_expm(const ComplexMatrix& h, double t, const LinalgOptions& opts = {});
ComplexMatrix herm_expm(const HermitianEigen& eig, double t);

}  // namespace qkac
