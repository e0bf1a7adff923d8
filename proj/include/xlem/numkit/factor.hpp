#pragma once

#include <cstddef>
#include <vector>

#include "xlem/numkit/dense.hpp"

namespace xlem::numkit {

// Thin Householder QR of A (m x n, m >= n): A = Q R with Q m x n
// (orthonormal columns) and R n x n upper triangular.
struct QrResult {
    DenseMatrix Q;
    DenseMatrix R;
};
QrResult qr_thin(const DenseMatrix &A);

// Orthonormal basis of A's column span (the Q factor alone).
DenseMatrix qr_q(const DenseMatrix &A);

// Least-squares pseudoinverse application: P (n x m) solving min ||B P - I||
// for B (m x n) with full column rank, computed as B = QR, R P = Q^T.
// Near-singular R triggers a diagonal ridge (1e-10 * max |R_ii|) and sets
// `degraded`.
struct PinvResult {
    DenseMatrix P;
    bool degraded = false;
};
PinvResult aligned_basis_pinv(const DenseMatrix &B);

// Cholesky D = K^T K with K upper triangular. On a non-positive pivot the
// factorization restarts with D + eps*I for eps in
// {1e-10, 1e-8, 1e-6} * trace(D)/k; `ridge` reports the eps used (0 if none).
// Throws DataError when every ridge level fails.
struct CholResult {
    DenseMatrix K;
    double ridge = 0.0;
};
CholResult cholesky_ridge(const DenseMatrix &D);

// Triangular solves with an upper-triangular R (n x n), B (n x m):
//   solve_upper:   R X = B      (back substitution)
//   solve_upper_t: R^T X = B    (forward substitution)
DenseMatrix solve_upper(const DenseMatrix &R, const DenseMatrix &B);
DenseMatrix solve_upper_t(const DenseMatrix &R, const DenseMatrix &B);

}  // namespace xlem::numkit
