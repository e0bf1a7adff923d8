#pragma once

#include <cstddef>

#include "xlem/numkit/dense.hpp"
#include "xlem/numkit/sparse.hpp"

namespace xlem::numkit {

// Global knobs set once by the CLI / test harness.
void set_num_threads(int n);   // n <= 0 leaves the OpenMP default
int num_threads();
void set_block_size(std::size_t b);  // column-block width for blocked_gram
std::size_t default_block_size();

// C = A^T B for A (k x p), B (k x q), processing B in column blocks.
// Each output entry is one contiguous dot product, so results are identical
// across thread counts and block sizes.
DenseMatrix blocked_gram(const DenseMatrix &A, const DenseMatrix &B,
                         std::size_t block = 0);

// Streaming variant: computes A^T B for one block of B columns into `out`
// (p x nb). Used by the throughput benchmark to avoid materializing huge
// products.
void blocked_gram_into(const DenseMatrix &A, const DenseMatrix &B,
                       std::size_t b0, std::size_t nb, DenseMatrix &out);

// C = A B (dense). Column-major friendly: each output column is a fixed-order
// accumulation over A's columns.
DenseMatrix matmul(const DenseMatrix &A, const DenseMatrix &B);

// Y = P X for dense P (k x n) and sparse X (n x s); Y is k x s.
DenseMatrix spmm(const DenseMatrix &P, const CscMatrix &X);

// Z = X^T B for sparse X (n x s) and dense B (n x l); Z is s x l.
DenseMatrix spmm_t(const CscMatrix &X, const DenseMatrix &B);

// C = X Y^T for sparse X (n1 x s), Y (n2 x s) sharing the column index set;
// dense n1 x n2 accumulation of per-column outer products (covariance
// building block). Serial by design: scatter writes do not parallelize
// deterministically and this is not on the hot path.
DenseMatrix sparse_cross(const CscMatrix &X, const CscMatrix &Y);

namespace serial {
// Reference implementations: naive loops, no OpenMP, no blocking. Kept for
// equivalence tests and as the baseline side of the benchmark.
DenseMatrix blocked_gram(const DenseMatrix &A, const DenseMatrix &B);
DenseMatrix matmul(const DenseMatrix &A, const DenseMatrix &B);
DenseMatrix spmm(const DenseMatrix &P, const CscMatrix &X);
DenseMatrix spmm_t(const CscMatrix &X, const DenseMatrix &B);
}  // namespace serial

}  // namespace xlem::numkit
