#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xlem/numkit/dense.hpp"
#include "xlem/numkit/sparse.hpp"

namespace xlem::numkit {

// Matrix-free operator abstraction so the randomized SVD can run over dense
// matrices, sparse matrices, or stacked compositions without materializing
// the stack.
class LinOp {
  public:
    virtual ~LinOp() = default;
    virtual std::size_t rows() const = 0;
    virtual std::size_t cols() const = 0;
    virtual DenseMatrix apply(const DenseMatrix &B) const = 0;    // A  * B
    virtual DenseMatrix apply_t(const DenseMatrix &B) const = 0;  // A^T * B
};

class DenseOp final : public LinOp {
  public:
    explicit DenseOp(const DenseMatrix &A) : a_(A) {}
    std::size_t rows() const override { return a_.rows(); }
    std::size_t cols() const override { return a_.cols(); }
    DenseMatrix apply(const DenseMatrix &B) const override;
    DenseMatrix apply_t(const DenseMatrix &B) const override;

  private:
    const DenseMatrix &a_;
};

class SparseOp final : public LinOp {
  public:
    explicit SparseOp(const CscMatrix &A) : a_(A) {}
    std::size_t rows() const override { return a_.rows(); }
    std::size_t cols() const override { return a_.cols(); }
    DenseMatrix apply(const DenseMatrix &B) const override;
    DenseMatrix apply_t(const DenseMatrix &B) const override;

  private:
    const CscMatrix &a_;
};

// Vertical stack [A_1; A_2; ...] of sparse blocks sharing a column count.
class SparseVStackOp final : public LinOp {
  public:
    explicit SparseVStackOp(const std::vector<const CscMatrix *> &blocks);
    std::size_t rows() const override { return rows_; }
    std::size_t cols() const override { return cols_; }
    DenseMatrix apply(const DenseMatrix &B) const override;
    DenseMatrix apply_t(const DenseMatrix &B) const override;

  private:
    std::vector<const CscMatrix *> blocks_;
    std::vector<std::size_t> row_offset_;
    std::size_t rows_ = 0, cols_ = 0;
};

// Horizontal stack [A_1, A_2, ...] of dense blocks sharing a row count.
class DenseHStackOp final : public LinOp {
  public:
    explicit DenseHStackOp(const std::vector<const DenseMatrix *> &blocks);
    std::size_t rows() const override { return rows_; }
    std::size_t cols() const override { return cols_; }
    DenseMatrix apply(const DenseMatrix &B) const override;
    DenseMatrix apply_t(const DenseMatrix &B) const override;

  private:
    std::vector<const DenseMatrix *> blocks_;
    std::vector<std::size_t> col_offset_;
    std::size_t rows_ = 0, cols_ = 0;
};

struct SvdResult {
    DenseMatrix U;          // rows x k, orthonormal columns
    std::vector<double> S;  // k singular values, nonincreasing
    DenseMatrix V;          // cols x k, orthonormal columns
    bool oversample_clamped = false;  // requested oversample did not fit
};

// Full SVD of a small dense matrix by one-sided Jacobi orthogonalization of
// the columns (exact up to roundoff; cost O(rows * cols^2) per sweep).
SvdResult jacobi_svd(const DenseMatrix &A);

// Randomized truncated SVD: gaussian range finder with `power` subspace
// iterations (re-orthonormalized every step), then an exact small SVD of the
// projected problem. Defaults: oversample 10, power 2. The oversample count
// is clamped to min(rows, cols) - k when the requested value does not fit.
SvdResult truncated_svd(const LinOp &A, std::size_t k, std::uint64_t seed,
                        std::size_t oversample = 10, std::size_t power = 2);

}  // namespace xlem::numkit
