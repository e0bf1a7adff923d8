#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace xlem::numkit {

// Column-major dense matrix of doubles. Columns are contiguous, which fits
// the usage here: document vectors and projected points live in columns.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return a_.empty(); }

    double &operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return a_[j * rows_ + i];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return a_[j * rows_ + i];
    }

    double *col(std::size_t j) {
        assert(j < cols_);
        return a_.data() + j * rows_;
    }
    const double *col(std::size_t j) const {
        assert(j < cols_);
        return a_.data() + j * rows_;
    }

    double *data() { return a_.data(); }
    const double *data() const { return a_.data(); }

    void fill(double v) { a_.assign(a_.size(), v); }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
        return t;
    }

    // Columns [j0, j0+n) as a fresh matrix.
    DenseMatrix col_range(std::size_t j0, std::size_t n) const {
        assert(j0 + n <= cols_);
        DenseMatrix r(rows_, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < rows_; ++i) r(i, j) = (*this)(i, j0 + j);
        return r;
    }

    // Rows [i0, i0+n) as a fresh matrix.
    DenseMatrix row_range(std::size_t i0, std::size_t n) const {
        assert(i0 + n <= rows_);
        DenseMatrix r(n, cols_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t i = 0; i < n; ++i) r(i, j) = (*this)(i0 + i, j);
        return r;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

}  // namespace xlem::numkit
