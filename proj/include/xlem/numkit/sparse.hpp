#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "xlem/error.hpp"
#include "xlem/numkit/dense.hpp"

namespace xlem::numkit {

struct Triplet {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double value = 0.0;
};

// Compressed sparse column matrix. Documents are columns, so CSC gives
// contiguous access to one document's term weights.
class CscMatrix {
  public:
    CscMatrix() = default;
    CscMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), col_ptr_(cols + 1, 0) {}

    // Builds from triplets in any order; duplicates of the same (row, col)
    // are summed. Out-of-range coordinates raise DataError.
    static CscMatrix from_triplets(std::size_t rows, std::size_t cols,
                                   std::vector<Triplet> trips) {
        for (const Triplet &t : trips) {
            if (t.row >= rows || t.col >= cols)
                throw DataError("sparse triplet out of range");
        }
        std::sort(trips.begin(), trips.end(),
                  [](const Triplet &a, const Triplet &b) {
                      return a.col != b.col ? a.col < b.col : a.row < b.row;
                  });
        CscMatrix m(rows, cols);
        m.row_idx_.reserve(trips.size());
        m.values_.reserve(trips.size());
        std::size_t k = 0;
        for (std::size_t j = 0; j < cols; ++j) {
            m.col_ptr_[j] = m.row_idx_.size();
            while (k < trips.size() && trips[k].col == j) {
                if (!m.row_idx_.empty() && m.col_ptr_[j] < m.row_idx_.size() &&
                    m.row_idx_.back() == trips[k].row) {
                    m.values_.back() += trips[k].value;
                } else {
                    m.row_idx_.push_back(trips[k].row);
                    m.values_.push_back(trips[k].value);
                }
                ++k;
            }
        }
        m.col_ptr_[cols] = m.row_idx_.size();
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::size_t col_begin(std::size_t j) const { return col_ptr_[j]; }
    std::size_t col_end(std::size_t j) const { return col_ptr_[j + 1]; }
    std::uint32_t row_at(std::size_t k) const { return row_idx_[k]; }
    double value_at(std::size_t k) const { return values_[k]; }
    double &value_at(std::size_t k) { return values_[k]; }

    // Appends one column given strictly increasing row indices. Used when
    // vectorizing documents one at a time.
    void push_col(const std::vector<std::uint32_t> &rows,
                  const std::vector<double> &values) {
        assert(rows.size() == values.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            assert(rows[k] < rows_);
            assert(k == 0 || rows[k] > rows[k - 1]);
            row_idx_.push_back(rows[k]);
            values_.push_back(values[k]);
        }
        col_ptr_.push_back(row_idx_.size());
        ++cols_;
    }

    // For a matrix built with push_col starting from (rows, 0).
    static CscMatrix empty_cols(std::size_t rows) {
        CscMatrix m;
        m.rows_ = rows;
        m.col_ptr_.assign(1, 0);
        return m;
    }

    double col_norm(std::size_t j) const {
        double s = 0.0;
        for (std::size_t k = col_begin(j); k < col_end(j); ++k)
            s += values_[k] * values_[k];
        return s > 0.0 ? std::sqrt(s) : 0.0;
    }

    void scale_col(std::size_t j, double f) {
        for (std::size_t k = col_begin(j); k < col_end(j); ++k) values_[k] *= f;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(rows_, cols_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t k = col_begin(j); k < col_end(j); ++k)
                d(row_idx_[k], j) = values_[k];
        return d;
    }

    CscMatrix select_cols(const std::vector<std::size_t> &idx) const {
        CscMatrix m = empty_cols(rows_);
        std::vector<std::uint32_t> r;
        std::vector<double> v;
        for (std::size_t j : idx) {
            assert(j < cols_);
            r.clear();
            v.clear();
            for (std::size_t k = col_begin(j); k < col_end(j); ++k) {
                r.push_back(row_idx_[k]);
                v.push_back(values_[k]);
            }
            m.push_col(r, v);
        }
        return m;
    }

    std::vector<Triplet> to_triplets() const {
        std::vector<Triplet> t;
        t.reserve(nnz());
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t k = col_begin(j); k < col_end(j); ++k)
                t.push_back({row_idx_[k], static_cast<std::uint32_t>(j), values_[k]});
        return t;
    }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::size_t> col_ptr_;
    std::vector<std::uint32_t> row_idx_;
    std::vector<double> values_;
};

}  // namespace xlem::numkit
