#include "xlem/numkit/kernels.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "xlem/error.hpp"

namespace xlem::numkit {

namespace {
std::size_t g_block = 256;
}

void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_block_size(std::size_t b) {
    if (b > 0) g_block = b;
}

std::size_t default_block_size() { return g_block; }

namespace {

// Dot product of two contiguous arrays with four independent accumulators.
// The summation order is fixed (does not depend on threads or blocking), so
// every caller gets bitwise-identical results run to run.
inline double dot(const double *a, const double *b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3));
}

}  // namespace

void blocked_gram_into(const DenseMatrix &A, const DenseMatrix &B,
                       std::size_t b0, std::size_t nb, DenseMatrix &out) {
    if (A.rows() != B.rows()) throw DataError("blocked_gram: inner dimension mismatch");
    const std::size_t k = A.rows(), p = A.cols();
    if (out.rows() != p || out.cols() != nb) out = DenseMatrix(p, nb);
#pragma omp parallel for schedule(static)
    for (long long jj = 0; jj < static_cast<long long>(nb); ++jj) {
        const std::size_t j = b0 + static_cast<std::size_t>(jj);
        const double *bj = B.col(j);
        double *oj = out.col(static_cast<std::size_t>(jj));
        for (std::size_t i = 0; i < p; ++i) oj[i] = dot(A.col(i), bj, k);
    }
}

DenseMatrix blocked_gram(const DenseMatrix &A, const DenseMatrix &B,
                         std::size_t block) {
    if (A.rows() != B.rows()) throw DataError("blocked_gram: inner dimension mismatch");
    if (block == 0) block = g_block;
    const std::size_t p = A.cols(), q = B.cols();
    DenseMatrix C(p, q);
    DenseMatrix tile;
    for (std::size_t b0 = 0; b0 < q; b0 += block) {
        const std::size_t nb = std::min(block, q - b0);
        blocked_gram_into(A, B, b0, nb, tile);
        for (std::size_t j = 0; j < nb; ++j) {
            const double *src = tile.col(j);
            double *dst = C.col(b0 + j);
            for (std::size_t i = 0; i < p; ++i) dst[i] = src[i];
        }
    }
    return C;
}

DenseMatrix matmul(const DenseMatrix &A, const DenseMatrix &B) {
    if (A.cols() != B.rows()) throw DataError("matmul: inner dimension mismatch");
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    DenseMatrix C(m, n);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(n); ++j) {
        double *cj = C.col(static_cast<std::size_t>(j));
        const double *bj = B.col(static_cast<std::size_t>(j));
        for (std::size_t l = 0; l < k; ++l) {
            const double f = bj[l];
            if (f == 0.0) continue;
            const double *al = A.col(l);
            for (std::size_t i = 0; i < m; ++i) cj[i] += f * al[i];
        }
    }
    return C;
}

DenseMatrix spmm(const DenseMatrix &P, const CscMatrix &X) {
    if (P.cols() != X.rows()) throw DataError("spmm: inner dimension mismatch");
    const std::size_t k = P.rows(), s = X.cols();
    DenseMatrix Y(k, s);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(s); ++j) {
        double *yj = Y.col(static_cast<std::size_t>(j));
        const std::size_t j0 = X.col_begin(static_cast<std::size_t>(j));
        const std::size_t j1 = X.col_end(static_cast<std::size_t>(j));
        for (std::size_t t = j0; t < j1; ++t) {
            const double v = X.value_at(t);
            const double *pc = P.col(X.row_at(t));
            for (std::size_t i = 0; i < k; ++i) yj[i] += v * pc[i];
        }
    }
    return Y;
}

DenseMatrix spmm_t(const CscMatrix &X, const DenseMatrix &B) {
    if (X.rows() != B.rows()) throw DataError("spmm_t: inner dimension mismatch");
    const std::size_t s = X.cols(), l = B.cols();
    DenseMatrix Z(s, l);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(s); ++j) {
        const std::size_t j0 = X.col_begin(static_cast<std::size_t>(j));
        const std::size_t j1 = X.col_end(static_cast<std::size_t>(j));
        for (std::size_t c = 0; c < l; ++c) {
            const double *bc = B.col(c);
            double acc = 0.0;
            for (std::size_t t = j0; t < j1; ++t)
                acc += X.value_at(t) * bc[X.row_at(t)];
            Z(static_cast<std::size_t>(j), c) = acc;
        }
    }
    return Z;
}

DenseMatrix sparse_cross(const CscMatrix &X, const CscMatrix &Y) {
    if (X.cols() != Y.cols()) throw DataError("sparse_cross: column count mismatch");
    DenseMatrix C(X.rows(), Y.rows());
    for (std::size_t d = 0; d < X.cols(); ++d) {
        for (std::size_t ty = Y.col_begin(d); ty < Y.col_end(d); ++ty) {
            const double vy = Y.value_at(ty);
            double *cc = C.col(Y.row_at(ty));
            for (std::size_t tx = X.col_begin(d); tx < X.col_end(d); ++tx)
                cc[X.row_at(tx)] += X.value_at(tx) * vy;
        }
    }
    return C;
}

namespace serial {

DenseMatrix blocked_gram(const DenseMatrix &A, const DenseMatrix &B) {
    if (A.rows() != B.rows()) throw DataError("gram: inner dimension mismatch");
    const std::size_t k = A.rows(), p = A.cols(), q = B.cols();
    DenseMatrix C(p, q);
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += A(t, i) * B(t, j);
            C(i, j) = s;
        }
    return C;
}

DenseMatrix matmul(const DenseMatrix &A, const DenseMatrix &B) {
    if (A.cols() != B.rows()) throw DataError("matmul: inner dimension mismatch");
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    DenseMatrix C(m, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t t = 0; t < k; ++t) s += A(i, t) * B(t, j);
            C(i, j) = s;
        }
    return C;
}

DenseMatrix spmm(const DenseMatrix &P, const CscMatrix &X) {
    return serial::matmul(P, X.to_dense());
}

DenseMatrix spmm_t(const CscMatrix &X, const DenseMatrix &B) {
    return serial::matmul(X.to_dense().transposed(), B);
}

}  // namespace serial

}  // namespace xlem::numkit
