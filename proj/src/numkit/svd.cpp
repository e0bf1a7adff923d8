#include "xlem/numkit/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xlem/error.hpp"
#include "xlem/numkit/factor.hpp"
#include "xlem/numkit/kernels.hpp"
#include "xlem/numkit/rng.hpp"

namespace xlem::numkit {

DenseMatrix DenseOp::apply(const DenseMatrix &B) const { return matmul(a_, B); }
DenseMatrix DenseOp::apply_t(const DenseMatrix &B) const {
    return blocked_gram(a_, B);
}

DenseMatrix SparseOp::apply(const DenseMatrix &B) const {
    // A * B with A sparse: accumulate column contributions of A scaled by B's
    // rows; equivalent to (B^T A^T)^T but cheaper to do directly.
    if (a_.cols() != B.rows()) throw DataError("SparseOp::apply: shape mismatch");
    DenseMatrix Y(a_.rows(), B.cols());
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(B.cols()); ++c) {
        double *yc = Y.col(static_cast<std::size_t>(c));
        const double *bc = B.col(static_cast<std::size_t>(c));
        for (std::size_t j = 0; j < a_.cols(); ++j) {
            const double f = bc[j];
            if (f == 0.0) continue;
            for (std::size_t t = a_.col_begin(j); t < a_.col_end(j); ++t)
                yc[a_.row_at(t)] += f * a_.value_at(t);
        }
    }
    return Y;
}

DenseMatrix SparseOp::apply_t(const DenseMatrix &B) const {
    return spmm_t(a_, B);
}

SparseVStackOp::SparseVStackOp(const std::vector<const CscMatrix *> &blocks)
    : blocks_(blocks) {
    if (blocks_.empty()) throw DataError("SparseVStackOp: no blocks");
    cols_ = blocks_[0]->cols();
    for (const CscMatrix *b : blocks_) {
        if (b->cols() != cols_) throw DataError("SparseVStackOp: column mismatch");
        row_offset_.push_back(rows_);
        rows_ += b->rows();
    }
}

DenseMatrix SparseVStackOp::apply(const DenseMatrix &B) const {
    if (cols_ != B.rows()) throw DataError("SparseVStackOp::apply: shape mismatch");
    DenseMatrix Y(rows_, B.cols());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        DenseMatrix Yi = SparseOp(*blocks_[bi]).apply(B);
        for (std::size_t c = 0; c < Yi.cols(); ++c)
            for (std::size_t i = 0; i < Yi.rows(); ++i)
                Y(row_offset_[bi] + i, c) = Yi(i, c);
    }
    return Y;
}

DenseMatrix SparseVStackOp::apply_t(const DenseMatrix &B) const {
    if (rows_ != B.rows()) throw DataError("SparseVStackOp::apply_t: shape mismatch");
    DenseMatrix Z(cols_, B.cols());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const DenseMatrix Bi = B.row_range(row_offset_[bi], blocks_[bi]->rows());
        DenseMatrix Zi = spmm_t(*blocks_[bi], Bi);
        for (std::size_t c = 0; c < Z.cols(); ++c)
            for (std::size_t i = 0; i < cols_; ++i) Z(i, c) += Zi(i, c);
    }
    return Z;
}

DenseHStackOp::DenseHStackOp(const std::vector<const DenseMatrix *> &blocks)
    : blocks_(blocks) {
    if (blocks_.empty()) throw DataError("DenseHStackOp: no blocks");
    rows_ = blocks_[0]->rows();
    for (const DenseMatrix *b : blocks_) {
        if (b->rows() != rows_) throw DataError("DenseHStackOp: row mismatch");
        col_offset_.push_back(cols_);
        cols_ += b->cols();
    }
}

DenseMatrix DenseHStackOp::apply(const DenseMatrix &B) const {
    if (cols_ != B.rows()) throw DataError("DenseHStackOp::apply: shape mismatch");
    DenseMatrix Y(rows_, B.cols());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const DenseMatrix Bi = B.row_range(col_offset_[bi], blocks_[bi]->cols());
        DenseMatrix Yi = matmul(*blocks_[bi], Bi);
        for (std::size_t c = 0; c < Y.cols(); ++c)
            for (std::size_t i = 0; i < rows_; ++i) Y(i, c) += Yi(i, c);
    }
    return Y;
}

DenseMatrix DenseHStackOp::apply_t(const DenseMatrix &B) const {
    if (rows_ != B.rows()) throw DataError("DenseHStackOp::apply_t: shape mismatch");
    DenseMatrix Z(cols_, B.cols());
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        DenseMatrix Zi = blocked_gram(*blocks_[bi], B);
        for (std::size_t c = 0; c < Z.cols(); ++c)
            for (std::size_t i = 0; i < Zi.rows(); ++i)
                Z(col_offset_[bi] + i, c) = Zi(i, c);
    }
    return Z;
}

namespace {

void fix_signs(DenseMatrix &U, DenseMatrix &V) {
    for (std::size_t c = 0; c < U.cols(); ++c) {
        double big = 0.0;
        for (std::size_t i = 0; i < U.rows(); ++i)
            if (std::abs(U(i, c)) > std::abs(big)) big = U(i, c);
        if (big < 0.0) {
            for (std::size_t i = 0; i < U.rows(); ++i) U(i, c) = -U(i, c);
            if (c < V.cols())
                for (std::size_t i = 0; i < V.rows(); ++i) V(i, c) = -V(i, c);
        }
    }
}

}  // namespace

SvdResult jacobi_svd(const DenseMatrix &A) {
    const std::size_t m = A.rows(), n = A.cols();
    if (m < n) {
        // Work on the transpose so the Jacobi sweeps always run over the
        // smaller column count, then swap the factors back.
        SvdResult t = jacobi_svd(A.transposed());
        return {t.V, t.S, t.U, t.oversample_clamped};
    }
    DenseMatrix W = A;  // columns get orthogonalized in place
    DenseMatrix V = DenseMatrix::identity(n);
    double amax = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) amax = std::max(amax, std::abs(W(i, j)));
    const double tol = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                const double *wp = W.col(p), *wq = W.col(q);
                for (std::size_t i = 0; i < m; ++i) {
                    app += wp[i] * wp[i];
                    aqq += wq[i] * wq[i];
                    apq += wp[i] * wq[i];
                }
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0)
                    continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                double *wpm = W.col(p), *wqm = W.col(q);
                for (std::size_t i = 0; i < m; ++i) {
                    const double a = wpm[i], b = wqm[i];
                    wpm[i] = c * a - s * b;
                    wqm[i] = s * a + c * b;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double a = V(i, p), b = V(i, q);
                    V(i, p) = c * a - s * b;
                    V(i, q) = s * a + c * b;
                }
            }
        }
        if (!rotated) break;
    }
    // Singular values = column norms; order nonincreasing.
    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s2 = 0.0;
        const double *wj = W.col(j);
        for (std::size_t i = 0; i < m; ++i) s2 += wj[i] * wj[i];
        sv[j] = std::sqrt(s2);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sv[a] > sv[b]; });
    SvdResult r;
    r.U = DenseMatrix(m, n);
    r.V = DenseMatrix(n, n);
    r.S.resize(n);
    const double smax = sv.empty() ? 0.0 : sv[order[0]];
    std::size_t rank = 0;
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        r.S[c] = sv[src];
        for (std::size_t i = 0; i < n; ++i) r.V(i, c) = V(i, src);
        if (sv[src] > smax * 1e-14 && sv[src] > 0.0) {
            for (std::size_t i = 0; i < m; ++i) r.U(i, c) = W(i, src) / sv[src];
            rank = c + 1;
        }
    }
    // Numerically zero singular directions: complete U to an orthonormal set
    // by Gram-Schmidt against the accepted columns.
    for (std::size_t c = rank; c < n; ++c) {
        for (std::size_t seed_axis = 0; seed_axis < m; ++seed_axis) {
            std::vector<double> v(m, 0.0);
            v[seed_axis] = 1.0;
            for (std::size_t prev = 0; prev < c; ++prev) {
                double d = 0.0;
                for (std::size_t i = 0; i < m; ++i) d += v[i] * r.U(i, prev);
                for (std::size_t i = 0; i < m; ++i) v[i] -= d * r.U(i, prev);
            }
            double nrm = 0.0;
            for (double x : v) nrm += x * x;
            nrm = std::sqrt(nrm);
            if (nrm > 1e-6) {
                for (std::size_t i = 0; i < m; ++i) r.U(i, c) = v[i] / nrm;
                break;
            }
        }
    }
    fix_signs(r.U, r.V);
    return r;
}

SvdResult truncated_svd(const LinOp &A, std::size_t k, std::uint64_t seed,
                        std::size_t oversample, std::size_t power) {
    const std::size_t m = A.rows(), n = A.cols();
    const std::size_t mind = std::min(m, n);
    if (k == 0 || k > mind) throw DataError("truncated_svd: invalid k");
    bool clamped = false;
    if (k + oversample > mind) {
        oversample = mind - k;
        clamped = true;
    }
    const std::size_t l = k + oversample;

    Rng rng(seed);
    DenseMatrix Omega(n, l);
    for (std::size_t j = 0; j < l; ++j) {
        double *oj = Omega.col(j);
        for (std::size_t i = 0; i < n; ++i) oj[i] = rng.gaussian();
    }

    DenseMatrix Q = qr_q(A.apply(Omega));
    for (std::size_t it = 0; it < power; ++it) {
        DenseMatrix Qz = qr_q(A.apply_t(Q));
        Q = qr_q(A.apply(Qz));
    }

    // Z = A^T Q (n x l); thin QR of Z gives the small square problem R2^T.
    DenseMatrix Z = A.apply_t(Q);
    QrResult z = qr_thin(Z);
    SvdResult small = jacobi_svd(z.R.transposed());

    SvdResult r;
    r.oversample_clamped = clamped;
    r.S.assign(small.S.begin(), small.S.begin() + k);
    DenseMatrix Uk(l, k), Vk(l, k);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t i = 0; i < l; ++i) {
            Uk(i, c) = small.U(i, c);
            Vk(i, c) = small.V(i, c);
        }
    r.U = matmul(Q, Uk);
    r.V = matmul(z.Q, Vk);
    fix_signs(r.U, r.V);
    return r;
}

}  // namespace xlem::numkit
