#include "xlem/numkit/factor.hpp"

#include <cmath>
#include <cstdlib>

#include "xlem/error.hpp"

namespace xlem::numkit {

namespace {

// Householder vectors stored in-place in the lower part of the working copy;
// betas on the side. Classic unblocked algorithm.
struct HouseholderQr {
    DenseMatrix A;  // m x n, overwritten
    std::vector<double> beta;

    explicit HouseholderQr(const DenseMatrix &in) : A(in), beta(in.cols(), 0.0) {
        const std::size_t m = A.rows(), n = A.cols();
        if (m < n) throw DataError("qr_thin: more columns than rows");
        for (std::size_t j = 0; j < n; ++j) {
            double norm2 = 0.0;
            for (std::size_t i = j; i < m; ++i) norm2 += A(i, j) * A(i, j);
            const double norm = std::sqrt(norm2);
            if (norm == 0.0) {
                beta[j] = 0.0;  // zero column: skip the reflection
                continue;
            }
            const double a0 = A(j, j);
            const double alpha = a0 >= 0.0 ? -norm : norm;
            // v = x - alpha*e1, normalized so v[0] = 1
            const double v0 = a0 - alpha;
            beta[j] = -v0 / alpha;  // = 2 / (v^T v) * v0^2 scaling, see below
            for (std::size_t i = j + 1; i < m; ++i) A(i, j) /= v0;
            A(j, j) = alpha;
            // apply H = I - beta * v v^T to the trailing columns
            for (std::size_t c = j + 1; c < n; ++c) {
                double s = A(j, c);
                for (std::size_t i = j + 1; i < m; ++i) s += A(i, j) * A(i, c);
                s *= beta[j];
                A(j, c) -= s;
                for (std::size_t i = j + 1; i < m; ++i) A(i, c) -= s * A(i, j);
            }
        }
    }

    DenseMatrix r() const {
        const std::size_t n = A.cols();
        DenseMatrix R(n, n);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i <= j; ++i) R(i, j) = A(i, j);
        return R;
    }

    // Q = H_0 H_1 ... H_{n-1} applied to the first n columns of I.
    DenseMatrix q() const {
        const std::size_t m = A.rows(), n = A.cols();
        DenseMatrix Q(m, n);
        for (std::size_t j = 0; j < n; ++j) Q(j, j) = 1.0;
        for (std::size_t j = n; j-- > 0;) {
            if (beta[j] == 0.0) continue;
            for (std::size_t c = j; c < n; ++c) {
                double s = Q(j, c);
                for (std::size_t i = j + 1; i < m; ++i) s += A(i, j) * Q(i, c);
                s *= beta[j];
                Q(j, c) -= s;
                for (std::size_t i = j + 1; i < m; ++i) Q(i, c) -= s * A(i, j);
            }
        }
        return Q;
    }
};

}  // namespace

QrResult qr_thin(const DenseMatrix &A) {
    HouseholderQr h(A);
    return {h.q(), h.r()};
}

DenseMatrix qr_q(const DenseMatrix &A) { return HouseholderQr(A).q(); }

DenseMatrix solve_upper(const DenseMatrix &R, const DenseMatrix &B) {
    const std::size_t n = R.rows();
    if (R.cols() != n || B.rows() != n) throw DataError("solve_upper: shape mismatch");
    DenseMatrix X = B;
    for (std::size_t c = 0; c < X.cols(); ++c) {
        double *x = X.col(c);
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= R(i, j) * x[j];
            if (R(i, i) == 0.0) throw DataError("solve_upper: singular triangle");
            x[i] = s / R(i, i);
        }
    }
    return X;
}

DenseMatrix solve_upper_t(const DenseMatrix &R, const DenseMatrix &B) {
    const std::size_t n = R.rows();
    if (R.cols() != n || B.rows() != n) throw DataError("solve_upper_t: shape mismatch");
    DenseMatrix X = B;
    for (std::size_t c = 0; c < X.cols(); ++c) {
        double *x = X.col(c);
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < i; ++j) s -= R(j, i) * x[j];
            if (R(i, i) == 0.0) throw DataError("solve_upper_t: singular triangle");
            x[i] = s / R(i, i);
        }
    }
    return X;
}

PinvResult aligned_basis_pinv(const DenseMatrix &B) {
    const std::size_t n = B.cols();
    HouseholderQr h(B);
    DenseMatrix R = h.r();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(R(i, i)));
    // Rank test: a diagonal entry tiny relative to the largest one means the
    // basis is (numerically) rank deficient.
    const double tol = 1e-12 * (max_diag > 0.0 ? max_diag : 1.0);
    bool deficient = false;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(R(i, i)) <= tol) deficient = true;
    if (deficient) {
        const double eps = 1e-10 * (max_diag > 0.0 ? max_diag : 1.0);
        for (std::size_t i = 0; i < n; ++i)
            R(i, i) += (R(i, i) >= 0.0 ? eps : -eps);
    }
    DenseMatrix Qt = h.q().transposed();
    return {solve_upper(R, Qt), deficient};
}

CholResult cholesky_ridge(const DenseMatrix &D) {
    const std::size_t k = D.rows();
    if (D.cols() != k) throw DataError("cholesky_ridge: not square");
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += D(i, i);
    const double levels[] = {0.0, 1e-10, 1e-8, 1e-6};
    for (double lvl : levels) {
        const double eps = lvl * trace / static_cast<double>(k);
        DenseMatrix K(k, k);
        bool ok = true;
        for (std::size_t j = 0; j < k && ok; ++j) {
            double d = D(j, j) + eps;
            for (std::size_t i = 0; i < j; ++i) d -= K(i, j) * K(i, j);
            if (d <= 0.0) {
                ok = false;
                break;
            }
            const double kjj = std::sqrt(d);
            K(j, j) = kjj;
            for (std::size_t c = j + 1; c < k; ++c) {
                double s = D(j, c);
                for (std::size_t i = 0; i < j; ++i) s -= K(i, j) * K(i, c);
                K(j, c) = s / kjj;
            }
        }
        if (ok) return {K, eps};
    }
    throw DataError("cholesky_ridge: matrix not positive definite at any ridge level");
}

}  // namespace xlem::numkit
