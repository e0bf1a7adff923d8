#include "xlem/numkit/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xlem/error.hpp"

namespace xlem::numkit {

EigResult sym_eig(const DenseMatrix &A, std::size_t top_r) {
    const std::size_t k = A.rows();
    if (A.cols() != k) throw DataError("sym_eig: not square");
    if (top_r > k) throw DataError("sym_eig: top_r exceeds dimension");
    double asym = 0.0, amax = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < k; ++i) {
            asym = std::max(asym, std::abs(A(i, j) - A(j, i)));
            amax = std::max(amax, std::abs(A(i, j)));
        }
    if (asym > 1e-10 * (amax > 0.0 ? amax : 1.0) && asym > 1e-10)
        throw DataError("sym_eig: input not symmetric");

    DenseMatrix M = A;
    DenseMatrix V = DenseMatrix::identity(k);
    // Cyclic sweeps over the strict upper triangle until all off-diagonal
    // mass is annihilated.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < j; ++i) off += M(i, j) * M(i, j);
        if (off <= 1e-30 * (amax > 0.0 ? amax * amax : 1.0) * k * k) break;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                const double apq = M(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = M(p, p), aqq = M(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // M <- J^T M J, J the (p,q) rotation
                for (std::size_t i = 0; i < k; ++i) {
                    const double mip = M(i, p), miq = M(i, q);
                    M(i, p) = c * mip - s * miq;
                    M(i, q) = s * mip + c * miq;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    const double mpi = M(p, i), mqi = M(q, i);
                    M(p, i) = c * mpi - s * mqi;
                    M(q, i) = s * mpi + c * mqi;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    const double vip = V(i, p), viq = V(i, q);
                    V(i, p) = c * vip - s * viq;
                    V(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return M(a, a) > M(b, b);
    });

    EigResult r;
    r.values.resize(top_r);
    r.vectors = DenseMatrix(k, top_r);
    for (std::size_t c = 0; c < top_r; ++c) {
        const std::size_t src = order[c];
        r.values[c] = M(src, src);
        double big = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            if (std::abs(V(i, src)) > std::abs(big)) big = V(i, src);
        const double flip = big < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < k; ++i) r.vectors(i, c) = flip * V(i, src);
    }
    return r;
}

}  // namespace xlem::numkit
