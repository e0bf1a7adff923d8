#include "xlem/numkit/kmeans.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "xlem/error.hpp"
#include "xlem/numkit/rng.hpp"

namespace xlem::numkit {

namespace {

double sparse_dot_dense(const CscMatrix &X, std::size_t j, const double *c) {
    double s = 0.0;
    for (std::size_t t = X.col_begin(j); t < X.col_end(j); ++t)
        s += X.value_at(t) * c[X.row_at(t)];
    return s;
}

}  // namespace

KmeansResult kmeans(const CscMatrix &X, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter, double tol) {
    const std::size_t N = X.rows(), s = X.cols();
    if (k == 0) throw DataError("kmeans: k must be positive");
    if (k > s) throw DataError("kmeans: k exceeds number of points");

    std::vector<double> pt_norm2(s);
    for (std::size_t j = 0; j < s; ++j) {
        const double nrm = X.col_norm(j);
        pt_norm2[j] = nrm * nrm;
    }

    Rng rng(seed);
    DenseMatrix C(N, k);

    // k-means++ seeding: first centroid uniform, then D^2 sampling against
    // the closest already-chosen centroid.
    std::vector<double> d2(s, std::numeric_limits<double>::infinity());
    {
        std::size_t first = static_cast<std::size_t>(rng.uniform_index(s));
        for (std::size_t t = X.col_begin(first); t < X.col_end(first); ++t)
            C(X.row_at(t), 0) = X.value_at(t);
        for (std::size_t c = 1; c < k; ++c) {
            const double *prev = C.col(c - 1);
            double prev_n2 = 0.0;
            for (std::size_t i = 0; i < N; ++i) prev_n2 += prev[i] * prev[i];
            double total = 0.0;
            for (std::size_t j = 0; j < s; ++j) {
                const double d = pt_norm2[j] - 2.0 * sparse_dot_dense(X, j, prev) + prev_n2;
                d2[j] = std::min(d2[j], std::max(d, 0.0));
                total += d2[j];
            }
            std::size_t pick;
            if (total <= 0.0) {
                pick = static_cast<std::size_t>(rng.uniform_index(s));
            } else {
                const double r = rng.uniform() * total;
                double acc = 0.0;
                pick = s - 1;
                for (std::size_t j = 0; j < s; ++j) {
                    acc += d2[j];
                    if (acc >= r) {
                        pick = j;
                        break;
                    }
                }
            }
            for (std::size_t t = X.col_begin(pick); t < X.col_end(pick); ++t)
                C(X.row_at(t), c) = X.value_at(t);
        }
    }

    KmeansResult res;
    res.assignments.assign(s, 0);
    std::vector<double> own_d2(s, 0.0);
    std::vector<double> cent_n2(k, 0.0);
    std::vector<std::vector<std::size_t>> members(k);

    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t c = 0; c < k; ++c) {
            const double *cc = C.col(c);
            double n2 = 0.0;
            for (std::size_t i = 0; i < N; ++i) n2 += cc[i] * cc[i];
            cent_n2[c] = n2;
        }

#pragma omp parallel for schedule(static)
        for (long long jj = 0; jj < static_cast<long long>(s); ++jj) {
            const std::size_t j = static_cast<std::size_t>(jj);
            double best = std::numeric_limits<double>::infinity();
            std::uint32_t best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d =
                    pt_norm2[j] - 2.0 * sparse_dot_dense(X, j, C.col(c)) + cent_n2[c];
                if (d < best) {
                    best = d;
                    best_c = static_cast<std::uint32_t>(c);
                }
            }
            res.assignments[j] = best_c;
            own_d2[j] = std::max(best, 0.0);
        }
        // Summed in fixed order so the reported objective is thread-count
        // independent.
        double obj = 0.0;
        for (std::size_t j = 0; j < s; ++j) obj += own_d2[j];
        assert(res.objective.empty() || obj <= res.objective.back() + 1e-9 * (1.0 + std::abs(res.objective.back())));
        res.objective.push_back(obj);
        res.iterations = iter + 1;

        for (auto &m : members) m.clear();
        for (std::size_t j = 0; j < s; ++j) members[res.assignments[j]].push_back(j);

        // Re-seed empty clusters from the farthest point of a non-singleton
        // cluster, processed in cluster-index order.
        for (std::size_t c = 0; c < k; ++c) {
            if (!members[c].empty()) continue;
            std::size_t far = SIZE_MAX;
            double far_d = -1.0;
            for (std::size_t j = 0; j < s; ++j) {
                if (members[res.assignments[j]].size() <= 1) continue;
                if (own_d2[j] > far_d) {
                    far_d = own_d2[j];
                    far = j;
                }
            }
            if (far == SIZE_MAX) continue;  // degenerate: nothing to steal
            auto &src = members[res.assignments[far]];
            src.erase(std::find(src.begin(), src.end(), far));
            res.assignments[far] = static_cast<std::uint32_t>(c);
            own_d2[far] = 0.0;
            members[c].push_back(far);
        }

        double max_move2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_move2)
        for (long long cc = 0; cc < static_cast<long long>(k); ++cc) {
            const std::size_t c = static_cast<std::size_t>(cc);
            if (members[c].empty()) continue;
            std::vector<double> mean(N, 0.0);
            for (std::size_t j : members[c])
                for (std::size_t t = X.col_begin(j); t < X.col_end(j); ++t)
                    mean[X.row_at(t)] += X.value_at(t);
            const double inv = 1.0 / static_cast<double>(members[c].size());
            double move2 = 0.0;
            double *col = C.col(c);
            for (std::size_t i = 0; i < N; ++i) {
                const double nv = mean[i] * inv;
                const double dlt = nv - col[i];
                move2 += dlt * dlt;
                col[i] = nv;
            }
            max_move2 = std::max(max_move2, move2);
        }
        if (std::sqrt(max_move2) < tol) break;
    }

    res.centroids = std::move(C);
    return res;
}

}  // namespace xlem::numkit
