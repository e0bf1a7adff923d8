#pragma once

#include <cstdint>
#include <vector>

#include "xlem/numkit/dense.hpp"
#include "xlem/numkit/sparse.hpp"

namespace xlem::numkit {

struct KmeansResult {
    DenseMatrix centroids;  // N x k
    std::vector<std::uint32_t> assignments;
    std::vector<double> objective;  // sum of squared distances, per iteration
    std::size_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding over the columns of X, plain
// Euclidean metric (callers feed unit-normalized columns when cosine
// behavior is wanted). Empty clusters are re-seeded from the point farthest
// from its own centroid. Stops when every centroid moves less than tol, or
// after max_iter iterations.
KmeansResult kmeans(const CscMatrix &X, std::size_t k, std::uint64_t seed,
                    std::size_t max_iter = 100, double tol = 1e-6);

}  // namespace xlem::numkit
