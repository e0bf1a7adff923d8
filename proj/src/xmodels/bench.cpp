#include <chrono>
#include <cmath>

#include "xlem/error.hpp"
#include "xlem/numkit/kernels.hpp"
#include "xlem/numkit/rng.hpp"
#include "xlem/xmodels.hpp"

namespace xlem::models {

using numkit::DenseMatrix;

namespace {

// dim x n matrix of random unit columns: what projected documents look like
// to the scoring kernel (projections are dense, cosine needs unit norm).
DenseMatrix random_unit_columns(std::size_t dim, std::size_t n, numkit::Rng &rng) {
    DenseMatrix m(dim, n);
    for (std::size_t j = 0; j < n; ++j) {
        double *c = m.col(j);
        double nrm2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            c[i] = rng.normal();
            nrm2 += c[i] * c[i];
        }
        double inv = nrm2 > 0.0 ? 1.0 / std::sqrt(nrm2) : 0.0;
        for (std::size_t i = 0; i < dim; ++i) c[i] *= inv;
    }
    return m;
}

}  // namespace

SimBench benchmark_similarities(std::size_t dim, std::size_t queries,
                                std::size_t targets, std::size_t reps,
                                std::size_t block, std::uint64_t seed,
                                bool serial_reference) {
    if (dim == 0 || queries == 0 || targets == 0 || reps == 0)
        throw DataError("benchmark_similarities: all sizes must be positive");
    if (block == 0) block = numkit::default_block_size();

    numkit::Rng rng(seed);
    DenseMatrix Q = random_unit_columns(dim, queries, rng);
    DenseMatrix T = random_unit_columns(dim, targets, rng);

    // Scores are produced one target block at a time so the q x t product is
    // never materialized; the serial side pays an extra block copy because
    // the reference kernel has no streaming variant.
    SimBench r;
    r.sims = static_cast<std::uint64_t>(queries) * targets * reps;
    DenseMatrix out(queries, std::min(block, targets));
    DenseMatrix slice(dim, std::min(block, targets));
    using clock = std::chrono::steady_clock;
    std::chrono::duration<double> spent{0.0};
    for (std::size_t rep = 0; rep < reps; ++rep) {
        for (std::size_t b0 = 0; b0 < targets; b0 += block) {
            std::size_t nb = std::min(block, targets - b0);
            auto t0 = clock::now();
            if (serial_reference) {
                slice = DenseMatrix(dim, nb);
                for (std::size_t j = 0; j < nb; ++j) {
                    const double *src = T.col(b0 + j);
                    double *dst = slice.col(j);
                    for (std::size_t i = 0; i < dim; ++i) dst[i] = src[i];
                }
                out = numkit::serial::blocked_gram(Q, slice);
            } else {
                numkit::blocked_gram_into(Q, T, b0, nb, out);
            }
            spent += clock::now() - t0;
            // one row per block keeps verification cost negligible
            for (std::size_t j = 0; j < nb; ++j) r.checksum += out(0, j);
        }
    }
    r.seconds = spent.count();
    r.per_second = r.seconds > 0.0 ? static_cast<double>(r.sims) / r.seconds : 0.0;
    return r;
}

}  // namespace xlem::models
