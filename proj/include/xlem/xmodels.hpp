#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlem/corpus.hpp"
#include "xlem/numkit/dense.hpp"
#include "xlem/numkit/sparse.hpp"
#include "xlem/textvec.hpp"

namespace xlem::models {

enum class Method : std::uint32_t { kmeans = 0, lsi = 1, cca = 2, hubcca = 3 };
const char *method_name(Method m);
Method method_from_name(const std::string &name);  // throws DataError

struct LangEntry {
    std::string lang;
    std::uint64_t vocab_hash = 0;
    // kmeans/lsi/cca carry a single k x n_i map P; hubcca carries the
    // two-stage factors V (n_i x k_lsi) and W (k_lsi x k_cca), projecting
    // x -> W^T (V^T x).
    numkit::DenseMatrix P;
    numkit::DenseMatrix V;
    numkit::DenseMatrix W;

    std::size_t dim() const { return P.empty() ? V.rows() : P.cols(); }
};

struct ProjectionModel {
    Method method = Method::lsi;
    std::uint32_t k_lsi = 0;  // first-stage dimension (== k_cca except hubcca)
    std::uint32_t k_cca = 0;  // common-space dimension
    double kappa = 0.0;
    std::uint64_t seed = 0;
    std::vector<LangEntry> langs;

    // Training diagnostics, not serialized: canonical correlations (cca),
    // shared-direction eigenvalues (hubcca).
    std::vector<double> spectrum;
    bool degraded = false;           // some ridge fallback fired
    std::vector<std::string> notes;  // e.g. languages excluded from training

    std::size_t k_final() const { return k_cca; }
    std::size_t index_of(const std::string &lang) const;  // throws DataError
};

// Cluster the stacked corpus columns and invert the per-language centroid
// blocks: P_i maps a document onto its centroid-mixture coordinates.
ProjectionModel train_kmeans_model(const corpus::ComparableCorpus &c,
                                   std::size_t k, std::uint64_t seed);

// Truncated SVD of the vertically stacked corpus; P_i inverts the
// per-language block of the left singular basis.
ProjectionModel train_lsi_model(const corpus::ComparableCorpus &c,
                                std::size_t k, std::uint64_t seed);

// Two-view canonical correlations over the pair-aligned columns, shrinkage
// regularization (1-kappa)*C + kappa*I on the variances. The model's
// spectrum holds the k canonical correlations, nonincreasing.
ProjectionModel train_cca_model(const corpus::ComparableCorpus &c,
                                std::size_t k, double kappa);

// Two-stage model: (1) truncated SVD of the stacked hub cross-covariances
// [C_{h,j}...] gives per-language reductions V_i; (2) sum-of-squared-
// correlations against the hub in the reduced space gives W_i. Languages
// whose hub-aligned sample is smaller than two columns are excluded and
// reported in notes. The spectrum holds the shared-direction eigenvalues.
ProjectionModel train_hubcca_model(const corpus::ComparableCorpus &c,
                                   std::size_t hub_index, std::size_t k_lsi,
                                   std::size_t k_cca, double kappa,
                                   std::uint64_t seed);

// Common-space image of one document (no centering is applied: models are
// linear maps at inference time).
std::vector<double> project(const ProjectionModel &m, std::size_t lang,
                            const textvec::SparseVector &v);

// Common-space images of every column of X, as a k_final x s dense matrix.
numkit::DenseMatrix project_columns(const ProjectionModel &m, std::size_t lang,
                                    const numkit::CscMatrix &X);

enum class SimMode {
    common_cosine,     // cosine of the projected vectors, in [-1, 1]
    input_normalized,  // <P_i v_i, P_j v_j> / (|v_i| |v_j|), unbounded
};
const char *sim_mode_name(SimMode m);
SimMode sim_mode_from_name(const std::string &name);  // throws DataError

double similarity(const ProjectionModel &m, std::size_t lang_i,
                  const textvec::SparseVector &v_i, std::size_t lang_j,
                  const textvec::SparseVector &v_j,
                  SimMode mode = SimMode::common_cosine);

struct Neighbor {
    std::uint32_t index = 0;
    double score = 0.0;
};

// Exact top-k_nn targets per query by default-mode similarity, ties broken
// toward the lower target index. Targets are processed in column blocks of
// `block` (0 = default width); the result is block-count independent.
std::vector<std::vector<Neighbor>> knn_search(const ProjectionModel &m,
                                              std::size_t lang_q,
                                              const numkit::CscMatrix &queries,
                                              std::size_t lang_t,
                                              const numkit::CscMatrix &targets,
                                              std::size_t k_nn,
                                              std::size_t block = 0);

// Per-ordered-pair composition matrices for batch similarity. Every model
// here projects into one shared common space, so each entry is the
// k_final x k_final identity; the proxy path must stay bit-compatible with
// direct projection.
struct ProxyCache {
    std::size_t k = 0;
    std::vector<std::vector<numkit::DenseMatrix>> M;  // [lang_i][lang_j]
};
ProxyCache build_proxy_cache(const ProjectionModel &m);
double proxy_similarity(const ProxyCache &cache, const ProjectionModel &m,
                        std::size_t lang_i, const textvec::SparseVector &v_i,
                        std::size_t lang_j, const textvec::SparseVector &v_j);

// Single-file container: "XLEM" magic, format version, method tag, dims,
// kappa, seed, then per-language blocks (vocabulary hash + row-major 64-bit
// little-endian matrices), closed by a CRC-64 trailer.
void save_model(const ProjectionModel &m, const std::string &path);
ProjectionModel load_model(const std::string &path);

// Projected-cosine throughput measurement: random unit vectors stand in for
// projected documents, and the timer covers only the block-scoring loop.
// checksum folds a sample of every block into one double, so the result is
// seed-reproducible and the scoring calls stay observable.
struct SimBench {
    std::uint64_t sims = 0;    // queries * targets * reps
    double seconds = 0.0;      // wall time of the scoring loop
    double per_second = 0.0;
    double checksum = 0.0;
};
SimBench benchmark_similarities(std::size_t dim, std::size_t queries,
                                std::size_t targets, std::size_t reps,
                                std::size_t block, std::uint64_t seed,
                                bool serial_reference);

}  // namespace xlem::models
