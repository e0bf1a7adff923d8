#include <algorithm>
#include <cmath>

#include "xlem/error.hpp"
#include "xlem/numkit/kernels.hpp"
#include "xlem/xmodels.hpp"

namespace xlem::models {

using numkit::CscMatrix;
using numkit::DenseMatrix;
using textvec::SparseVector;

const char *sim_mode_name(SimMode m) {
    return m == SimMode::common_cosine ? "common-space-cosine" : "input-normalized";
}

SimMode sim_mode_from_name(const std::string &name) {
    if (name == "common-space-cosine") return SimMode::common_cosine;
    if (name == "input-normalized") return SimMode::input_normalized;
    throw DataError("unknown similarity mode: " + name);
}

namespace {

const LangEntry &entry_at(const ProjectionModel &m, std::size_t lang) {
    if (lang >= m.langs.size())
        throw DataError("language index out of range: " + std::to_string(lang));
    return m.langs[lang];
}

void check_dim(const LangEntry &e, std::size_t dim) {
    if (dim != e.dim())
        throw DataError("vector dimension " + std::to_string(dim) +
                        " does not match language dimension " +
                        std::to_string(e.dim()) + " for " + e.lang);
}

double norm_of(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot_of(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

std::vector<double> project(const ProjectionModel &m, std::size_t lang,
                            const SparseVector &v) {
    const LangEntry &e = entry_at(m, lang);
    check_dim(e, v.dim);
    if (!e.P.empty()) {
        // out = P v, accumulated over v's nonzeros in index order
        std::vector<double> out(e.P.rows(), 0.0);
        for (std::size_t t = 0; t < v.idx.size(); ++t) {
            const double *col = e.P.col(v.idx[t]);
            const double f = v.val[t];
            for (std::size_t r = 0; r < out.size(); ++r) out[r] += f * col[r];
        }
        return out;
    }
    // hubcca: y = V^T v, out = W^T y
    std::vector<double> y(e.V.cols(), 0.0);
    for (std::size_t r = 0; r < y.size(); ++r) {
        const double *col = e.V.col(r);
        double s = 0.0;
        for (std::size_t t = 0; t < v.idx.size(); ++t) s += col[v.idx[t]] * v.val[t];
        y[r] = s;
    }
    std::vector<double> out(e.W.cols(), 0.0);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const double *col = e.W.col(c);
        double s = 0.0;
        for (std::size_t r = 0; r < y.size(); ++r) s += col[r] * y[r];
        out[c] = s;
    }
    return out;
}

DenseMatrix project_columns(const ProjectionModel &m, std::size_t lang,
                            const CscMatrix &X) {
    const LangEntry &e = entry_at(m, lang);
    check_dim(e, X.rows());
    if (!e.P.empty()) return numkit::spmm(e.P, X);
    DenseMatrix Y = numkit::spmm(e.V.transposed(), X);  // k_lsi x s
    return numkit::blocked_gram(e.W, Y);                // W^T Y, k_cca x s
}

double similarity(const ProjectionModel &m, std::size_t lang_i,
                  const SparseVector &v_i, std::size_t lang_j,
                  const SparseVector &v_j, SimMode mode) {
    auto p = project(m, lang_i, v_i);
    auto q = project(m, lang_j, v_j);
    const double d = dot_of(p, q);
    if (mode == SimMode::input_normalized) {
        const double n = v_i.norm() * v_j.norm();
        return n == 0.0 ? 0.0 : d / n;
    }
    const double n = norm_of(p) * norm_of(q);
    return n == 0.0 ? 0.0 : d / n;
}

namespace {

// Unit-normalize each column; all-zero columns are left zero and score 0
// against everything.
void normalize_columns(DenseMatrix &A) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
        double *col = A.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows(); ++i) s += col[i] * col[i];
        s = std::sqrt(s);
        if (s > 0.0)
            for (std::size_t i = 0; i < A.rows(); ++i) col[i] /= s;
    }
}

bool better(const Neighbor &a, const Neighbor &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
}

}  // namespace

std::vector<std::vector<Neighbor>> knn_search(const ProjectionModel &m,
                                              std::size_t lang_q,
                                              const CscMatrix &queries,
                                              std::size_t lang_t,
                                              const CscMatrix &targets,
                                              std::size_t k_nn,
                                              std::size_t block) {
    if (k_nn == 0) throw DataError("knn_search: k_nn must be positive");
    DenseMatrix Q = project_columns(m, lang_q, queries);
    DenseMatrix T = project_columns(m, lang_t, targets);
    normalize_columns(Q);
    normalize_columns(T);

    const std::size_t nq = Q.cols(), nt = T.cols();
    const std::size_t width = block ? block : numkit::default_block_size();
    std::vector<std::vector<Neighbor>> best(nq);

    for (std::size_t b0 = 0; b0 < nt; b0 += width) {
        const std::size_t nb = std::min(width, nt - b0);
        DenseMatrix S(nq, nb);
        numkit::blocked_gram_into(Q, T, b0, nb, S);
        // merge the block into each query's running top list; each query is
        // owned by one thread so the result is deterministic
#pragma omp parallel for schedule(static)
        for (std::size_t q = 0; q < nq; ++q) {
            auto &list = best[q];
            for (std::size_t j = 0; j < nb; ++j) {
                Neighbor cand{static_cast<std::uint32_t>(b0 + j), S(q, j)};
                if (list.size() == k_nn && !better(cand, list.back())) continue;
                auto pos = std::upper_bound(list.begin(), list.end(), cand, better);
                list.insert(pos, cand);
                if (list.size() > k_nn) list.pop_back();
            }
        }
    }
    return best;
}

ProxyCache build_proxy_cache(const ProjectionModel &m) {
    ProxyCache cache;
    cache.k = m.k_final();
    const std::size_t n = m.langs.size();
    cache.M.assign(n, std::vector<DenseMatrix>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cache.M[i][j] = DenseMatrix::identity(cache.k);
    return cache;
}

double proxy_similarity(const ProxyCache &cache, const ProjectionModel &m,
                        std::size_t lang_i, const SparseVector &v_i,
                        std::size_t lang_j, const SparseVector &v_j) {
    auto p = project(m, lang_i, v_i);
    auto q = project(m, lang_j, v_j);
    const DenseMatrix &M = cache.M.at(lang_i).at(lang_j);
    std::vector<double> mq(M.rows(), 0.0);
    for (std::size_t c = 0; c < M.cols(); ++c) {
        const double *col = M.col(c);
        for (std::size_t r = 0; r < mq.size(); ++r) mq[r] += col[r] * q[c];
    }
    const double n = norm_of(p) * norm_of(mq);
    return n == 0.0 ? 0.0 : dot_of(p, mq) / n;
}

}  // namespace xlem::models
