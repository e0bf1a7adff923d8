#include <algorithm>
#include <cmath>
#include <cstring>

#include "xlem/error.hpp"
#include "xlem/io.hpp"
#include "xlem/numkit/eig.hpp"
#include "xlem/numkit/factor.hpp"
#include "xlem/numkit/kernels.hpp"
#include "xlem/numkit/kmeans.hpp"
#include "xlem/numkit/svd.hpp"
#include "xlem/xmodels.hpp"

namespace xlem::models {

using corpus::ComparableCorpus;
using numkit::CscMatrix;
using numkit::DenseMatrix;

const char *method_name(Method m) {
    switch (m) {
        case Method::kmeans: return "kmeans";
        case Method::lsi: return "lsi";
        case Method::cca: return "cca";
        case Method::hubcca: return "hubcca";
    }
    return "?";
}

Method method_from_name(const std::string &name) {
    for (Method m : {Method::kmeans, Method::lsi, Method::cca, Method::hubcca})
        if (name == method_name(m)) return m;
    throw DataError("unknown method: " + name);
}

std::size_t ProjectionModel::index_of(const std::string &lang) const {
    for (std::size_t i = 0; i < langs.size(); ++i)
        if (langs[i].lang == lang) return i;
    throw DataError("model has no language: " + lang);
}

namespace {

// Vertical stack of the per-language matrices; row offsets returned so the
// result can be split back into blocks.
CscMatrix vstack(const std::vector<CscMatrix> &X, std::vector<std::size_t> &offset) {
    offset.assign(1, 0);
    for (const auto &x : X) offset.push_back(offset.back() + x.rows());
    auto out = CscMatrix::empty_cols(offset.back());
    const std::size_t s = X[0].cols();
    std::vector<std::uint32_t> rows;
    std::vector<double> vals;
    for (std::size_t l = 0; l < s; ++l) {
        rows.clear();
        vals.clear();
        for (std::size_t i = 0; i < X.size(); ++i) {
            for (std::size_t t = X[i].col_begin(l); t < X[i].col_end(l); ++t) {
                rows.push_back(static_cast<std::uint32_t>(offset[i] + X[i].row_at(t)));
                vals.push_back(X[i].value_at(t));
            }
        }
        out.push_col(rows, vals);
    }
    return out;
}

// Column mean of X over the listed columns.
std::vector<double> column_mean(const CscMatrix &X,
                                const std::vector<std::size_t> &cols) {
    std::vector<double> mean(X.rows(), 0.0);
    for (std::size_t l : cols)
        for (std::size_t t = X.col_begin(l); t < X.col_end(l); ++t)
            mean[X.row_at(t)] += X.value_at(t);
    const double inv = 1.0 / static_cast<double>(cols.size());
    for (double &v : mean) v *= inv;
    return mean;
}

// Centered cross-covariance of the selected column pairs:
//   sum_l (x_l - ca)(y_l - cb)^T / (|cols| - 1)
// expanded so the sparse product never densifies. The means may come from a
// wider column set than the sum (hub model convention).
DenseMatrix cross_covariance(const CscMatrix &A, const CscMatrix &B,
                             const std::vector<std::size_t> &cols,
                             const std::vector<double> &ca,
                             const std::vector<double> &cb) {
    if (cols.size() < 2)
        throw DataError("covariance needs at least two aligned columns");
    CscMatrix As = A.select_cols(cols);
    CscMatrix Bs = B.select_cols(cols);
    DenseMatrix C = numkit::sparse_cross(As, Bs);  // sum of outer products

    std::vector<double> sa(A.rows(), 0.0), sb(B.rows(), 0.0);
    for (std::size_t l = 0; l < cols.size(); ++l) {
        for (std::size_t t = As.col_begin(l); t < As.col_end(l); ++t)
            sa[As.row_at(t)] += As.value_at(t);
        for (std::size_t t = Bs.col_begin(l); t < Bs.col_end(l); ++t)
            sb[Bs.row_at(t)] += Bs.value_at(t);
    }
    const double n = static_cast<double>(cols.size());
    const double inv = 1.0 / (n - 1.0);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < C.cols(); ++j) {
        double *col = C.col(j);
        for (std::size_t i = 0; i < C.rows(); ++i)
            col[i] = (col[i] - sa[i] * cb[j] - ca[i] * sb[j] + n * ca[i] * cb[j]) * inv;
    }
    return C;
}

// Same, for dense reduced representations (k x s): selected columns are
// centered explicitly and multiplied.
DenseMatrix cross_covariance_dense(const DenseMatrix &A, const DenseMatrix &B,
                                   const std::vector<std::size_t> &cols,
                                   const std::vector<double> &ca,
                                   const std::vector<double> &cb) {
    if (cols.size() < 2)
        throw DataError("covariance needs at least two aligned columns");
    // transposed centered copies feed blocked_gram (computes A^T B)
    DenseMatrix At(cols.size(), A.rows()), Bt(cols.size(), B.rows());
    for (std::size_t l = 0; l < cols.size(); ++l) {
        for (std::size_t i = 0; i < A.rows(); ++i)
            At(l, i) = A(i, cols[l]) - ca[i];
        for (std::size_t i = 0; i < B.rows(); ++i)
            Bt(l, i) = B(i, cols[l]) - cb[i];
    }
    DenseMatrix C = numkit::blocked_gram(At, Bt);
    const double inv = 1.0 / (static_cast<double>(cols.size()) - 1.0);
#pragma omp parallel for schedule(static)
    for (std::size_t j = 0; j < C.cols(); ++j) {
        double *col = C.col(j);
        for (std::size_t i = 0; i < C.rows(); ++i) col[i] *= inv;
    }
    return C;
}

std::vector<double> dense_column_mean(const DenseMatrix &Y,
                                      const std::vector<std::size_t> &cols) {
    std::vector<double> mean(Y.rows(), 0.0);
    for (std::size_t l : cols)
        for (std::size_t i = 0; i < Y.rows(); ++i) mean[i] += Y(i, l);
    const double inv = 1.0 / static_cast<double>(cols.size());
    for (double &v : mean) v *= inv;
    return mean;
}

DenseMatrix shrink_regularize(DenseMatrix C, double kappa) {
    for (std::size_t j = 0; j < C.cols(); ++j) {
        double *col = C.col(j);
        for (std::size_t i = 0; i < C.rows(); ++i) col[i] *= 1.0 - kappa;
        col[j] += kappa;
    }
    return C;
}

// Z = K^{-T} B for upper-triangular K (whitening from the left).
DenseMatrix whiten_left(const DenseMatrix &K, const DenseMatrix &B) {
    return numkit::solve_upper_t(K, B);
}

// Z = B K^{-1} for upper-triangular K (whitening from the right).
DenseMatrix whiten_right(const DenseMatrix &B, const DenseMatrix &K) {
    return numkit::solve_upper_t(K, B.transposed()).transposed();
}

void check_kappa(double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw DataError("kappa must lie in [0, 1]");
}

std::uint64_t vocab_hash_of(const ComparableCorpus &c, std::size_t i) {
    return io::vocabulary_hash(c.vocabs[i]);
}

// Canonical orientation: every common-space component is flipped in tandem
// across languages (inner products unchanged) so the largest-magnitude
// raw-space coefficient of the component comes out positive; ties keep the
// earliest language/index. Makes the artifact reproducible beyond what the
// factor-level sign rules already pin down.
void fix_component_signs(ProjectionModel &m) {
    for (std::size_t r = 0; r < m.k_final(); ++r) {
        double lead = 0.0;
        for (const LangEntry &e : m.langs) {
            if (!e.P.empty()) {
                for (std::size_t t = 0; t < e.P.cols(); ++t)
                    if (std::abs(e.P(r, t)) > std::abs(lead)) lead = e.P(r, t);
            } else {
                for (std::size_t t = 0; t < e.V.rows(); ++t) {
                    double v = 0.0;  // raw-space coefficient t of W^T V^T row r
                    for (std::size_t l = 0; l < e.V.cols(); ++l)
                        v += e.V(t, l) * e.W(l, r);
                    if (std::abs(v) > std::abs(lead)) lead = v;
                }
            }
        }
        if (lead >= 0.0) continue;
        for (LangEntry &e : m.langs) {
            if (!e.P.empty())
                for (std::size_t t = 0; t < e.P.cols(); ++t) e.P(r, t) = -e.P(r, t);
            else
                for (std::size_t l = 0; l < e.W.rows(); ++l) e.W(l, r) = -e.W(l, r);
        }
    }
}

}  // namespace

ProjectionModel train_kmeans_model(const ComparableCorpus &c, std::size_t k,
                                   std::uint64_t seed) {
    if (c.m() < 2 || c.s() == 0) throw DataError("kmeans training: empty corpus");
    if (k == 0 || k > c.s())
        throw DataError("kmeans training: k must lie in [1, s]");
    std::vector<std::size_t> offset;
    CscMatrix stacked = vstack(c.X, offset);
    auto km = numkit::kmeans(stacked, k, seed);

    ProjectionModel m;
    m.method = Method::kmeans;
    m.k_lsi = m.k_cca = static_cast<std::uint32_t>(k);
    m.seed = seed;
    for (std::size_t i = 0; i < c.m(); ++i) {
        DenseMatrix Ci = km.centroids.row_range(offset[i], c.X[i].rows());
        auto pinv = numkit::aligned_basis_pinv(Ci);
        m.degraded = m.degraded || pinv.degraded;
        LangEntry e;
        e.lang = c.langs[i];
        e.vocab_hash = vocab_hash_of(c, i);
        e.P = std::move(pinv.P);
        m.langs.push_back(std::move(e));
    }
    fix_component_signs(m);
    return m;
}

ProjectionModel train_lsi_model(const ComparableCorpus &c, std::size_t k,
                                std::uint64_t seed) {
    if (c.m() < 2 || c.s() == 0) throw DataError("lsi training: empty corpus");
    std::vector<const CscMatrix *> blocks;
    std::size_t total = 0;
    for (const auto &x : c.X) {
        blocks.push_back(&x);
        total += x.rows();
    }
    if (k == 0 || k > std::min(total, c.s()))
        throw DataError("lsi training: k must lie in [1, min(N, s)]");
    numkit::SparseVStackOp op(blocks);
    auto svd = numkit::truncated_svd(op, k, seed);

    ProjectionModel m;
    m.method = Method::lsi;
    m.k_lsi = m.k_cca = static_cast<std::uint32_t>(k);
    m.seed = seed;
    std::size_t row = 0;
    for (std::size_t i = 0; i < c.m(); ++i) {
        DenseMatrix Ui = svd.U.row_range(row, c.X[i].rows());
        row += c.X[i].rows();
        auto pinv = numkit::aligned_basis_pinv(Ui);
        m.degraded = m.degraded || pinv.degraded;
        LangEntry e;
        e.lang = c.langs[i];
        e.vocab_hash = vocab_hash_of(c, i);
        e.P = std::move(pinv.P);
        m.langs.push_back(std::move(e));
    }
    fix_component_signs(m);
    return m;
}

ProjectionModel train_cca_model(const ComparableCorpus &c, std::size_t k,
                                double kappa) {
    if (c.m() != 2)
        throw DataError("cca training: corpus must hold exactly two languages");
    check_kappa(kappa);
    auto ali = corpus::alignment_index(c);
    const auto &cols = ali.pairs[0][1];
    if (cols.size() < k + 1)
        throw DataError("cca training: need more than k aligned columns, have " +
                        std::to_string(cols.size()));
    if (k == 0 || k > std::min(c.X[0].rows(), c.X[1].rows()))
        throw DataError("cca training: k exceeds a vocabulary dimension");

    // classic paired estimates: means and covariances over the aligned set
    auto c0 = column_mean(c.X[0], cols);
    auto c1 = column_mean(c.X[1], cols);
    DenseMatrix C00 = cross_covariance(c.X[0], c.X[0], cols, c0, c0);
    DenseMatrix C11 = cross_covariance(c.X[1], c.X[1], cols, c1, c1);
    DenseMatrix C01 = cross_covariance(c.X[0], c.X[1], cols, c0, c1);

    auto K0 = numkit::cholesky_ridge(shrink_regularize(C00, kappa));
    auto K1 = numkit::cholesky_ridge(shrink_regularize(C11, kappa));
    DenseMatrix G = whiten_right(whiten_left(K0.K, C01), K1.K);
    auto svd = numkit::jacobi_svd(G);

    ProjectionModel m;
    m.method = Method::cca;
    m.k_lsi = m.k_cca = static_cast<std::uint32_t>(k);
    m.kappa = kappa;
    m.degraded = K0.ridge != 0.0 || K1.ridge != 0.0;

    DenseMatrix W0 = numkit::solve_upper(K0.K, svd.U.col_range(0, k));
    DenseMatrix W1 = numkit::solve_upper(K1.K, svd.V.col_range(0, k));

    // report the empirical correlation of each found pair (the regularizer
    // shapes the directions only); reorder so the spectrum is nonincreasing
    std::vector<double> rho(k);
    for (std::size_t t = 0; t < k; ++t) {
        double num = 0.0, var0 = 0.0, var1 = 0.0;
        for (std::size_t i = 0; i < C01.rows(); ++i) {
            double row_c01 = 0.0, row_c00 = 0.0;
            for (std::size_t j = 0; j < C01.cols(); ++j)
                row_c01 += C01(i, j) * W1(j, t);
            for (std::size_t j = 0; j < C00.cols(); ++j)
                row_c00 += C00(i, j) * W0(j, t);
            num += W0(i, t) * row_c01;
            var0 += W0(i, t) * row_c00;
        }
        for (std::size_t i = 0; i < C11.rows(); ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < C11.cols(); ++j)
                row += C11(i, j) * W1(j, t);
            var1 += W1(i, t) * row;
        }
        const double denom = std::sqrt(var0) * std::sqrt(var1);
        rho[t] = denom > 0.0 ? num / denom : 0.0;
    }
    std::vector<std::size_t> order(k);
    for (std::size_t t = 0; t < k; ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rho[a] > rho[b]; });

    DenseMatrix P0(k, C00.rows()), P1(k, C11.rows());
    m.spectrum.resize(k);
    for (std::size_t t = 0; t < k; ++t) {
        m.spectrum[t] = rho[order[t]];
        for (std::size_t i = 0; i < C00.rows(); ++i) P0(t, i) = W0(i, order[t]);
        for (std::size_t i = 0; i < C11.rows(); ++i) P1(t, i) = W1(i, order[t]);
    }
    for (std::size_t i = 0; i < 2; ++i) {
        LangEntry e;
        e.lang = c.langs[i];
        e.vocab_hash = vocab_hash_of(c, i);
        e.P = i == 0 ? std::move(P0) : std::move(P1);
        m.langs.push_back(std::move(e));
    }
    fix_component_signs(m);
    return m;
}

ProjectionModel train_hubcca_model(const ComparableCorpus &c,
                                   std::size_t hub_index, std::size_t k_lsi,
                                   std::size_t k_cca, double kappa,
                                   std::uint64_t seed) {
    if (hub_index >= c.m()) throw DataError("hubcca training: bad hub index");
    check_kappa(kappa);
    if (k_cca == 0 || k_cca > k_lsi)
        throw DataError("hubcca training: need 0 < k_cca <= k_lsi");
    auto ali = corpus::alignment_index(c);
    if (ali.single[hub_index].size() < 2)
        throw DataError("hubcca training: hub language has no data");

    // languages usable in step 1: enough hub-aligned columns to estimate a
    // covariance; the rest are left out of the model
    ProjectionModel m;
    m.method = Method::hubcca;
    m.k_lsi = static_cast<std::uint32_t>(k_lsi);
    m.k_cca = static_cast<std::uint32_t>(k_cca);
    m.kappa = kappa;
    m.seed = seed;
    std::vector<std::size_t> included;  // corpus indices, hub first
    included.push_back(hub_index);
    for (std::size_t j = 0; j < c.m(); ++j) {
        if (j == hub_index) continue;
        if (ali.pairs[hub_index][j].size() >= 2)
            included.push_back(j);
        else
            m.notes.push_back("excluded " + c.langs[j] +
                              ": fewer than two hub-aligned columns");
    }
    if (included.size() < 2)
        throw DataError("hubcca training: no language shares data with the hub");

    // step 1: reduce every language against the stacked hub cross-covariances
    std::vector<std::vector<double>> means(included.size());
    for (std::size_t t = 0; t < included.size(); ++t)
        means[t] = column_mean(c.X[included[t]], ali.single[included[t]]);

    std::vector<DenseMatrix> cross;
    for (std::size_t t = 1; t < included.size(); ++t)
        cross.push_back(cross_covariance(c.X[hub_index], c.X[included[t]],
                                         ali.pairs[hub_index][included[t]],
                                         means[0], means[t]));
    std::vector<const DenseMatrix *> cross_ptr;
    for (const auto &b : cross) cross_ptr.push_back(&b);
    numkit::DenseHStackOp stacked(cross_ptr);
    auto svd = numkit::truncated_svd(stacked, k_lsi, seed);

    std::vector<DenseMatrix> V(included.size());
    V[0] = svd.U;
    std::size_t row = 0;
    for (std::size_t t = 1; t < included.size(); ++t) {
        V[t] = svd.V.row_range(row, c.X[included[t]].rows());
        row += c.X[included[t]].rows();
    }

    // step 2: squared-correlation solution in the reduced space
    std::vector<DenseMatrix> Y(included.size());
    for (std::size_t t = 0; t < included.size(); ++t)
        Y[t] = numkit::spmm(V[t].transposed(), c.X[included[t]]);

    std::vector<DenseMatrix> K(included.size());
    std::vector<std::vector<double>> ymean(included.size());
    for (std::size_t t = 0; t < included.size(); ++t) {
        const auto &own = ali.single[included[t]];
        ymean[t] = dense_column_mean(Y[t], own);
        DenseMatrix D = cross_covariance_dense(Y[t], Y[t], own, ymean[t], ymean[t]);
        auto chol = numkit::cholesky_ridge(shrink_regularize(std::move(D), kappa));
        m.degraded = m.degraded || chol.ridge != 0.0;
        K[t] = std::move(chol.K);
    }

    std::vector<DenseMatrix> G(included.size());  // [0] unused
    DenseMatrix sumGG(k_lsi, k_lsi);
    for (std::size_t t = 1; t < included.size(); ++t) {
        DenseMatrix D =
            cross_covariance_dense(Y[0], Y[t], ali.pairs[hub_index][included[t]],
                                   ymean[0], ymean[t]);
        G[t] = whiten_right(whiten_left(K[0], D), K[t]);
        DenseMatrix Gt = G[t].transposed();
        DenseMatrix GG = numkit::blocked_gram(Gt, Gt);
        for (std::size_t j = 0; j < k_lsi; ++j) {
            double *acc = sumGG.col(j);
            const double *add = GG.col(j);
            for (std::size_t i = 0; i < k_lsi; ++i) acc[i] += add[i];
        }
    }

    auto eig = numkit::sym_eig(sumGG, k_cca);
    m.spectrum = eig.values;
    const DenseMatrix &Y1 = eig.vectors;  // k_lsi x k_cca, unit columns

    std::vector<DenseMatrix> W(included.size());
    W[0] = numkit::solve_upper(K[0], Y1);
    for (std::size_t t = 1; t < included.size(); ++t) {
        DenseMatrix B = numkit::matmul(G[t].transposed(), Y1);
        for (std::size_t j = 0; j < B.cols(); ++j) {
            double *col = B.col(j);
            double nrm = 0.0;
            for (std::size_t i = 0; i < B.rows(); ++i) nrm += col[i] * col[i];
            nrm = std::sqrt(nrm);
            if (nrm > 1e-300) {
                for (std::size_t i = 0; i < B.rows(); ++i) col[i] /= nrm;
            } else {
                // direction carries no correlation with this language
                for (std::size_t i = 0; i < B.rows(); ++i) col[i] = 0.0;
            }
        }
        W[t] = numkit::solve_upper(K[t], B);
    }

    for (std::size_t t = 0; t < included.size(); ++t) {
        LangEntry e;
        e.lang = c.langs[included[t]];
        e.vocab_hash = vocab_hash_of(c, included[t]);
        e.V = std::move(V[t]);
        e.W = std::move(W[t]);
        m.langs.push_back(std::move(e));
    }
    fix_component_signs(m);
    return m;
}

}  // namespace xlem::models
