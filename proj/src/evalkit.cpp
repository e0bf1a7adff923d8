#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "xlem/error.hpp"
#include "xlem/evalkit.hpp"
#include "xlem/numkit/kernels.hpp"

namespace xlem::evalkit {

using numkit::CscMatrix;
using numkit::DenseMatrix;

namespace {

void normalize_columns(DenseMatrix &A) {
    for (std::size_t j = 0; j < A.cols(); ++j) {
        double *col = A.col(j);
        double s = 0.0;
        for (std::size_t i = 0; i < A.rows(); ++i) s += col[i] * col[i];
        if (s > 0.0) {
            const double inv = 1.0 / std::sqrt(s);
            for (std::size_t i = 0; i < A.rows(); ++i) col[i] *= inv;
        }
    }
}

// Per-rank counts; keeps every reduction over ranks in one canonical order
// so scores do not depend on test pair order.
std::vector<std::size_t> rank_histogram(const RankList &r) {
    std::size_t top = 0;
    for (std::size_t v : r.ranks) top = std::max(top, v);
    std::vector<std::size_t> h(top + 1, 0);
    for (std::size_t v : r.ranks) {
        if (v == 0) throw DataError("ranks are 1-based");
        ++h[v];
    }
    return h;
}

}  // namespace

RankList mate_ranks(const models::ProjectionModel &m, std::size_t lang_i,
                    std::size_t lang_j, const corpus::TestPairList &pairs) {
    if (pairs.size() < 2)
        throw DataError("mate ranking needs at least two test pairs");
    if (lang_i >= m.langs.size() || lang_j >= m.langs.size())
        throw DataError("mate ranking: language index out of range");

    auto Q = CscMatrix::empty_cols(pairs[0].first.dim);
    auto T = CscMatrix::empty_cols(pairs[0].second.dim);
    for (const auto &p : pairs) {
        Q.push_col(p.first.idx, p.first.val);
        T.push_col(p.second.idx, p.second.val);
    }
    DenseMatrix Pq = models::project_columns(m, lang_i, Q);
    DenseMatrix Pt = models::project_columns(m, lang_j, T);
    normalize_columns(Pq);
    normalize_columns(Pt);
    DenseMatrix S = numkit::blocked_gram(Pq, Pt);  // n x n cosine table

    const std::size_t n = pairs.size();
    RankList out;
    out.lang_i = m.langs[lang_i].lang;
    out.lang_j = m.langs[lang_j].lang;
    out.ranks.assign(n, 0);
#pragma omp parallel for schedule(static)
    for (long long ll = 0; ll < static_cast<long long>(n); ++ll) {
        const auto l = static_cast<std::size_t>(ll);
        const double own = S(l, l);
        std::size_t ahead = 0;
        for (std::size_t t = 0; t < n; ++t) {
            if (S(l, t) > own || (S(l, t) == own && t < l)) ++ahead;
        }
        out.ranks[l] = ahead + 1;
    }
    return out;
}

double retrieval_score(const RankList &r) {
    const std::size_t n = r.ranks.size();
    if (n < 2) throw DataError("retrieval score needs at least two ranks");
    // sum (n - rank) exactly in integers; one division at the end keeps the
    // result independent of rank order
    std::uint64_t gained = 0;
    for (std::size_t v : r.ranks) {
        if (v == 0 || v > n) throw DataError("rank outside [1, n]");
        gained += n - v;
    }
    const double nn = static_cast<double>(n);
    return (100.0 / nn) *
           (static_cast<double>(gained) / (nn - 1.0) - 0.5 * nn);
}

double retrieval_score_scaled(const RankList &r) {
    return 2.0 * retrieval_score(r);
}

double mrr(const RankList &r) {
    if (r.ranks.empty()) throw DataError("mrr of an empty rank list");
    auto h = rank_histogram(r);
    double s = 0.0;
    for (std::size_t v = 1; v < h.size(); ++v)
        if (h[v])
            s += static_cast<double>(h[v]) / static_cast<double>(v);
    return s / static_cast<double>(r.ranks.size());
}

double amrr(const std::vector<double> &mrrs) {
    if (mrrs.empty()) throw DataError("amrr of an empty list");
    double s = 0.0;
    for (double v : mrrs) s += v;
    return s / static_cast<double>(mrrs.size());
}

EvalReport evaluate_model(const models::ProjectionModel &m,
                          const io::TestPairsFile &pairs) {
    if (pairs.entries.empty()) throw DataError("no language pairs to evaluate");
    EvalReport rep;
    std::vector<double> mrrs;
    for (const auto &e : pairs.entries) {
        RankList rl = mate_ranks(m, m.index_of(e.lang_i), m.index_of(e.lang_j),
                                 e.pairs);
        EvalReport::Row row;
        row.lang_i = e.lang_i;
        row.lang_j = e.lang_j;
        row.n = rl.ranks.size();
        row.score_printed = retrieval_score(rl);
        row.score_scaled = retrieval_score_scaled(rl);
        row.mrr = mrr(rl);
        mrrs.push_back(row.mrr);
        rep.rows.push_back(std::move(row));
    }
    rep.amrr = amrr(mrrs);
    return rep;
}

std::string report_tsv(const EvalReport &r) {
    std::string out = "pair\tn\tscore_printed\tscore_scaled\tmrr\n";
    for (const auto &row : r.rows) {
        out += row.lang_i + "-" + row.lang_j + "\t" + std::to_string(row.n) +
               "\t" + io::format_double(row.score_printed) + "\t" +
               io::format_double(row.score_scaled) + "\t" +
               io::format_double(row.mrr) + "\n";
    }
    out += "amrr\t\t\t\t" + io::format_double(r.amrr) + "\n";
    return out;
}

}  // namespace xlem::evalkit
