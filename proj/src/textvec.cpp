#include "xlem/textvec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "xlem/error.hpp"

namespace xlem::textvec {

double SparseVector::norm() const {
    double s = 0.0;
    for (double v : val) s += v * v;
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

void SparseVector::scale(double f) {
    for (double &v : val) v *= f;
}

void SparseVector::normalize() {
    const double n = norm();
    if (n > 0.0) scale(1.0 / n);
}

double dot(const SparseVector &a, const SparseVector &b) {
    if (a.dim != b.dim) throw DataError("sparse dot: dimension mismatch");
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.idx.size() && j < b.idx.size()) {
        if (a.idx[i] < b.idx[j]) {
            ++i;
        } else if (a.idx[i] > b.idx[j]) {
            ++j;
        } else {
            s += a.val[i] * b.val[j];
            ++i;
            ++j;
        }
    }
    return s;
}

double cosine(const SparseVector &a, const SparseVector &b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        if (a.dim != b.dim) throw DataError("cosine: dimension mismatch");
        return 0.0;
    }
    return dot(a, b) / (na * nb);
}

Vocabulary build_vocabulary(const std::vector<Document> &docs,
                            std::uint32_t min_df, std::uint32_t top_k_drop) {
    Vocabulary v;
    if (!docs.empty()) v.lang = docs[0].lang;
    std::map<std::string, std::uint32_t> df;
    for (const Document &d : docs) {
        if (d.lang != v.lang)
            throw DataError("build_vocabulary: mixed languages (doc '" + d.id + "' is '" +
                            d.lang + "', expected '" + v.lang + "')");
        std::set<std::string> distinct(d.tokens.begin(), d.tokens.end());
        for (const std::string &t : distinct) ++df[t];
    }
    v.n_docs = docs.size();

    std::vector<std::pair<std::string, std::uint32_t>> kept;
    for (const auto &[term, count] : df)
        if (count >= min_df) kept.emplace_back(term, count);

    if (top_k_drop > 0 && !kept.empty()) {
        // highest df first; ties put the lexicographically smaller term first
        // so it is removed first
        std::vector<std::size_t> order(kept.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (kept[a].second != kept[b].second) return kept[a].second > kept[b].second;
            return kept[a].first < kept[b].first;
        });
        std::set<std::size_t> dropped(order.begin(),
                                      order.begin() + std::min<std::size_t>(top_k_drop, order.size()));
        std::vector<std::pair<std::string, std::uint32_t>> rest;
        for (std::size_t i = 0; i < kept.size(); ++i)
            if (!dropped.count(i)) rest.push_back(kept[i]);
        kept = std::move(rest);
    }

    // kept is already lexicographic (came from an ordered map)
    v.df.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        v.term_to_index.emplace(kept[i].first, static_cast<std::uint32_t>(i));
        v.df.push_back(kept[i].second);
    }
    return v;
}

namespace {

template <typename DfLookup>
SparseVector vectorize_impl(const Document &doc, const Vocabulary &vocab,
                            std::uint64_t n_docs, DfLookup df_of, bool normalize) {
    if (doc.lang != vocab.lang)
        throw DataError("vectorize: document language '" + doc.lang +
                        "' does not match vocabulary '" + vocab.lang + "'");
    std::map<std::uint32_t, std::uint32_t> tf;
    for (const std::string &t : doc.tokens) {
        auto it = vocab.term_to_index.find(t);
        if (it != vocab.term_to_index.end()) ++tf[it->second];
    }
    SparseVector out;
    out.dim = vocab.size();
    for (const auto &[index, count] : tf) {
        const std::uint32_t dfc = df_of(index);
        if (dfc == 0 || dfc > n_docs) continue;  // no usable window statistic
        const double w =
            static_cast<double>(count) *
            std::log(static_cast<double>(n_docs) / static_cast<double>(dfc));
        if (w != 0.0) {
            out.idx.push_back(index);
            out.val.push_back(w);
        }
    }
    if (normalize) out.normalize();
    return out;
}

}  // namespace

SparseVector vectorize(const Document &doc, const Vocabulary &vocab,
                       bool normalize) {
    return vectorize_impl(
        doc, vocab, vocab.n_docs,
        [&](std::uint32_t index) { return vocab.df[index]; }, normalize);
}

std::uint32_t SlidingIdfState::df(const std::string &term) const {
    auto it = df_.find(term);
    return it == df_.end() ? 0 : it->second;
}

void SlidingIdfState::ingest(const Document &doc) {
    if (!doc.timestamp)
        throw DataError("sliding idf: document '" + doc.id + "' has no timestamp");
    const std::int64_t ts = *doc.timestamp;
    std::set<std::string> distinct(doc.tokens.begin(), doc.tokens.end());
    std::vector<std::string> terms(distinct.begin(), distinct.end());
    for (const std::string &t : terms) ++df_[t];
    // keep the ring ordered by timestamp even with late arrivals
    auto pos = std::upper_bound(
        ring_.begin(), ring_.end(), ts,
        [](std::int64_t v, const auto &entry) { return v < entry.first; });
    ring_.insert(pos, {ts, std::move(terms)});
    newest_ = std::max(newest_, ts);
    const std::int64_t cutoff =
        newest_ - static_cast<std::int64_t>(window_days_) * 86400;
    while (!ring_.empty() && ring_.front().first < cutoff) {
        for (const std::string &t : ring_.front().second) {
            auto it = df_.find(t);
            if (--(it->second) == 0) df_.erase(it);
        }
        ring_.pop_front();
    }
}

SparseVector vectorize(const Document &doc, const Vocabulary &vocab,
                       const SlidingIdfState &idf, bool normalize) {
    // map vocab indices back to terms once per call; vocab map iteration is
    // ordered by term, so build the reverse lookup directly
    std::vector<const std::string *> term_of(vocab.size(), nullptr);
    for (const auto &[term, index] : vocab.term_to_index) term_of[index] = &term;
    return vectorize_impl(
        doc, vocab, idf.n_docs(),
        [&](std::uint32_t index) { return idf.df(*term_of[index]); }, normalize);
}

std::vector<std::string> tokenize_simple(const std::string &text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace xlem::textvec
