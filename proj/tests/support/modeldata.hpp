#pragma once

// Corpus builders for the projection-model tests: planted dense views wrapped
// as fully aligned corpora (bypassing text processing entirely), and
// topic-mixture collections pushed through the normal import pipeline.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "xlem/corpus.hpp"
#include "xlem/numkit/dense.hpp"
#include "xlem/numkit/sparse.hpp"
#include "xlem/synth.hpp"
#include "xlem/textvec.hpp"

namespace testutil {

using xlem::corpus::ComparableCorpus;

inline xlem::textvec::Vocabulary dummy_vocab(const std::string &lang,
                                             std::size_t n) {
    xlem::textvec::Vocabulary v;
    v.lang = lang;
    char buf[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "w%05zu", i);
        v.term_to_index[buf] = static_cast<std::uint32_t>(i);
    }
    v.df.assign(n, 1);
    v.n_docs = 2;
    return v;
}

// Fully aligned corpus whose column vectors are taken verbatim from the given
// dense views (one per language, equal column counts). Columns are not
// normalized, so planted covariance structure survives untouched.
inline ComparableCorpus corpus_from_dense(
    const std::vector<xlem::numkit::DenseMatrix> &views) {
    ComparableCorpus c;
    const std::size_t s = views.empty() ? 0 : views[0].cols();
    for (std::size_t i = 0; i < views.size(); ++i) {
        const auto &V = views[i];
        const std::string lang = "l" + std::to_string(i);
        c.langs.push_back(lang);
        c.vocabs.push_back(dummy_vocab(lang, V.rows()));
        std::vector<xlem::numkit::Triplet> t;
        for (std::size_t j = 0; j < V.cols(); ++j)
            for (std::size_t r = 0; r < V.rows(); ++r)
                if (V(r, j) != 0.0)
                    t.push_back({static_cast<std::uint32_t>(r),
                                 static_cast<std::uint32_t>(j), V(r, j)});
        c.X.push_back(xlem::numkit::CscMatrix::from_triplets(V.rows(), s, t));
        c.present.emplace_back(s, std::uint8_t{1});
        std::vector<std::string> ids(s);
        for (std::size_t j = 0; j < s; ++j)
            ids[j] = lang + "_c" + std::to_string(j);
        c.doc_ids.push_back(std::move(ids));
    }
    return c;
}

// Topic-mixture collection run through the standard importer.
inline ComparableCorpus topic_corpus(const xlem::synth::TopicCorpusParams &p,
                                     std::uint32_t min_df = 2) {
    auto t = xlem::synth::make_topic_corpus(p);
    xlem::corpus::ImportParams ip;
    ip.min_df = min_df;
    return xlem::corpus::import_corpus(t.langs, t.docs, t.alignment, ip);
}

}  // namespace testutil
