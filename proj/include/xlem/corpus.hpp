#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xlem/numkit/sparse.hpp"
#include "xlem/textvec.hpp"

namespace xlem::corpus {

// Multilingual aligned collection. Language 0 is the hub. Column ell of X[i]
// holds the unit-normalized TFIDF vector of language i's document in
// multilingual document ell, or all zeros when that cell is missing.
struct ComparableCorpus {
    std::vector<std::string> langs;
    std::vector<textvec::Vocabulary> vocabs;
    std::vector<numkit::CscMatrix> X;                 // n_i x s
    std::vector<std::vector<std::uint8_t>> present;   // [lang][col]
    std::vector<std::vector<std::string>> doc_ids;    // [lang][col], "" = missing

    std::size_t m() const { return langs.size(); }
    std::size_t s() const { return present.empty() ? 0 : present[0].size(); }
    std::size_t lang_index(const std::string &lang) const;  // throws on miss

    textvec::SparseVector column(std::size_t lang, std::size_t col) const;
};

struct AlignmentIndex {
    std::vector<std::vector<std::size_t>> single;              // a(i)
    std::vector<std::vector<std::vector<std::size_t>>> pairs;  // a(i,j)
};
AlignmentIndex alignment_index(const ComparableCorpus &c);

// Removes documents with fewer distinct terms than the threshold (applied
// before vocabulary building).
std::vector<textvec::Document> filter_stubs(std::vector<textvec::Document> docs,
                                            std::uint32_t min_distinct_terms);

struct ImportParams {
    std::uint32_t min_df = 1;
    std::uint32_t top_k_drop = 0;
    std::uint32_t min_distinct_terms = 0;
};

struct ImportReport {
    std::size_t stub_docs_removed = 0;
    std::size_t rows_dropped = 0;        // rows left with < 2 nonempty cells
    std::size_t cells_zero_vector = 0;   // present cells that vectorized to zero
};

// Builds the corpus from per-language document collections and alignment
// rows (one row per multilingual document, cells are doc ids, "" = missing).
// Per-language vocabularies and IDF statistics come from the documents
// aligned with the hub (all of that language's aligned documents when the
// hub alignment is empty). Cells whose TFIDF vector comes out all-zero are
// treated as missing; rows falling under two nonempty cells are dropped.
ComparableCorpus import_corpus(
    const std::vector<std::string> &langs,
    const std::vector<std::vector<textvec::Document>> &docs_per_lang,
    const std::vector<std::vector<std::string>> &alignment_rows,
    const ImportParams &params, ImportReport *report = nullptr);

struct TestSelector {
    enum class Mode { ids, fraction, pairs };
    Mode mode = Mode::fraction;
    std::vector<std::string> ids;  // columns containing any of these doc ids
    double fraction = 0.0;         // per-pair sample of aligned columns
    std::vector<std::pair<std::size_t, std::size_t>> held_out_pairs;
};

using TestPairList =
    std::vector<std::pair<textvec::SparseVector, textvec::SparseVector>>;

struct SplitResult {
    ComparableCorpus train;
    // keyed by (i, j) with i < j; x from language i, y from language j
    std::map<std::pair<std::size_t, std::size_t>, TestPairList> test;
    std::vector<std::size_t> test_columns;  // source column indices moved out
};

// Splits by multilingual-document column: selected columns leave the training
// corpus entirely and their per-pair vector pairs form the test lists. With
// Mode::pairs the chosen pairs end up with empty training alignment.
SplitResult split_train_test(const ComparableCorpus &c, const TestSelector &sel,
                             std::uint64_t seed);

}  // namespace xlem::corpus
