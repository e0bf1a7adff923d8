#include "xlem/corpus.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "xlem/error.hpp"
#include "xlem/numkit/rng.hpp"

namespace xlem::corpus {

using textvec::Document;
using textvec::SparseVector;
using textvec::Vocabulary;

std::size_t ComparableCorpus::lang_index(const std::string &lang) const {
    for (std::size_t i = 0; i < langs.size(); ++i)
        if (langs[i] == lang) return i;
    throw DataError("unknown language: " + lang);
}

SparseVector ComparableCorpus::column(std::size_t lang, std::size_t col) const {
    SparseVector v;
    v.dim = X[lang].rows();
    for (std::size_t t = X[lang].col_begin(col); t < X[lang].col_end(col); ++t) {
        v.idx.push_back(X[lang].row_at(t));
        v.val.push_back(X[lang].value_at(t));
    }
    return v;
}

AlignmentIndex alignment_index(const ComparableCorpus &c) {
    AlignmentIndex a;
    const std::size_t m = c.m(), s = c.s();
    a.single.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < s; ++l)
            if (c.present[i][l]) a.single[i].push_back(l);
    a.pairs.assign(m, std::vector<std::vector<std::size_t>>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) {
                a.pairs[i][j] = a.single[i];
                continue;
            }
            for (std::size_t l = 0; l < s; ++l)
                if (c.present[i][l] && c.present[j][l]) a.pairs[i][j].push_back(l);
        }
    return a;
}

std::vector<Document> filter_stubs(std::vector<Document> docs,
                                   std::uint32_t min_distinct_terms) {
    if (min_distinct_terms == 0) return docs;
    std::vector<Document> kept;
    kept.reserve(docs.size());
    for (auto &d : docs) {
        std::set<std::string> distinct(d.tokens.begin(), d.tokens.end());
        if (distinct.size() >= min_distinct_terms) kept.push_back(std::move(d));
    }
    return kept;
}

ComparableCorpus import_corpus(
    const std::vector<std::string> &langs,
    const std::vector<std::vector<Document>> &docs_per_lang,
    const std::vector<std::vector<std::string>> &alignment_rows,
    const ImportParams &params, ImportReport *report) {
    const std::size_t m = langs.size();
    if (m < 2) throw DataError("import_corpus: need at least two languages");
    if (docs_per_lang.size() != m)
        throw DataError("import_corpus: document stream count does not match languages");
    ImportReport rep;

    // index documents per language, dropping stubs first
    std::vector<std::unordered_map<std::string, const Document *>> by_id(m);
    std::vector<std::vector<Document>> filtered(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t before = docs_per_lang[i].size();
        filtered[i] = filter_stubs(docs_per_lang[i], params.min_distinct_terms);
        rep.stub_docs_removed += before - filtered[i].size();
        for (const Document &d : filtered[i]) {
            if (d.lang != langs[i])
                throw DataError("import_corpus: document '" + d.id + "' has language '" +
                                d.lang + "', stream expects '" + langs[i] + "'");
            if (!by_id[i].emplace(d.id, &d).second)
                throw DataError("import_corpus: duplicate doc id '" + d.id +
                                "' in language " + langs[i]);
        }
    }
    // ids that were filtered away must not be reported as unknown
    std::vector<std::unordered_set<std::string>> stubbed(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (const Document &d : docs_per_lang[i])
            if (!by_id[i].count(d.id)) stubbed[i].insert(d.id);
    }

    // resolve alignment rows; stub-filtered cells become missing
    std::vector<std::vector<const Document *>> rows;
    for (const auto &row : alignment_rows) {
        if (row.size() != m)
            throw DataError("import_corpus: alignment row has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(m));
        std::vector<const Document *> cells(m, nullptr);
        std::size_t nonempty = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (row[i].empty()) continue;
            auto it = by_id[i].find(row[i]);
            if (it == by_id[i].end()) {
                if (stubbed[i].count(row[i])) continue;  // removed by stub filter
                throw DataError("import_corpus: unknown doc id '" + row[i] +
                                "' for language " + langs[i]);
            }
            cells[i] = it->second;
            ++nonempty;
        }
        if (nonempty < 2) {
            ++rep.rows_dropped;
            continue;
        }
        rows.push_back(std::move(cells));
    }

    // vocabulary + IDF per language over its hub-aligned documents
    ComparableCorpus c;
    c.langs = langs;
    c.vocabs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<Document> basis;
        for (const auto &row : rows)
            if (row[i] && row[0]) basis.push_back(*row[i]);
        if (basis.empty()) {
            for (const auto &row : rows)
                if (row[i]) basis.push_back(*row[i]);
        }
        c.vocabs[i] = textvec::build_vocabulary(basis, params.min_df, params.top_k_drop);
        c.vocabs[i].lang = langs[i];
    }

    // vectorize; an all-zero vector demotes the cell to missing
    std::vector<std::vector<SparseVector>> vecs(rows.size(),
                                                std::vector<SparseVector>(m));
    std::vector<std::size_t> kept_rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::size_t nonempty = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!rows[r][i]) continue;
            SparseVector v = textvec::vectorize(*rows[r][i], c.vocabs[i], true);
            if (v.idx.empty()) {
                ++rep.cells_zero_vector;
                rows[r][i] = nullptr;
                continue;
            }
            vecs[r][i] = std::move(v);
            ++nonempty;
        }
        if (nonempty < 2) {
            ++rep.rows_dropped;
            continue;
        }
        kept_rows.push_back(r);
    }

    const std::size_t s = kept_rows.size();
    c.present.assign(m, std::vector<std::uint8_t>(s, 0));
    c.doc_ids.assign(m, std::vector<std::string>(s));
    for (std::size_t i = 0; i < m; ++i) {
        auto mat = numkit::CscMatrix::empty_cols(c.vocabs[i].size());
        for (std::size_t l = 0; l < s; ++l) {
            const std::size_t r = kept_rows[l];
            if (rows[r][i]) {
                c.present[i][l] = 1;
                c.doc_ids[i][l] = rows[r][i]->id;
                mat.push_col(vecs[r][i].idx, vecs[r][i].val);
            } else {
                mat.push_col({}, {});
            }
        }
        c.X.push_back(std::move(mat));
    }
    if (report) *report = rep;
    return c;
}

SplitResult split_train_test(const ComparableCorpus &c, const TestSelector &sel,
                             std::uint64_t seed) {
    const std::size_t m = c.m(), s = c.s();
    AlignmentIndex ali = alignment_index(c);
    std::set<std::size_t> moved;
    // pair -> selected columns, keyed (i, j) with i < j
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> chosen;

    switch (sel.mode) {
        case TestSelector::Mode::ids: {
            std::unordered_set<std::string> wanted(sel.ids.begin(), sel.ids.end());
            for (std::size_t l = 0; l < s; ++l)
                for (std::size_t i = 0; i < m && !moved.count(l); ++i)
                    if (c.present[i][l] && wanted.count(c.doc_ids[i][l]))
                        moved.insert(l);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    for (std::size_t l : ali.pairs[i][j])
                        if (moved.count(l)) chosen[{i, j}].push_back(l);
            break;
        }
        case TestSelector::Mode::fraction: {
            if (sel.fraction < 0.0 || sel.fraction > 1.0)
                throw DataError("split: fraction must be in [0,1]");
            numkit::Rng rng(seed);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j) {
                    std::vector<std::size_t> cols = ali.pairs[i][j];
                    const std::size_t take = static_cast<std::size_t>(
                        sel.fraction * static_cast<double>(cols.size()) + 0.5);
                    if (take == 0) continue;
                    rng.shuffle(cols);
                    cols.resize(take);
                    std::sort(cols.begin(), cols.end());
                    for (std::size_t l : cols) moved.insert(l);
                    chosen[{i, j}] = std::move(cols);
                }
            break;
        }
        case TestSelector::Mode::pairs: {
            for (auto [i, j] : sel.held_out_pairs) {
                if (i >= m || j >= m || i == j)
                    throw DataError("split: bad language pair");
                if (i > j) std::swap(i, j);
                auto &cols = chosen[{i, j}];
                cols = ali.pairs[i][j];
                for (std::size_t l : cols) moved.insert(l);
            }
            break;
        }
    }

    if (moved.size() == s)
        throw DataError("split: selector leaves the training set empty");

    SplitResult out;
    out.test_columns.assign(moved.begin(), moved.end());
    for (const auto &[pair, cols] : chosen) {
        if (cols.empty()) continue;
        TestPairList &list = out.test[pair];
        for (std::size_t l : cols)
            list.emplace_back(c.column(pair.first, l), c.column(pair.second, l));
    }

    // training corpus keeps the remaining columns and the same vocabularies
    std::vector<std::size_t> keep;
    for (std::size_t l = 0; l < s; ++l)
        if (!moved.count(l)) keep.push_back(l);
    out.train.langs = c.langs;
    out.train.vocabs = c.vocabs;
    out.train.present.assign(m, std::vector<std::uint8_t>(keep.size(), 0));
    out.train.doc_ids.assign(m, std::vector<std::string>(keep.size()));
    for (std::size_t i = 0; i < m; ++i) {
        out.train.X.push_back(c.X[i].select_cols(keep));
        for (std::size_t t = 0; t < keep.size(); ++t) {
            out.train.present[i][t] = c.present[i][keep[t]];
            out.train.doc_ids[i][t] = c.doc_ids[i][keep[t]];
        }
    }
    return out;
}

}  // namespace xlem::corpus
