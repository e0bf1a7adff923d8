#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "support/testutil.hpp"
#include "xlem/corpus.hpp"
#include "xlem/error.hpp"
#include "xlem/io.hpp"
#include "xlem/numkit/rng.hpp"

using namespace xlem;
using corpus::ComparableCorpus;
using corpus::ImportParams;
using corpus::ImportReport;
using corpus::TestSelector;
using textvec::Document;

namespace {

Document doc(std::string id, std::string lang, std::vector<std::string> tokens) {
    Document d;
    d.id = std::move(id);
    d.lang = std::move(lang);
    d.tokens = std::move(tokens);
    return d;
}

// Hand-built corpus straight from a presence mask; column values are
// arbitrary but distinct so matrix comparisons are meaningful.
ComparableCorpus corpus_from_mask(const std::vector<std::vector<bool>> &mask) {
    const std::size_t m = mask.size();
    const std::size_t s = mask[0].size();
    ComparableCorpus c;
    for (std::size_t i = 0; i < m; ++i) c.langs.push_back("l" + std::to_string(i));
    c.vocabs.resize(m);
    c.present.assign(m, std::vector<std::uint8_t>(s, 0));
    c.doc_ids.assign(m, std::vector<std::string>(s));
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t dim = 3 + i;
        c.vocabs[i].lang = c.langs[i];
        c.vocabs[i].n_docs = s;
        for (std::size_t t = 0; t < dim; ++t) {
            c.vocabs[i].term_to_index["t" + std::to_string(t)] =
                static_cast<std::uint32_t>(t);
            c.vocabs[i].df.push_back(1);
        }
        auto mat = numkit::CscMatrix::empty_cols(dim);
        for (std::size_t l = 0; l < s; ++l) {
            if (mask[i][l]) {
                c.present[i][l] = 1;
                c.doc_ids[i][l] = "d" + std::to_string(i) + "_" + std::to_string(l);
                const auto row = static_cast<std::uint32_t>(l % dim);
                mat.push_col({row}, {1.0 + 0.25 * static_cast<double>(i + l)});
            } else {
                mat.push_col({}, {});
            }
        }
        c.X.push_back(std::move(mat));
    }
    return c;
}

void check_corpus_equal(const ComparableCorpus &a, const ComparableCorpus &b) {
    REQUIRE(a.langs == b.langs);
    REQUIRE(a.m() == b.m());
    REQUIRE(a.s() == b.s());
    for (std::size_t i = 0; i < a.m(); ++i) {
        CHECK(a.vocabs[i].lang == b.vocabs[i].lang);
        CHECK(a.vocabs[i].term_to_index == b.vocabs[i].term_to_index);
        CHECK(a.vocabs[i].df == b.vocabs[i].df);
        CHECK(a.vocabs[i].n_docs == b.vocabs[i].n_docs);
        CHECK(a.present[i] == b.present[i]);
        CHECK(a.doc_ids[i] == b.doc_ids[i]);
        auto ta = a.X[i].to_triplets();
        auto tb = b.X[i].to_triplets();
        REQUIRE(ta.size() == tb.size());
        for (std::size_t k = 0; k < ta.size(); ++k) {
            CHECK(ta[k].row == tb[k].row);
            CHECK(ta[k].col == tb[k].col);
            CHECK(ta[k].value == tb[k].value);  // bit-exact
        }
    }
}

std::string temp_dir(const std::string &tag) {
    auto p = std::filesystem::temp_directory_path() / ("xlem_corpus_" + tag);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

}  // namespace

TEST_CASE("import: two languages fully aligned") {
    std::vector<std::vector<Document>> docs(2);
    docs[0] = {doc("e1", "en", {"cat", "dog"}), doc("e2", "en", {"dog", "fish"}),
               doc("e3", "en", {"cat", "fish", "owl"})};
    docs[1] = {doc("f1", "fr", {"chat", "chien"}), doc("f2", "fr", {"chien"}),
               doc("f3", "fr", {"chat", "hibou"})};
    std::vector<std::vector<std::string>> rows = {
        {"e1", "f1"}, {"e2", "f2"}, {"e3", "f3"}};
    ImportReport rep;
    auto c = corpus::import_corpus({"en", "fr"}, docs, rows, {}, &rep);

    CHECK(c.m() == 2);
    CHECK(c.s() == 3);
    CHECK(rep.rows_dropped == 0);
    CHECK(rep.stub_docs_removed == 0);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t l = 0; l < 3; ++l) CHECK(c.present[i][l] == 1);
    CHECK(c.doc_ids[0] == std::vector<std::string>{"e1", "e2", "e3"});
    CHECK(c.doc_ids[1] == std::vector<std::string>{"f1", "f2", "f3"});

    // stored columns are unit TFIDF vectors
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t l = 0; l < 3; ++l)
            CHECK(c.X[i].col_norm(l) == doctest::Approx(1.0).epsilon(1e-12));

    // m() and s() consistent with matrices
    for (std::size_t i = 0; i < 2; ++i) CHECK(c.X[i].cols() == c.s());
}

TEST_CASE("import: row with a single nonempty cell is dropped and counted") {
    std::vector<std::vector<Document>> docs(2);
    docs[0] = {doc("e1", "en", {"cat", "dog"}), doc("e2", "en", {"owl", "dog"}),
               doc("e3", "en", {"cat", "owl"})};
    docs[1] = {doc("f1", "fr", {"chat", "chien"}),
               doc("f3", "fr", {"chat", "hibou"})};
    std::vector<std::vector<std::string>> rows = {
        {"e1", "f1"}, {"e2", ""}, {"e3", "f3"}};
    ImportReport rep;
    auto c = corpus::import_corpus({"en", "fr"}, docs, rows, {}, &rep);
    CHECK(c.s() == 2);
    CHECK(rep.rows_dropped == 1);
    CHECK(c.doc_ids[0] == std::vector<std::string>{"e1", "e3"});
}

TEST_CASE("import: three languages with pairwise-only overlaps") {
    std::vector<std::vector<Document>> docs(3);
    docs[0] = {doc("e1", "en", {"sun", "moon"}), doc("e2", "en", {"sun", "rain"}),
               doc("e3", "en", {"star", "moon"}), doc("e4", "en", {"star", "rain"})};
    docs[1] = {doc("f1", "fr", {"soleil", "lune"}),
               doc("f2", "fr", {"soleil", "pluie"})};
    docs[2] = {doc("g1", "de", {"sonne", "mond"}),
               doc("g2", "de", {"sonne", "regen"})};
    // rows 0-1 pair en/fr, rows 2-3 pair en/de; fr and de never co-occur
    std::vector<std::vector<std::string>> rows = {
        {"e1", "f1", ""}, {"e2", "f2", ""}, {"e3", "", "g1"}, {"e4", "", "g2"}};
    auto c = corpus::import_corpus({"en", "fr", "de"}, docs, rows, {}, nullptr);
    auto a = corpus::alignment_index(c);
    CHECK(a.pairs[0][1] == std::vector<std::size_t>({0, 1}));
    CHECK(a.pairs[0][2] == std::vector<std::size_t>({2, 3}));
    CHECK(a.pairs[1][2].empty());
    CHECK(a.single[0] == std::vector<std::size_t>({0, 1, 2, 3}));
}

TEST_CASE("import: data errors") {
    std::vector<std::vector<Document>> docs(2);
    docs[0] = {doc("e1", "en", {"cat"})};
    docs[1] = {doc("f1", "fr", {"chat"})};

    SUBCASE("unknown doc id") {
        std::vector<std::vector<std::string>> rows = {{"e1", "nope"}};
        CHECK_THROWS_AS(corpus::import_corpus({"en", "fr"}, docs, rows, {}, nullptr),
                        DataError);
    }
    SUBCASE("duplicate doc id within a language") {
        docs[0].push_back(doc("e1", "en", {"dog"}));
        std::vector<std::vector<std::string>> rows = {{"e1", "f1"}};
        CHECK_THROWS_AS(corpus::import_corpus({"en", "fr"}, docs, rows, {}, nullptr),
                        DataError);
    }
    SUBCASE("document language does not match its stream") {
        docs[1][0].lang = "de";
        std::vector<std::vector<std::string>> rows = {{"e1", "f1"}};
        CHECK_THROWS_AS(corpus::import_corpus({"en", "fr"}, docs, rows, {}, nullptr),
                        DataError);
    }
    SUBCASE("alignment row with the wrong cell count") {
        std::vector<std::vector<std::string>> rows = {{"e1", "f1", "x"}};
        CHECK_THROWS_AS(corpus::import_corpus({"en", "fr"}, docs, rows, {}, nullptr),
                        DataError);
    }
}

TEST_CASE("filter_stubs: distinct-term threshold") {
    std::vector<std::string> nineteen, twenty;
    for (int t = 0; t < 19; ++t) nineteen.push_back("w" + std::to_string(t));
    twenty = nineteen;
    twenty.push_back("w19");
    // repeats do not raise the distinct count
    auto repeated = nineteen;
    repeated.insert(repeated.end(), nineteen.begin(), nineteen.end());

    std::vector<Document> docs = {doc("a", "en", nineteen), doc("b", "en", twenty),
                                  doc("c", "en", repeated)};
    auto kept = corpus::filter_stubs(docs, 20);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].id == "b");

    CHECK(corpus::filter_stubs(docs, 0).size() == 3);
    CHECK(corpus::filter_stubs(docs, 19).size() == 3);
}

TEST_CASE("import: stub documents removed before alignment, cells go missing") {
    // 15 shared terms plus 10 unique ones keeps every document above the
    // stub threshold with informative document frequencies
    auto rich = [](std::string id, std::string lang) {
        std::vector<std::string> toks;
        for (int t = 0; t < 15; ++t) toks.push_back("w" + std::to_string(t));
        for (int t = 0; t < 10; ++t) toks.push_back(id + "_" + std::to_string(t));
        return doc(std::move(id), std::move(lang), std::move(toks));
    };
    std::vector<std::string> stub = {"w0", "w1"};

    std::vector<std::vector<Document>> docs(2);
    docs[0] = {rich("e1", "en"), rich("e2", "en"), rich("e3", "en")};
    docs[1] = {rich("f1", "fr"), rich("f2", "fr"), doc("f3", "fr", stub)};
    std::vector<std::vector<std::string>> rows = {
        {"e1", "f1"}, {"e2", "f2"}, {"e3", "f3"}};

    ImportParams p;
    p.min_distinct_terms = 20;
    ImportReport rep;
    auto c = corpus::import_corpus({"en", "fr"}, docs, rows, p, &rep);
    CHECK(rep.stub_docs_removed == 1);
    // the f3 cell became missing, leaving row 2 with a single document
    CHECK(rep.rows_dropped == 1);
    CHECK(c.s() == 2);
    CHECK(c.doc_ids[1] == std::vector<std::string>{"f1", "f2"});
}

TEST_CASE("import: cells vectorizing to zero are demoted to missing") {
    std::vector<std::vector<Document>> docs(2);
    docs[0] = {doc("e1", "en", {"cat", "dog"}), doc("e2", "en", {"cat", "owl"}),
               doc("e3", "en", {"dog", "owl"})};
    // f3's terms appear nowhere else; min_df=2 erases them from the vocabulary
    docs[1] = {doc("f1", "fr", {"chat", "chien"}), doc("f2", "fr", {"chat", "chien"}),
               doc("f3", "fr", {"unique"})};
    std::vector<std::vector<std::string>> rows = {
        {"e1", "f1"}, {"e2", "f2"}, {"e3", "f3"}};
    ImportParams p;
    p.min_df = 2;
    ImportReport rep;
    auto c = corpus::import_corpus({"en", "fr"}, docs, rows, p, &rep);
    CHECK(rep.cells_zero_vector == 1);
    CHECK(rep.rows_dropped == 1);  // row 2 fell below two nonempty cells
    CHECK(c.s() == 2);
    // surviving columns hold no all-zero present cells
    for (std::size_t i = 0; i < c.m(); ++i)
        for (std::size_t l = 0; l < c.s(); ++l)
            CHECK((c.present[i][l] == 1) ==
                  (c.X[i].col_end(l) > c.X[i].col_begin(l)));
}

TEST_CASE("import: vocabulary basis is the hub-aligned slice") {
    std::vector<std::vector<Document>> docs(3);
    docs[0] = {doc("e1", "en", {"sun", "moon"}), doc("e2", "en", {"sun", "sea"})};
    // f1/f3 are hub-aligned; f2/f4 only pair with de, so their new terms
    // ("pluie") never enter fr's vocabulary
    docs[1] = {doc("f1", "fr", {"soleil", "lune"}),
               doc("f3", "fr", {"soleil", "mer"}),
               doc("f2", "fr", {"lune", "pluie"}),
               doc("f4", "fr", {"mer", "pluie"})};
    docs[2] = {doc("g1", "de", {"regen", "sonne"}),
               doc("g2", "de", {"regen", "schnee"})};
    std::vector<std::vector<std::string>> rows = {{"e1", "f1", ""},
                                                  {"e2", "f3", ""},
                                                  {"", "f2", "g1"},
                                                  {"", "f4", "g2"}};
    auto c = corpus::import_corpus({"en", "fr", "de"}, docs, rows, {}, nullptr);
    CHECK(c.s() == 4);

    const auto &fr = c.vocabs[c.lang_index("fr")];
    CHECK(fr.n_docs == 2);
    CHECK(fr.term_to_index.count("soleil") == 1);
    CHECK(fr.term_to_index.count("lune") == 1);
    CHECK(fr.term_to_index.count("pluie") == 0);

    // de has no hub alignment at all -> falls back to every aligned de doc
    const auto &de = c.vocabs[c.lang_index("de")];
    CHECK(de.n_docs == 2);
    CHECK(de.term_to_index.count("regen") == 1);
    CHECK(de.term_to_index.count("schnee") == 1);
}

TEST_CASE("alignment_index: enumerated masks") {
    SUBCASE("full alignment") {
        auto c = corpus_from_mask({{true, true}, {true, true}, {true, true}});
        auto a = corpus::alignment_index(c);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                CHECK(a.pairs[i][j] == std::vector<std::size_t>({0, 1}));
    }
    SUBCASE("language entirely absent") {
        // mask rows are per-language; language 1 never present
        auto c = corpus_from_mask({{true, true}, {false, false}, {true, true}});
        auto a = corpus::alignment_index(c);
        CHECK(a.single[1].empty());
        CHECK(a.pairs[0][1].empty());
        CHECK(a.pairs[1][2].empty());
        CHECK(a.pairs[0][2] == std::vector<std::size_t>({0, 1}));
    }
    SUBCASE("two docs, three languages") {
        // doc 0 in langs {0,1}, doc 1 in langs {0,2}
        auto c = corpus_from_mask({{true, true}, {true, false}, {false, true}});
        auto a = corpus::alignment_index(c);
        CHECK(a.pairs[0][1] == std::vector<std::size_t>{0});
        CHECK(a.pairs[0][2] == std::vector<std::size_t>{1});
        CHECK(a.pairs[1][2].empty());
    }
}

TEST_CASE("alignment_index: matches brute-force set intersection on random masks") {
    numkit::Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2 + rng.uniform_index(3);
        const std::size_t s = 1 + rng.uniform_index(12);
        std::vector<std::vector<bool>> mask(m, std::vector<bool>(s, false));
        for (std::size_t l = 0; l < s; ++l) {
            // keep every column legal: at least two present languages
            std::size_t i1 = rng.uniform_index(m), i2 = rng.uniform_index(m - 1);
            if (i2 >= i1) ++i2;
            mask[i1][l] = mask[i2][l] = true;
            for (std::size_t i = 0; i < m; ++i)
                if (rng.uniform() < 0.4) mask[i][l] = true;
        }
        auto c = corpus_from_mask(mask);
        auto a = corpus::alignment_index(c);
        for (std::size_t i = 0; i < m; ++i) {
            std::set<std::size_t> si;
            for (std::size_t l = 0; l < s; ++l)
                if (mask[i][l]) si.insert(l);
            CHECK(std::vector<std::size_t>(si.begin(), si.end()) == a.single[i]);
            for (std::size_t j = 0; j < m; ++j) {
                std::set<std::size_t> sj;
                for (std::size_t l = 0; l < s; ++l)
                    if (mask[j][l]) sj.insert(l);
                std::vector<std::size_t> both;
                std::set_intersection(si.begin(), si.end(), sj.begin(), sj.end(),
                                      std::back_inserter(both));
                CHECK(both == a.pairs[i][j]);
                CHECK(a.pairs[i][j].size() == a.pairs[j][i].size());
            }
        }
    }
}

TEST_CASE("split: fraction zero keeps everything in train") {
    auto c = corpus_from_mask({{true, true, true}, {true, true, true}});
    TestSelector sel;
    sel.mode = TestSelector::Mode::fraction;
    sel.fraction = 0.0;
    auto sp = corpus::split_train_test(c, sel, 7);
    CHECK(sp.test.empty());
    CHECK(sp.test_columns.empty());
    check_corpus_equal(sp.train, c);
}

TEST_CASE("split: fixed seed reproduces the same split") {
    std::vector<std::vector<bool>> mask(3, std::vector<bool>(40, false));
    numkit::Rng rng(11);
    for (std::size_t l = 0; l < 40; ++l) {
        mask[0][l] = true;
        mask[1][l] = rng.uniform() < 0.7;
        mask[2][l] = rng.uniform() < 0.7;
        if (!mask[1][l] && !mask[2][l]) mask[1][l] = true;
    }
    auto c = corpus_from_mask(mask);
    TestSelector sel;
    sel.mode = TestSelector::Mode::fraction;
    sel.fraction = 0.5;

    auto sp1 = corpus::split_train_test(c, sel, 99);
    auto sp2 = corpus::split_train_test(c, sel, 99);
    CHECK(sp1.test_columns == sp2.test_columns);
    REQUIRE(sp1.test.size() == sp2.test.size());
    for (const auto &[key, list] : sp1.test) {
        const auto &other = sp2.test.at(key);
        REQUIRE(list.size() == other.size());
        for (std::size_t k = 0; k < list.size(); ++k) {
            CHECK(list[k].first.idx == other[k].first.idx);
            CHECK(list[k].first.val == other[k].first.val);
            CHECK(list[k].second.val == other[k].second.val);
        }
    }
    // a different seed moves different columns (overwhelmingly likely)
    auto sp3 = corpus::split_train_test(c, sel, 100);
    CHECK(sp1.test_columns != sp3.test_columns);

    // train and test partition the columns: no moved document id survives
    CHECK(sp1.train.s() + sp1.test_columns.size() == c.s());
    for (std::size_t l : sp1.test_columns)
        for (std::size_t i = 0; i < c.m(); ++i) {
            if (!c.present[i][l]) continue;
            for (std::size_t t = 0; t < sp1.train.s(); ++t)
                CHECK(sp1.train.doc_ids[i][t] != c.doc_ids[i][l]);
        }
}

TEST_CASE("split: test pairs carry the original column vectors") {
    auto c = corpus_from_mask(
        {{true, true, true, true}, {true, true, true, true}});
    TestSelector sel;
    sel.mode = TestSelector::Mode::fraction;
    sel.fraction = 0.5;
    auto sp = corpus::split_train_test(c, sel, 5);
    const auto &list = sp.test.at({0, 1});
    REQUIRE(list.size() == sp.test_columns.size());
    for (std::size_t k = 0; k < list.size(); ++k) {
        auto x = c.column(0, sp.test_columns[k]);
        auto y = c.column(1, sp.test_columns[k]);
        CHECK(list[k].first.idx == x.idx);
        CHECK(list[k].first.val == x.val);
        CHECK(list[k].second.idx == y.idx);
        CHECK(list[k].second.val == y.val);
    }
}

TEST_CASE("split: held-out pair mode empties that pair's training alignment") {
    // columns: {0,1} aligned, {0,2} aligned, {0,1,2} aligned, {0,1} aligned
    auto c = corpus_from_mask({{true, true, true, true},
                               {true, false, true, true},
                               {false, true, true, false}});
    TestSelector sel;
    sel.mode = TestSelector::Mode::pairs;
    sel.held_out_pairs = {{1, 2}};
    auto sp = corpus::split_train_test(c, sel, 3);

    // only column 2 had both languages 1 and 2
    CHECK(sp.test_columns == std::vector<std::size_t>{2});
    auto a = corpus::alignment_index(sp.train);
    CHECK(a.pairs[1][2].empty());
    CHECK(sp.train.s() == 3);
    REQUIRE(sp.test.count({1, 2}) == 1);
    CHECK(sp.test.at({1, 2}).size() == 1);

    SUBCASE("pair order is normalized") {
        TestSelector swapped;
        swapped.mode = TestSelector::Mode::pairs;
        swapped.held_out_pairs = {{2, 1}};
        auto sp2 = corpus::split_train_test(c, swapped, 3);
        CHECK(sp2.test_columns == sp.test_columns);
        CHECK(sp2.test.count({1, 2}) == 1);
    }
}

TEST_CASE("split: explicit id list moves the containing columns") {
    auto c = corpus_from_mask({{true, true, true}, {true, true, true}});
    TestSelector sel;
    sel.mode = TestSelector::Mode::ids;
    sel.ids = {"d1_1"};  // language 1's doc in column 1
    auto sp = corpus::split_train_test(c, sel, 0);
    CHECK(sp.test_columns == std::vector<std::size_t>{1});
    CHECK(sp.train.s() == 2);
    CHECK(sp.test.at({0, 1}).size() == 1);
}

TEST_CASE("split: emptying the training set is an error") {
    auto c = corpus_from_mask({{true, true}, {true, true}});
    TestSelector sel;
    sel.mode = TestSelector::Mode::fraction;
    sel.fraction = 1.0;
    CHECK_THROWS_AS(corpus::split_train_test(c, sel, 1), DataError);
}

TEST_CASE("io: alignment file round-trip") {
    io::AlignmentFile a;
    a.langs = {"en", "fr", "de"};
    a.rows = {{"e1", "f1", ""}, {"e2", "", "g2"}, {"", "f3", "g3"}};
    auto dir = temp_dir("align");
    io::save_alignment(a, dir + "/a.tsv");
    auto b = io::load_alignment(dir + "/a.tsv");
    CHECK(b.langs == a.langs);
    CHECK(b.rows == a.rows);

    SUBCASE("missing header is rejected") {
        io::write_file_atomic(dir + "/bad.tsv", "e1\tf1\n");
        CHECK_THROWS_AS(io::load_alignment(dir + "/bad.tsv"), FormatError);
    }
    SUBCASE("ragged row is rejected") {
        io::write_file_atomic(dir + "/ragged.tsv", "#langs:\ten\tfr\ne1\n");
        CHECK_THROWS_AS(io::load_alignment(dir + "/ragged.tsv"), FormatError);
    }
}

TEST_CASE("io: triplet matrix round-trip is bit-exact") {
    numkit::Rng rng(17);
    auto m = testutil::random_sparse(23, 9, 0.3, rng);
    auto dir = temp_dir("mat");
    io::save_triplet_matrix(m, dir + "/m.txt");
    auto n = io::load_triplet_matrix(dir + "/m.txt");
    REQUIRE(n.rows() == m.rows());
    REQUIRE(n.cols() == m.cols());
    auto tm = m.to_triplets();
    auto tn = n.to_triplets();
    REQUIRE(tm.size() == tn.size());
    for (std::size_t k = 0; k < tm.size(); ++k) {
        CHECK(tm[k].row == tn[k].row);
        CHECK(tm[k].col == tn[k].col);
        CHECK(tm[k].value == tn[k].value);
    }

    SUBCASE("truncated file is rejected") {
        io::write_file_atomic(dir + "/short.txt", "dims 3 3 2\n0\t0\t1.5\n");
        CHECK_THROWS_AS(io::load_triplet_matrix(dir + "/short.txt"), FormatError);
    }
    SUBCASE("awkward values survive") {
        auto w = numkit::CscMatrix::empty_cols(4);
        w.push_col({0, 3}, {0.1, 1.0 / 3.0});
        w.push_col({2}, {-1e-17});
        io::save_triplet_matrix(w, dir + "/w.txt");
        auto r = io::load_triplet_matrix(dir + "/w.txt");
        CHECK(r.value_at(0) == 0.1);
        CHECK(r.value_at(1) == 1.0 / 3.0);
        CHECK(r.value_at(2) == -1e-17);
    }
}

TEST_CASE("io: corpus container round-trip reproduces the corpus exactly") {
    std::vector<std::vector<Document>> docs(3);
    docs[0] = {doc("e1", "en", {"cat", "dog", "cat"}),
               doc("e2", "en", {"dog", "fish"}), doc("e3", "en", {"owl"})};
    docs[1] = {doc("f1", "fr", {"chat", "chien"}), doc("f2", "fr", {"chien", "mer"})};
    docs[2] = {doc("g1", "de", {"hund", "katze"}), doc("g3", "de", {"eule", "hund"})};
    std::vector<std::vector<std::string>> rows = {
        {"e1", "f1", "g1"}, {"e2", "f2", ""}, {"e3", "", "g3"}};
    auto c = corpus::import_corpus({"en", "fr", "de"}, docs, rows, {}, nullptr);

    auto dir = temp_dir("roundtrip");
    io::save_corpus(c, dir);
    auto d = io::load_corpus(dir);
    check_corpus_equal(c, d);

    // saving the reloaded corpus writes byte-identical files
    auto dir2 = temp_dir("roundtrip2");
    io::save_corpus(d, dir2);
    for (const auto &name :
         {"langs.txt", "presence.csv", "doc_ids.tsv", "vocab_en.tsv",
          "matrix_en.txt", "vocab_fr.tsv", "matrix_fr.txt", "vocab_de.tsv",
          "matrix_de.txt"}) {
        CHECK(io::read_file(dir + "/" + name) == io::read_file(dir2 + "/" + name));
    }
}

TEST_CASE("io: test-pair container round-trip") {
    auto c = corpus_from_mask({{true, true, true, true},
                               {true, true, false, true},
                               {true, false, true, true}});
    TestSelector sel;
    sel.mode = TestSelector::Mode::pairs;
    sel.held_out_pairs = {{0, 1}, {1, 2}};
    auto sp = corpus::split_train_test(c, sel, 2);

    io::TestPairsFile f;
    for (const auto &[key, list] : sp.test)
        f.entries.push_back(
            {c.langs[key.first], c.langs[key.second], list});
    auto dir = temp_dir("pairs");
    io::save_test_pairs(f, dir);
    auto g = io::load_test_pairs(dir);
    REQUIRE(g.entries.size() == f.entries.size());
    for (std::size_t e = 0; e < f.entries.size(); ++e) {
        CHECK(g.entries[e].lang_i == f.entries[e].lang_i);
        CHECK(g.entries[e].lang_j == f.entries[e].lang_j);
        REQUIRE(g.entries[e].pairs.size() == f.entries[e].pairs.size());
        for (std::size_t k = 0; k < f.entries[e].pairs.size(); ++k) {
            CHECK(g.entries[e].pairs[k].first.idx ==
                  f.entries[e].pairs[k].first.idx);
            CHECK(g.entries[e].pairs[k].first.val ==
                  f.entries[e].pairs[k].first.val);
            CHECK(g.entries[e].pairs[k].second.idx ==
                  f.entries[e].pairs[k].second.idx);
            CHECK(g.entries[e].pairs[k].second.val ==
                  f.entries[e].pairs[k].second.val);
        }
    }
}
