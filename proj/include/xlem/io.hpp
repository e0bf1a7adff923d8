#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xlem/corpus.hpp"
#include "xlem/textvec.hpp"

namespace xlem::io {

// One JSON object per line: {"id": str, "lang": str, "tokens": [str],
// "timestamp": int (optional)}. Malformed lines raise DataError with the
// line number.
std::vector<textvec::Document> load_documents_jsonl(const std::string &path);

// TSV `term<TAB>index<TAB>df` preceded by a `#n_docs=<N>` header line.
void save_vocabulary(const textvec::Vocabulary &v, const std::string &path);
textvec::Vocabulary load_vocabulary(const std::string &path,
                                    const std::string &lang);

// FNV-1a 64-bit over the serialized vocabulary body; identifies the
// vocabulary a model was trained against.
std::uint64_t vocabulary_hash(const textvec::Vocabulary &v);

// Shortest decimal form that round-trips a double exactly (%.17g trimmed).
std::string format_double(double v);

// Writes through a temp file + rename so failed runs leave no partial
// output behind.
class AtomicFile {
  public:
    explicit AtomicFile(const std::string &path);
    ~AtomicFile();
    void write(const std::string &data);
    void commit();
    const std::string &temp_path() const { return tmp_; }

  private:
    std::string path_, tmp_;
    bool committed_ = false;
};

void write_file_atomic(const std::string &path, const std::string &content);
std::string read_file(const std::string &path);

// Alignment TSV: header `#langs:<TAB>l1<TAB>l2...`, then one row per
// multilingual document with m doc-id cells (empty cell = missing).
struct AlignmentFile {
    std::vector<std::string> langs;
    std::vector<std::vector<std::string>> rows;
};
AlignmentFile load_alignment(const std::string &path);
void save_alignment(const AlignmentFile &a, const std::string &path);

// Plain-text sparse matrix: header `dims <rows> <cols> <nnz>`, then
// `row<TAB>col<TAB>value` lines sorted by column then row.
void save_triplet_matrix(const numkit::CscMatrix &m, const std::string &path);
numkit::CscMatrix load_triplet_matrix(const std::string &path);

// Corpus container directory: langs.txt, vocab_<lang>.tsv,
// matrix_<lang>.txt, presence.csv, doc_ids.tsv.
void save_corpus(const corpus::ComparableCorpus &c, const std::string &dir);
corpus::ComparableCorpus load_corpus(const std::string &dir);

// Held-out pair lists: pairs.tsv (lang_i, lang_j, count) plus one x/y
// triplet matrix per pair, columns aligned by test-pair index.
struct TestPairsFile {
    struct Entry {
        std::string lang_i, lang_j;
        corpus::TestPairList pairs;
    };
    std::vector<Entry> entries;
};
void save_test_pairs(const TestPairsFile &t, const std::string &dir);
TestPairsFile load_test_pairs(const std::string &dir);

}  // namespace xlem::io
