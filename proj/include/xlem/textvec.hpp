#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace xlem::textvec {

struct Document {
    std::string id;
    std::string lang;
    std::vector<std::string> tokens;
    std::optional<std::int64_t> timestamp;  // UTC epoch seconds
};

// Sorted sparse vector; indices strictly increasing, values finite nonzero.
struct SparseVector {
    std::size_t dim = 0;
    std::vector<std::uint32_t> idx;
    std::vector<double> val;

    double norm() const;
    void scale(double f);
    // Scales to unit Euclidean norm; zero vectors are left alone.
    void normalize();
};

double dot(const SparseVector &a, const SparseVector &b);
double cosine(const SparseVector &a, const SparseVector &b);

struct Vocabulary {
    std::string lang;
    std::map<std::string, std::uint32_t> term_to_index;
    std::vector<std::uint32_t> df;  // indexed by term index
    std::uint64_t n_docs = 0;

    std::size_t size() const { return term_to_index.size(); }
};

// Document-frequency vocabulary: terms below min_df dropped, then the
// top_k_drop most frequent dropped (df ties resolved lexicographically,
// smaller term removed first); survivors indexed in lexicographic order.
Vocabulary build_vocabulary(const std::vector<Document> &docs,
                            std::uint32_t min_df, std::uint32_t top_k_drop);

// TFIDF with IDF from the (static) training vocabulary: entry = TF * ln(N/DF).
SparseVector vectorize(const Document &doc, const Vocabulary &vocab,
                       bool normalize);

// Document frequencies over a sliding time window: a document stays counted
// while it is within window_days * 86400 seconds of the newest timestamp
// seen (strictly older ones are evicted).
class SlidingIdfState {
  public:
    explicit SlidingIdfState(std::string lang, std::uint32_t window_days = 10)
        : lang_(std::move(lang)), window_days_(window_days) {}

    const std::string &lang() const { return lang_; }
    std::uint64_t n_docs() const { return ring_.size(); }
    std::uint32_t df(const std::string &term) const;

    // Requires doc.timestamp; distinct terms counted once per document.
    void ingest(const Document &doc);

  private:
    std::string lang_;
    std::uint32_t window_days_;
    std::int64_t newest_ = 0;
    std::deque<std::pair<std::int64_t, std::vector<std::string>>> ring_;
    std::map<std::string, std::uint32_t> df_;
};

// TFIDF with IDF taken from the sliding window (the document should have
// been ingested first so its own terms are counted).
SparseVector vectorize(const Document &doc, const Vocabulary &vocab,
                       const SlidingIdfState &idf, bool normalize);

// Convenience importer tokenization: ASCII lowercasing, split on any
// non-alphanumeric byte.
std::vector<std::string> tokenize_simple(const std::string &text);

}  // namespace xlem::textvec
