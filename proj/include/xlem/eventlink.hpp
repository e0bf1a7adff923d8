#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xlem/textvec.hpp"

namespace xlem::eventlink {

// Incoming article: a vector in its language's TFIDF space plus whatever
// annotations the upstream pipeline supplies. Annotations are consumed
// as-is and aggregated per cluster; they are never derived here.
struct Article {
    std::string id;
    textvec::SparseVector vec;
    std::int64_t ts = 0;  // UTC epoch seconds
    std::map<std::string, double> entities;  // concept id -> weight
    std::map<std::string, double> keywords;
    std::optional<std::string> location;  // concept id
    std::set<std::string> dates;          // "YYYY-MM-DD" mentions
};

struct Cluster {
    std::uint64_t id = 0;
    std::string lang;
    std::vector<std::string> article_ids;  // ingest order, nonempty
    textvec::SparseVector centroid;        // unit-normalized mean of members
    std::int64_t oldest_ts = 0;
    double avg_ts = 0.0;                     // mean member timestamp, seconds
    std::map<std::string, double> entities;  // member weights summed
    std::map<std::string, double> keywords;
    std::optional<std::string> location;  // member majority, earliest-seen ties
    std::set<std::string> dates;          // union of member mentions

    std::size_t size() const { return article_ids.size(); }
};

struct StreamParams {
    double threshold = 0.4;   // centroid cosine needed to join a cluster
    double max_age_days = 4;  // strict age cutoff on the oldest member
    std::size_t promote_threshold = 3;  // members needed to count as an event
    // first cluster id handed out; give each language stream a disjoint
    // range so ids stay unique across the whole linking pipeline
    std::uint64_t id_base = 0;
};

struct Assignment {
    std::uint64_t cluster_id = 0;
    bool created = false;
    double similarity = 0.0;  // best centroid cosine; 0 with no live clusters
};

// Online single-language clustering: each article joins the most similar
// live centroid if that cosine reaches the threshold (ties -> the older
// cluster), otherwise opens a singleton. Centroids are maintained
// incrementally from a running member-vector sum, and an age-based expiry
// sweep runs after every ingest. Single writer; one instance per language;
// distinct languages may stream in parallel.
class ClusterStream {
  public:
    explicit ClusterStream(std::string lang, StreamParams p = {});

    // Throws DataError when the vector dimension disagrees with earlier
    // ingests into this stream. Clusters aged out by the post-ingest sweep
    // are parked until the next expire()/drain() call.
    Assignment ingest(const Article &a);

    // Sweeps with the given clock (must not precede the latest ingest) and
    // returns every cluster removed since the last collection, frozen for
    // downstream linking. A cluster is removed once its oldest member is
    // strictly more than max_age_days older than the clock.
    std::vector<Cluster> expire(std::int64_t now);

    // Removes and returns everything, parked and live (end of stream).
    std::vector<Cluster> drain();

    const std::string &lang() const { return lang_; }
    const StreamParams &params() const { return p_; }
    const std::vector<Cluster> &live() const { return live_; }
    std::int64_t latest_ts() const { return latest_; }

  private:
    void sweep(std::int64_t now);

    std::string lang_;
    StreamParams p_;
    std::vector<Cluster> live_;                // creation order
    std::vector<textvec::SparseVector> sums_;  // member-vector sums, parallel
    std::vector<Cluster> frozen_;              // aged out, awaiting collection
    // per live cluster, member location tallies for the majority vote
    std::map<std::uint64_t, std::map<std::string, std::size_t>> loc_counts_;
    std::uint64_t next_id_ = 0;
    std::int64_t latest_ = 0;
    std::size_t dim_ = 0;  // fixed by the first ingest
};

// Clusters large enough to be treated as events.
std::vector<Cluster> events_only(const std::vector<Cluster> &clusters,
                                 std::size_t promote_threshold);

// One cross-lingual nearest-neighbor link: a member article's neighbor slot
// in some other language, with its similarity score.
struct Link {
    std::string neighbor;  // target-language article id
    double sim = 0.0;
};

// links[article_id][target_lang] = that article's top-k neighbor list.
using LinkTable =
    std::map<std::string, std::map<std::string, std::vector<Link>>>;

// article id -> id of the cluster containing it. Throws DataError if an
// article appears in two clusters (ids must be globally unique).
std::map<std::string, std::uint64_t> membership_index(
    const std::vector<Cluster> &clusters);

// Candidate generation: walk every member article's neighbor lists and
// collect the clusters those neighbors belong to. Neighbors without a
// cluster are skipped and ci itself is excluded. Sorted ids; output is
// independent of member-article order.
std::vector<std::uint64_t> candidate_clusters(
    const Cluster &ci, const LinkTable &links,
    const std::map<std::string, std::uint64_t> &cluster_of);

// Pair description for link classification. link_count / avg_sim_score are
// directional (links go from ci members to cj members); the other seven
// features are symmetric in (ci, cj).
struct LinkFeatureVector {
    double link_count = 0;     // ci-member neighbor slots landing in cj
    double avg_sim_score = 0;  // mean similarity of those slots; 0 if none
    double entity_cos = 0;     // cosine of concept weight maps, in [0, 1]
    double keyword_cos = 0;
    double entity_jaccard = 0;  // Jaccard of concept id sets, in [0, 1]
    double keyword_jaccard = 0;
    double same_location = 0;    // 1 iff both set and equal
    double time_diff_hours = 0;  // |avg_ts difference| in hours
    double shared_dates = 0;     // Jaccard of date sets, 0 when both empty

    std::array<double, 9> to_array() const;
    static LinkFeatureVector from_array(const std::array<double, 9> &a);
};

// Throws DataError when the two clusters share a language.
LinkFeatureVector extract_features(const Cluster &ci, const Cluster &cj,
                                   const LinkTable &links);

struct TrainExample {
    LinkFeatureVector fv;
    int label = 0;  // 1 = same event, 0 = different
};

// Linear link classifier with its own input standardization, so prediction
// is self-contained: margin = w . (fv - mean) * inv_scale + bias.
struct LinearModel {
    std::array<double, 9> weights{};
    double bias = 0.0;
    std::array<double, 9> mean{};       // training-set feature means
    std::array<double, 9> inv_scale{};  // 1/stddev; 0 for constant features
    double C = 1.0;
    std::uint64_t seed = 0;
};

// Soft-margin linear SVM over standardized features, trained by dual
// coordinate descent with seeded epoch shuffles. The bias is a regularized
// constant-one feature, so the objective is strictly convex and has one
// optimum regardless of solver. Throws DataError unless both labels occur
// and there are at least two examples.
LinearModel train_linker(const std::vector<TrainExample> &examples, double C,
                         std::uint64_t seed);

// 0.5 (|w|^2 + bias^2) + C * sum of hinge losses, in standardized space.
// The quantity train_linker minimizes; exposed so independent optimizers
// can be compared on equal terms.
double primal_objective(const LinearModel &m,
                        const std::vector<TrainExample> &examples);

struct Prediction {
    bool link = false;  // margin >= 0
    double margin = 0.0;
};

Prediction predict_link(const LinearModel &m, const LinkFeatureVector &fv);
std::vector<Prediction> predict_links(
    const LinearModel &m, const std::vector<LinkFeatureVector> &fvs);

// Positive class = "same event"; precision/recall fall back to 0 when their
// denominator is empty.
struct Metrics {
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

struct CvResult {
    std::vector<Metrics> folds;
    Metrics mean;
    Metrics stddev;  // sample standard deviation across folds
};

// Stratified fold assignment: per-class seeded shuffle dealt round-robin,
// so class counts differ by at most one across folds.
std::vector<std::size_t> stratified_folds(const std::vector<int> &labels,
                                          std::size_t folds,
                                          std::uint64_t seed);

// Throws DataError when folds < 2 or there are fewer examples than folds.
CvResult kfold_cv(const std::vector<TrainExample> &examples, std::size_t folds,
                  std::uint64_t seed, double C = 1.0);

// Binary container (magic "XLNK", version, CRC-64 trailer), same discipline
// as the projection-model files.
void save_linker(const LinearModel &m, const std::string &path);
LinearModel load_linker(const std::string &path);

// JSON-lines cluster metadata interchange: id, lang, article_ids, entities,
// keywords, location (null when absent), avg_ts (rounded to seconds),
// oldest_ts, dates. Centroids live only inside the stream and are not
// serialized.
void save_clusters_jsonl(const std::vector<Cluster> &clusters,
                         const std::string &path);
std::vector<Cluster> load_clusters_jsonl(const std::string &path);

// TSV rows `cluster_a<TAB>cluster_b<TAB>label(0|1)`.
struct LabelledPair {
    std::uint64_t a = 0, b = 0;
    int label = 0;
};
void save_labelled_pairs(const std::vector<LabelledPair> &pairs,
                         const std::string &path);
std::vector<LabelledPair> load_labelled_pairs(const std::string &path);

}  // namespace xlem::eventlink
