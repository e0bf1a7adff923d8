#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "xlem/eventlink.hpp"
#include "xlem/textvec.hpp"

namespace xlem::cli {

// Per-invocation state shared by every subcommand: the global knobs, the
// effective-config echo that becomes run.meta, and the list of outputs to
// tear down when the command fails partway.
struct Ctx {
    std::uint64_t seed = 1;
    int threads = 0;        // 0 = OpenMP default
    std::size_t block = 0;  // 0 = kernel default

    std::string command;
    std::string meta_path;
    std::map<std::string, std::string> meta;
    // (path, existed before this run): only fresh paths are ever removed
    std::vector<std::pair<std::string, bool>> outputs;

    // Called first in every command body: applies the global knobs and
    // starts the effective-config record.
    void begin(const std::string &cmd, const std::string &meta_out);
    void set(const std::string &key, const std::string &value);
    void claim(const std::string &path);

    void write_meta() const;      // on success, after all outputs committed
    void discard_outputs() const; // on failure
};

std::string join(const std::vector<std::string> &v);

// Stream article record: the plain document fields plus the optional
// annotations the clustering stage aggregates. Unknown fields are ignored,
// so ground-truth columns can ride along in the same file.
struct StreamArticle {
    textvec::Document doc;
    std::map<std::string, double> entities;
    std::map<std::string, double> keywords;
    std::optional<std::string> location;
    std::set<std::string> dates;
};
std::vector<StreamArticle> load_stream_jsonl(const std::string &path);

// Neighbor-list TSV written by `knn`: a `#langs:` header naming the query
// and target language, then `query<TAB>rank<TAB>target<TAB>score` rows.
// Several files merge into one table, keyed by the target language.
eventlink::LinkTable load_link_table(const std::vector<std::string> &paths);

// Concatenates cluster JSONL files; returns the clusters plus an
// id -> position index and rejects duplicate cluster ids.
std::pair<std::vector<eventlink::Cluster>, std::map<std::uint64_t, std::size_t>>
load_all_clusters(const std::vector<std::string> &paths);

// Feature TSV written by `features` (`a  b  <9 features>  label` with a
// `#` header row); the label column is required here.
std::vector<eventlink::TrainExample> load_feature_examples(const std::string &path);

extern const char *const kFeatureNames[9];

double parse_double(const std::string &s, const std::string &where);
std::uint64_t parse_u64(const std::string &s, const std::string &where);
std::vector<std::string> split_tabs(const std::string &line);

void register_corpus_cmds(CLI::App &app, Ctx &ctx);
void register_model_cmds(CLI::App &app, Ctx &ctx);
void register_event_cmds(CLI::App &app, Ctx &ctx);
void register_synth_cmd(CLI::App &app, Ctx &ctx);

}  // namespace xlem::cli
