#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "xlem/error.hpp"
#include "xlem/eventlink.hpp"
#include "xlem/io.hpp"
#include "xlem/textvec.hpp"

#include "cli.hpp"

namespace xlem::cli {

namespace {

struct StreamOpt {
    std::string docs, lang, vocab;
    double threshold = 0.4;
    double max_age_days = 4.0;
    std::size_t promote = 3;
    std::uint32_t window_days = 10;
    std::uint64_t id_base = 0;
    bool events = false;
    std::string out;
};

void run_cluster_stream(Ctx &ctx, const StreamOpt &o) {
    ctx.begin("cluster-stream", o.out + ".run.meta");
    ctx.set("docs", o.docs);
    ctx.set("lang", o.lang);
    ctx.set("vocab", o.vocab);
    ctx.set("threshold", io::format_double(o.threshold));
    ctx.set("max-age-days", io::format_double(o.max_age_days));
    ctx.set("promote-threshold", std::to_string(o.promote));
    ctx.set("window-days", std::to_string(o.window_days));
    ctx.set("id-base", std::to_string(o.id_base));
    ctx.set("events-only", o.events ? "true" : "false");
    ctx.set("out", o.out);

    textvec::Vocabulary vocab = io::load_vocabulary(o.vocab, o.lang);
    std::vector<StreamArticle> arts = load_stream_jsonl(o.docs);

    textvec::SlidingIdfState idf(o.lang, o.window_days);
    eventlink::StreamParams sp;
    sp.threshold = o.threshold;
    sp.max_age_days = o.max_age_days;
    sp.promote_threshold = o.promote;
    sp.id_base = o.id_base;
    eventlink::ClusterStream stream(o.lang, sp);

    std::size_t ingested = 0;
    for (StreamArticle &sa : arts) {
        if (sa.doc.lang != o.lang) continue;
        if (!sa.doc.timestamp)
            throw DataError(o.docs + ": stream document '" + sa.doc.id +
                            "' has no timestamp");
        idf.ingest(sa.doc);
        eventlink::Article a;
        a.id = sa.doc.id;
        a.vec = textvec::vectorize(sa.doc, vocab, idf, true);
        a.ts = *sa.doc.timestamp;
        a.entities = std::move(sa.entities);
        a.keywords = std::move(sa.keywords);
        a.location = std::move(sa.location);
        a.dates = std::move(sa.dates);
        stream.ingest(a);
        ++ingested;
    }
    if (ingested == 0)
        throw DataError(o.docs + ": no documents in language '" + o.lang + "'");

    std::vector<eventlink::Cluster> clusters = stream.drain();
    if (o.events) clusters = eventlink::events_only(clusters, o.promote);
    std::sort(clusters.begin(), clusters.end(),
              [](const auto &a, const auto &b) { return a.id < b.id; });
    ctx.claim(o.out);
    eventlink::save_clusters_jsonl(clusters, o.out);
    std::printf("cluster-stream: %zu articles into %zu clusters\n", ingested,
                clusters.size());
}

struct CandidatesOpt {
    std::vector<std::string> clusters, links;
    std::string out;
};

void run_candidates(Ctx &ctx, const CandidatesOpt &o) {
    ctx.begin("candidates", o.out + ".run.meta");
    ctx.set("clusters", join(o.clusters));
    ctx.set("links", join(o.links));
    ctx.set("out", o.out);

    auto [all, by_id] = load_all_clusters(o.clusters);
    auto cluster_of = eventlink::membership_index(all);
    eventlink::LinkTable table = load_link_table(o.links);

    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return all[a].id < all[b].id;
    });

    std::ostringstream out;
    out << "#cluster\tcandidate\n";
    std::size_t pairs = 0;
    for (std::size_t i : order) {
        for (std::uint64_t cand :
             eventlink::candidate_clusters(all[i], table, cluster_of)) {
            out << all[i].id << '\t' << cand << "\n";
            ++pairs;
        }
    }
    ctx.claim(o.out);
    io::write_file_atomic(o.out, out.str());
    std::printf("candidates: %zu pairs over %zu clusters\n", pairs, all.size());
}

struct LabelOpt {
    std::string candidates, truth;
    std::vector<std::string> clusters;
    std::string out;
};

// Majority planted event among a cluster's members; ties go to the smaller
// event id so the vote is deterministic.
std::uint64_t majority_event(const eventlink::Cluster &c,
                             const std::map<std::string, std::uint64_t> &truth) {
    std::map<std::uint64_t, std::size_t> votes;
    for (const std::string &id : c.article_ids) {
        auto it = truth.find(id);
        if (it == truth.end())
            throw DataError("article '" + id + "' is missing from the truth file");
        ++votes[it->second];
    }
    std::uint64_t best = 0;
    std::size_t n = 0;
    for (const auto &[event, count] : votes) {
        if (count > n) {
            best = event;
            n = count;
        }
    }
    return best;
}

void run_label_pairs(Ctx &ctx, const LabelOpt &o) {
    ctx.begin("label-pairs", o.out + ".run.meta");
    ctx.set("candidates", o.candidates);
    ctx.set("truth", o.truth);
    ctx.set("clusters", join(o.clusters));
    ctx.set("out", o.out);

    std::map<std::string, std::uint64_t> truth;
    {
        std::ifstream in(o.truth);
        if (!in) throw DataError("cannot open truth file: " + o.truth);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const std::string where = o.truth + ":" + std::to_string(lineno);
            auto cells = split_tabs(line);
            if (cells.size() != 2)
                throw DataError(where + ": expected article and event id");
            truth[cells[0]] = parse_u64(cells[1], where);
        }
    }

    auto [all, by_id] = load_all_clusters(o.clusters);
    std::map<std::uint64_t, std::uint64_t> event_of;
    for (const eventlink::Cluster &c : all)
        event_of[c.id] = majority_event(c, truth);

    std::vector<eventlink::LabelledPair> pairs;
    std::size_t positive = 0;
    {
        std::ifstream in(o.candidates);
        if (!in) throw DataError("cannot open candidate file: " + o.candidates);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            const std::string where = o.candidates + ":" + std::to_string(lineno);
            auto cells = split_tabs(line);
            if (cells.size() != 2)
                throw DataError(where + ": expected two cluster ids");
            eventlink::LabelledPair p;
            p.a = parse_u64(cells[0], where);
            p.b = parse_u64(cells[1], where);
            auto ea = event_of.find(p.a), eb = event_of.find(p.b);
            if (ea == event_of.end() || eb == event_of.end())
                throw DataError(where + ": candidate names an unknown cluster");
            p.label = ea->second == eb->second ? 1 : 0;
            positive += p.label;
            pairs.push_back(p);
        }
    }
    ctx.claim(o.out);
    eventlink::save_labelled_pairs(pairs, o.out);
    std::printf("label-pairs: %zu pairs, %zu positive\n", pairs.size(), positive);
}

struct FeaturesOpt {
    std::vector<std::string> clusters, links;
    std::string pairs, out;
};

void run_features(Ctx &ctx, const FeaturesOpt &o) {
    ctx.begin("features", o.out + ".run.meta");
    ctx.set("clusters", join(o.clusters));
    ctx.set("links", join(o.links));
    ctx.set("pairs", o.pairs);
    ctx.set("out", o.out);

    auto [all, by_id] = load_all_clusters(o.clusters);
    eventlink::LinkTable table = load_link_table(o.links);
    std::vector<eventlink::LabelledPair> pairs =
        eventlink::load_labelled_pairs(o.pairs);

    std::ostringstream out;
    out << "#a\tb";
    for (const char *name : kFeatureNames) out << '\t' << name;
    out << "\tlabel\n";
    for (const eventlink::LabelledPair &p : pairs) {
        auto ia = by_id.find(p.a), ib = by_id.find(p.b);
        if (ia == by_id.end() || ib == by_id.end())
            throw DataError(o.pairs + ": pair names an unknown cluster id");
        eventlink::LinkFeatureVector fv =
            eventlink::extract_features(all[ia->second], all[ib->second], table);
        out << p.a << '\t' << p.b;
        for (double v : fv.to_array()) out << '\t' << io::format_double(v);
        out << '\t' << p.label << "\n";
    }
    ctx.claim(o.out);
    io::write_file_atomic(o.out, out.str());
    std::printf("features: %zu pairs\n", pairs.size());
}

struct TrainLinkerOpt {
    std::string features;
    double C = 1.0;
    std::string out;
};

void run_train_linker(Ctx &ctx, const TrainLinkerOpt &o) {
    ctx.begin("train-linker", o.out + ".run.meta");
    ctx.set("features", o.features);
    ctx.set("C", io::format_double(o.C));
    ctx.set("out", o.out);

    std::vector<eventlink::TrainExample> ex = load_feature_examples(o.features);
    eventlink::LinearModel m = eventlink::train_linker(ex, o.C, ctx.seed);
    ctx.claim(o.out);
    eventlink::save_linker(m, o.out);
    std::printf("train-linker: %zu examples, primal objective %s\n", ex.size(),
                io::format_double(eventlink::primal_objective(m, ex)).c_str());
}

struct EvalLinkerOpt {
    std::string features;
    std::size_t folds = 10;
    double C = 1.0;
    std::string out;
};

void append_metrics(std::ostringstream &out, const eventlink::Metrics &m) {
    out << '\t' << io::format_double(m.accuracy) << '\t'
        << io::format_double(m.precision) << '\t'
        << io::format_double(m.recall) << '\t' << io::format_double(m.f1)
        << "\n";
}

void run_eval_linker(Ctx &ctx, const EvalLinkerOpt &o) {
    ctx.begin("eval-linker", o.out + ".run.meta");
    ctx.set("features", o.features);
    ctx.set("folds", std::to_string(o.folds));
    ctx.set("C", io::format_double(o.C));
    ctx.set("out", o.out);

    std::vector<eventlink::TrainExample> ex = load_feature_examples(o.features);
    eventlink::CvResult cv = eventlink::kfold_cv(ex, o.folds, ctx.seed, o.C);

    std::ostringstream out;
    out << "fold\taccuracy\tprecision\trecall\tf1\n";
    for (std::size_t f = 0; f < cv.folds.size(); ++f) {
        out << f + 1;
        append_metrics(out, cv.folds[f]);
    }
    out << "mean";
    append_metrics(out, cv.mean);
    out << "stddev";
    append_metrics(out, cv.stddev);
    ctx.claim(o.out);
    io::write_file_atomic(o.out, out.str());
    std::printf("eval-linker: %zu folds, mean accuracy %s\n", cv.folds.size(),
                io::format_double(cv.mean.accuracy).c_str());
}

}  // namespace

void register_event_cmds(CLI::App &app, Ctx &ctx) {
    {
        auto o = std::make_shared<StreamOpt>();
        CLI::App *c = app.add_subcommand(
            "cluster-stream", "online clustering of one language's stream");
        c->add_option("--docs", o->docs, "timestamped article JSONL")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--lang", o->lang, "stream language")->required();
        c->add_option("--vocab", o->vocab, "vocabulary TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--threshold", o->threshold,
                      "centroid cosine needed to join a cluster")
            ->capture_default_str();
        c->add_option("--max-age-days", o->max_age_days,
                      "expire clusters whose oldest member is older")
            ->capture_default_str();
        c->add_option("--promote-threshold", o->promote,
                      "members needed to count as an event")
            ->capture_default_str();
        c->add_option("--window-days", o->window_days,
                      "sliding document-frequency window")
            ->capture_default_str();
        c->add_option("--id-base", o->id_base,
                      "first cluster id (keep languages disjoint)")
            ->capture_default_str();
        c->add_flag("--events-only", o->events,
                    "write only clusters at the promotion size");
        c->add_option("--out", o->out, "clusters JSONL")->required();
        c->callback([&ctx, o] { run_cluster_stream(ctx, *o); });
    }
    {
        auto o = std::make_shared<CandidatesOpt>();
        CLI::App *c = app.add_subcommand(
            "candidates", "candidate cluster pairs from neighbor links");
        c->add_option("--clusters", o->clusters, "cluster JSONL files")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--links", o->links, "neighbor TSV files from knn")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--out", o->out, "candidate TSV")->required();
        c->callback([&ctx, o] { run_candidates(ctx, *o); });
    }
    {
        auto o = std::make_shared<LabelOpt>();
        CLI::App *c = app.add_subcommand(
            "label-pairs",
            "label candidate pairs against a planted-event truth file");
        c->add_option("--candidates", o->candidates, "candidate TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--truth", o->truth, "article<TAB>event TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--clusters", o->clusters, "cluster JSONL files")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--out", o->out, "labelled pairs TSV")->required();
        c->callback([&ctx, o] { run_label_pairs(ctx, *o); });
    }
    {
        auto o = std::make_shared<FeaturesOpt>();
        CLI::App *c = app.add_subcommand(
            "features", "link features for labelled cluster pairs");
        c->add_option("--clusters", o->clusters, "cluster JSONL files")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--links", o->links, "neighbor TSV files from knn")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--pairs", o->pairs, "labelled pairs TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--out", o->out, "feature TSV")->required();
        c->callback([&ctx, o] { run_features(ctx, *o); });
    }
    {
        auto o = std::make_shared<TrainLinkerOpt>();
        CLI::App *c = app.add_subcommand(
            "train-linker", "fit the link classifier on a feature TSV");
        c->add_option("--features", o->features, "feature TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--C", o->C, "soft-margin penalty")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--out", o->out, "linker model file")->required();
        c->callback([&ctx, o] { run_train_linker(ctx, *o); });
    }
    {
        auto o = std::make_shared<EvalLinkerOpt>();
        CLI::App *c = app.add_subcommand(
            "eval-linker", "k-fold cross validation of the link classifier");
        c->add_option("--features", o->features, "feature TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--folds", o->folds, "cross-validation folds")
            ->capture_default_str();
        c->add_option("--C", o->C, "soft-margin penalty")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--out", o->out, "fold metrics TSV")->required();
        c->callback([&ctx, o] { run_eval_linker(ctx, *o); });
    }
}

}  // namespace xlem::cli
