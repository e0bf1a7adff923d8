#include <algorithm>
#include <cstdio>
#include <memory>
#include <sstream>

#include "xlem/corpus.hpp"
#include "xlem/error.hpp"
#include "xlem/evalkit.hpp"
#include "xlem/io.hpp"
#include "xlem/xmodels.hpp"

#include "cli.hpp"

namespace xlem::cli {

namespace {

struct TrainOpt {
    std::string corpus;
    std::string method;
    std::uint32_t k_lsi = 100;
    std::uint32_t k_cca = 0;  // 0 = same as --k-lsi
    double kappa = 0.5;
    std::string hub;  // empty = first corpus language
    std::string out;
};

void run_train(Ctx &ctx, const TrainOpt &o) {
    ctx.begin("train", o.out + ".run.meta");
    corpus::ComparableCorpus c = io::load_corpus(o.corpus);
    const std::size_t k_cca = o.k_cca ? o.k_cca : o.k_lsi;
    const std::string hub = o.hub.empty() ? c.langs.at(0) : o.hub;
    ctx.set("corpus", o.corpus);
    ctx.set("method", o.method);
    ctx.set("k-lsi", std::to_string(o.k_lsi));
    ctx.set("k-cca", std::to_string(k_cca));
    ctx.set("kappa", io::format_double(o.kappa));
    ctx.set("hub", hub);
    ctx.set("out", o.out);

    models::ProjectionModel m;
    if (o.method == "kmeans") {
        m = models::train_kmeans_model(c, k_cca, ctx.seed);
    } else if (o.method == "lsi") {
        m = models::train_lsi_model(c, k_cca, ctx.seed);
    } else if (o.method == "cca") {
        m = models::train_cca_model(c, k_cca, o.kappa);
    } else {
        m = models::train_hubcca_model(c, c.lang_index(hub), o.k_lsi, k_cca,
                                       o.kappa, ctx.seed);
    }
    ctx.claim(o.out);
    models::save_model(m, o.out);

    std::printf("train: %s, common dimension %zu%s\n", o.method.c_str(),
                m.k_final(), m.degraded ? " (ridge fallback fired)" : "");
    for (const std::string &note : m.notes)
        std::printf("train: note: %s\n", note.c_str());
}

struct ProjectOpt {
    std::string model, corpus, lang, out;
};

void run_project(Ctx &ctx, const ProjectOpt &o) {
    ctx.begin("project", o.out + ".run.meta");
    ctx.set("model", o.model);
    ctx.set("corpus", o.corpus);
    ctx.set("lang", o.lang);
    ctx.set("out", o.out);

    models::ProjectionModel m = models::load_model(o.model);
    corpus::ComparableCorpus c = io::load_corpus(o.corpus);
    const std::size_t li = c.lang_index(o.lang);
    numkit::DenseMatrix Y =
        models::project_columns(m, m.index_of(o.lang), c.X[li]);

    std::ostringstream out;
    out << "#dims:\t" << Y.rows() << "\n";
    for (std::size_t j = 0; j < Y.cols(); ++j) {
        if (!c.present[li][j]) continue;  // no document in this cell
        out << c.doc_ids[li][j];
        for (std::size_t i = 0; i < Y.rows(); ++i)
            out << '\t' << io::format_double(Y(i, j));
        out << "\n";
    }
    ctx.claim(o.out);
    io::write_file_atomic(o.out, out.str());
    std::printf("project: %zu documents into %zu dimensions\n",
                static_cast<std::size_t>(
                    std::count(c.present[li].begin(), c.present[li].end(), 1)),
                Y.rows());
}

struct KnnOpt {
    std::string model;
    std::string corpus;
    std::string query_docs, query_vocab;
    std::string target_docs, target_vocab;
    std::string query_lang, target_lang;
    std::size_t k = 10;
    std::string out;
};

// Present corpus columns as a compact matrix plus their doc ids.
numkit::CscMatrix present_columns(const corpus::ComparableCorpus &c,
                                  std::size_t lang,
                                  std::vector<std::string> &ids) {
    std::vector<numkit::Triplet> trips;
    ids.clear();
    for (std::size_t j = 0; j < c.s(); ++j) {
        if (!c.present[lang][j]) continue;
        textvec::SparseVector v = c.column(lang, j);
        const auto col = static_cast<std::uint32_t>(ids.size());
        for (std::size_t t = 0; t < v.idx.size(); ++t)
            trips.push_back({v.idx[t], col, v.val[t]});
        ids.push_back(c.doc_ids[lang][j]);
    }
    return numkit::CscMatrix::from_triplets(c.X[lang].rows(), ids.size(),
                                            std::move(trips));
}

// TFIDF vectors of one language's documents against a fixed vocabulary.
numkit::CscMatrix vectorize_docs(const std::string &docs_path,
                                 const std::string &vocab_path,
                                 const std::string &lang,
                                 std::vector<std::string> &ids) {
    textvec::Vocabulary vocab = io::load_vocabulary(vocab_path, lang);
    std::vector<numkit::Triplet> trips;
    ids.clear();
    for (const StreamArticle &a : load_stream_jsonl(docs_path)) {
        if (a.doc.lang != lang) continue;
        textvec::SparseVector v = textvec::vectorize(a.doc, vocab, true);
        const auto col = static_cast<std::uint32_t>(ids.size());
        for (std::size_t t = 0; t < v.idx.size(); ++t)
            trips.push_back({v.idx[t], col, v.val[t]});
        ids.push_back(a.doc.id);
    }
    if (ids.empty())
        throw DataError(docs_path + ": no documents in language '" + lang + "'");
    return numkit::CscMatrix::from_triplets(vocab.size(), ids.size(),
                                            std::move(trips));
}

void run_knn(Ctx &ctx, const KnnOpt &o) {
    ctx.begin("knn", o.out + ".run.meta");
    const bool corpus_mode = !o.corpus.empty();
    const bool docs_mode = !o.query_docs.empty() || !o.target_docs.empty();
    if (corpus_mode == docs_mode)
        throw CLI::ValidationError(
            "knn: give either --corpus or --query-docs/--target-docs");
    if (docs_mode &&
        (o.query_docs.empty() || o.target_docs.empty() ||
         o.query_vocab.empty() || o.target_vocab.empty()))
        throw CLI::ValidationError(
            "knn: document mode needs --query-docs, --query-vocab, "
            "--target-docs and --target-vocab");
    ctx.set("model", o.model);
    ctx.set("corpus", o.corpus);
    ctx.set("query-docs", o.query_docs);
    ctx.set("query-vocab", o.query_vocab);
    ctx.set("target-docs", o.target_docs);
    ctx.set("target-vocab", o.target_vocab);
    ctx.set("query-lang", o.query_lang);
    ctx.set("target-lang", o.target_lang);
    ctx.set("k", std::to_string(o.k));
    ctx.set("out", o.out);

    models::ProjectionModel m = models::load_model(o.model);
    numkit::CscMatrix Q, T;
    std::vector<std::string> qids, tids;
    if (corpus_mode) {
        corpus::ComparableCorpus c = io::load_corpus(o.corpus);
        Q = present_columns(c, c.lang_index(o.query_lang), qids);
        T = present_columns(c, c.lang_index(o.target_lang), tids);
    } else {
        Q = vectorize_docs(o.query_docs, o.query_vocab, o.query_lang, qids);
        T = vectorize_docs(o.target_docs, o.target_vocab, o.target_lang, tids);
    }

    auto hits = models::knn_search(m, m.index_of(o.query_lang), Q,
                                   m.index_of(o.target_lang), T, o.k, ctx.block);

    std::ostringstream out;
    out << "#langs:\t" << o.query_lang << '\t' << o.target_lang << "\n";
    for (std::size_t q = 0; q < hits.size(); ++q)
        for (std::size_t r = 0; r < hits[q].size(); ++r)
            out << qids[q] << '\t' << r + 1 << '\t' << tids[hits[q][r].index]
                << '\t' << io::format_double(hits[q][r].score) << "\n";
    ctx.claim(o.out);
    io::write_file_atomic(o.out, out.str());
    std::printf("knn: %zu queries x %zu targets, top %zu\n", qids.size(),
                tids.size(), o.k);
}

struct EvalMateOpt {
    std::string model, pairs, out;
};

void run_eval_mate(Ctx &ctx, const EvalMateOpt &o) {
    ctx.begin("eval-mate", o.out + ".run.meta");
    ctx.set("model", o.model);
    ctx.set("pairs", o.pairs);
    ctx.set("out", o.out);

    models::ProjectionModel m = models::load_model(o.model);
    io::TestPairsFile tp = io::load_test_pairs(o.pairs);
    evalkit::EvalReport rep = evalkit::evaluate_model(m, tp);
    ctx.claim(o.out);
    io::write_file_atomic(o.out, evalkit::report_tsv(rep));
    std::printf("eval-mate: %zu language pairs, AMRR %s\n", rep.rows.size(),
                io::format_double(rep.amrr).c_str());
}

struct BenchOpt {
    std::size_t dim = 500;
    std::size_t queries = 2000;
    std::size_t targets = 20000;
    std::size_t reps = 5;
    std::size_t serial_targets = 2000;
    bool no_serial = false;
    std::string out;
};

void run_bench(Ctx &ctx, const BenchOpt &o) {
    ctx.begin("bench-sims", o.out + ".run.meta");
    ctx.set("dim", std::to_string(o.dim));
    ctx.set("queries", std::to_string(o.queries));
    ctx.set("targets", std::to_string(o.targets));
    ctx.set("reps", std::to_string(o.reps));
    ctx.set("serial-targets", std::to_string(o.serial_targets));
    ctx.set("no-serial", o.no_serial ? "true" : "false");
    ctx.set("out", o.out);

    // run.meta stays wall-clock free; timings only go into the report.
    std::ostringstream rep;
    rep << "mode\tsims\tseconds\tper_second\tchecksum\n";
    models::SimBench par = models::benchmark_similarities(
        o.dim, o.queries, o.targets, o.reps, ctx.block, ctx.seed, false);
    rep << "parallel\t" << par.sims << '\t' << io::format_double(par.seconds)
        << '\t' << io::format_double(par.per_second) << '\t'
        << io::format_double(par.checksum) << "\n";
    std::printf("bench-sims: parallel %.3e sims/s over %llu sims\n",
                par.per_second, static_cast<unsigned long long>(par.sims));
    if (!o.no_serial) {
        models::SimBench ser = models::benchmark_similarities(
            o.dim, o.queries, std::min(o.serial_targets, o.targets), 1,
            ctx.block, ctx.seed, true);
        rep << "serial\t" << ser.sims << '\t' << io::format_double(ser.seconds)
            << '\t' << io::format_double(ser.per_second) << '\t'
            << io::format_double(ser.checksum) << "\n";
        std::printf("bench-sims: serial   %.3e sims/s over %llu sims\n",
                    ser.per_second, static_cast<unsigned long long>(ser.sims));
    }
    ctx.claim(o.out);
    io::write_file_atomic(o.out, rep.str());
}

}  // namespace

void register_model_cmds(CLI::App &app, Ctx &ctx) {
    {
        auto o = std::make_shared<TrainOpt>();
        CLI::App *c = app.add_subcommand("train", "fit a projection model");
        c->add_option("--corpus", o->corpus, "corpus directory")->required();
        c->add_option("--method", o->method, "kmeans, lsi, cca or hubcca")
            ->required()
            ->check(CLI::IsMember({"kmeans", "lsi", "cca", "hubcca"}));
        c->add_option("--k-lsi", o->k_lsi, "first-stage dimension")
            ->capture_default_str();
        c->add_option("--k-cca", o->k_cca,
                      "common-space dimension (0 = same as --k-lsi)")
            ->capture_default_str();
        c->add_option("--kappa", o->kappa, "covariance shrinkage in [0, 1]")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        c->add_option("--hub", o->hub, "hub language (default: first)");
        c->add_option("--out", o->out, "model file")->required();
        c->callback([&ctx, o] { run_train(ctx, *o); });
    }
    {
        auto o = std::make_shared<ProjectOpt>();
        CLI::App *c = app.add_subcommand(
            "project", "project one language's documents into the common space");
        c->add_option("--model", o->model, "model file")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--corpus", o->corpus, "corpus directory")->required();
        c->add_option("--lang", o->lang, "language to project")->required();
        c->add_option("--out", o->out, "projection TSV")->required();
        c->callback([&ctx, o] { run_project(ctx, *o); });
    }
    {
        auto o = std::make_shared<KnnOpt>();
        CLI::App *c = app.add_subcommand(
            "knn", "cross-lingual nearest neighbors by projected cosine");
        c->add_option("--model", o->model, "model file")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--corpus", o->corpus,
                      "corpus directory (corpus mode)");
        c->add_option("--query-docs", o->query_docs,
                      "query JSONL (document mode)");
        c->add_option("--query-vocab", o->query_vocab,
                      "query vocabulary TSV (document mode)");
        c->add_option("--target-docs", o->target_docs,
                      "target JSONL (document mode)");
        c->add_option("--target-vocab", o->target_vocab,
                      "target vocabulary TSV (document mode)");
        c->add_option("--query-lang", o->query_lang, "query language")
            ->required();
        c->add_option("--target-lang", o->target_lang, "target language")
            ->required();
        c->add_option("--k", o->k, "neighbors per query")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--out", o->out, "neighbor TSV")->required();
        c->callback([&ctx, o] { run_knn(ctx, *o); });
    }
    {
        auto o = std::make_shared<EvalMateOpt>();
        CLI::App *c = app.add_subcommand(
            "eval-mate", "mate retrieval report over held-out pairs");
        c->add_option("--model", o->model, "model file")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--pairs", o->pairs, "held-out pairs directory")
            ->required();
        c->add_option("--out", o->out, "report TSV")->required();
        c->callback([&ctx, o] { run_eval_mate(ctx, *o); });
    }
    {
        auto o = std::make_shared<BenchOpt>();
        CLI::App *c = app.add_subcommand(
            "bench-sims", "projected-cosine similarity throughput");
        c->add_option("--dim", o->dim, "common-space dimension")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--queries", o->queries, "query vectors")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--targets", o->targets, "target vectors")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--reps", o->reps, "scoring passes")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        c->add_option("--serial-targets", o->serial_targets,
                      "targets for the serial baseline pass")
            ->capture_default_str();
        c->add_flag("--no-serial", o->no_serial,
                    "skip the serial baseline");
        c->add_option("--out", o->out, "report file")->required();
        c->callback([&ctx, o] { run_bench(ctx, *o); });
    }
}

}  // namespace xlem::cli
