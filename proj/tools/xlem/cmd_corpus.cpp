#include <cstdio>
#include <memory>

#include "xlem/corpus.hpp"
#include "xlem/error.hpp"
#include "xlem/io.hpp"

#include "cli.hpp"

namespace xlem::cli {

namespace {

struct VocabOpt {
    std::vector<std::string> docs;
    std::string lang;
    std::uint32_t min_df = 1;
    std::uint32_t top_drop = 0;
    std::string out;
};

void run_vocab(Ctx &ctx, const VocabOpt &o) {
    ctx.begin("vocab", o.out + ".run.meta");
    ctx.set("docs", join(o.docs));
    ctx.set("lang", o.lang);
    ctx.set("min-df", std::to_string(o.min_df));
    ctx.set("top-drop", std::to_string(o.top_drop));
    ctx.set("out", o.out);

    std::vector<textvec::Document> docs;
    for (const std::string &path : o.docs)
        for (textvec::Document &d : io::load_documents_jsonl(path))
            if (d.lang == o.lang) docs.push_back(std::move(d));
    if (docs.empty())
        throw DataError("no documents in language '" + o.lang + "'");

    textvec::Vocabulary v = textvec::build_vocabulary(docs, o.min_df, o.top_drop);
    ctx.claim(o.out);
    io::save_vocabulary(v, o.out);
    std::printf("vocab: %zu terms from %zu documents\n", v.size(), docs.size());
}

struct CorpusOpt {
    std::string alignment;
    std::vector<std::string> docs;
    std::uint32_t min_df = 1;
    std::uint32_t top_drop = 0;
    std::uint32_t min_distinct = 0;
    double test_fraction = 0.0;
    std::string test_out;
    std::string out;
};

void run_corpus(Ctx &ctx, const CorpusOpt &o) {
    ctx.begin("corpus", o.out + "/run.meta");
    ctx.set("alignment", o.alignment);
    ctx.set("docs", join(o.docs));
    ctx.set("min-df", std::to_string(o.min_df));
    ctx.set("top-drop", std::to_string(o.top_drop));
    ctx.set("min-distinct", std::to_string(o.min_distinct));
    ctx.set("test-fraction", io::format_double(o.test_fraction));
    ctx.set("test-out", o.test_out);
    ctx.set("out", o.out);
    if (o.test_fraction > 0.0 && o.test_out.empty())
        throw CLI::ValidationError(
            "corpus: --test-out is required when --test-fraction > 0");

    io::AlignmentFile af = io::load_alignment(o.alignment);
    std::map<std::string, std::size_t> lang_of;
    for (std::size_t i = 0; i < af.langs.size(); ++i) lang_of[af.langs[i]] = i;

    std::vector<std::vector<textvec::Document>> per(af.langs.size());
    for (const std::string &path : o.docs) {
        for (textvec::Document &d : io::load_documents_jsonl(path)) {
            auto it = lang_of.find(d.lang);
            if (it == lang_of.end())
                throw DataError(path + ": document language '" + d.lang +
                                "' is not in the alignment header");
            per[it->second].push_back(std::move(d));
        }
    }

    corpus::ImportParams ip{o.min_df, o.top_drop, o.min_distinct};
    corpus::ImportReport rep;
    corpus::ComparableCorpus c =
        corpus::import_corpus(af.langs, per, af.rows, ip, &rep);
    std::printf(
        "corpus: %zu languages, %zu aligned columns "
        "(%zu stubs removed, %zu rows dropped, %zu zero cells)\n",
        c.m(), c.s(), rep.stub_docs_removed, rep.rows_dropped,
        rep.cells_zero_vector);

    if (o.test_fraction > 0.0) {
        corpus::TestSelector sel;
        sel.mode = corpus::TestSelector::Mode::fraction;
        sel.fraction = o.test_fraction;
        corpus::SplitResult sr = corpus::split_train_test(c, sel, ctx.seed);
        io::TestPairsFile tp;
        for (const auto &[key, list] : sr.test)
            tp.entries.push_back(
                {c.langs[key.first], c.langs[key.second], list});
        ctx.claim(o.out);
        io::save_corpus(sr.train, o.out);
        ctx.claim(o.test_out);
        io::save_test_pairs(tp, o.test_out);
        std::printf("corpus: held out %zu columns into %s\n",
                    sr.test_columns.size(), o.test_out.c_str());
    } else {
        ctx.claim(o.out);
        io::save_corpus(c, o.out);
    }
}

}  // namespace

void register_corpus_cmds(CLI::App &app, Ctx &ctx) {
    {
        auto o = std::make_shared<VocabOpt>();
        CLI::App *c = app.add_subcommand(
            "vocab", "build a document-frequency vocabulary for one language");
        c->add_option("--docs", o->docs, "document JSONL files")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--lang", o->lang, "language to select")->required();
        c->add_option("--min-df", o->min_df, "minimum document frequency")
            ->capture_default_str();
        c->add_option("--top-drop", o->top_drop,
                      "drop this many most-frequent terms")
            ->capture_default_str();
        c->add_option("--out", o->out, "vocabulary TSV path")->required();
        c->callback([&ctx, o] { run_vocab(ctx, *o); });
    }
    {
        auto o = std::make_shared<CorpusOpt>();
        CLI::App *c = app.add_subcommand(
            "corpus", "import an aligned multilingual corpus");
        c->add_option("--alignment", o->alignment, "alignment TSV")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--docs", o->docs, "document JSONL files, all languages")
            ->required()
            ->check(CLI::ExistingFile);
        c->add_option("--min-df", o->min_df, "minimum document frequency")
            ->capture_default_str();
        c->add_option("--top-drop", o->top_drop,
                      "drop this many most-frequent terms per language")
            ->capture_default_str();
        c->add_option("--min-distinct", o->min_distinct,
                      "drop documents with fewer distinct terms")
            ->capture_default_str();
        c->add_option("--test-fraction", o->test_fraction,
                      "hold out this fraction of aligned columns")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        c->add_option("--test-out", o->test_out,
                      "directory for the held-out pair lists");
        c->add_option("--out", o->out, "corpus directory")->required();
        c->callback([&ctx, o] { run_corpus(ctx, *o); });
    }
}

}  // namespace xlem::cli
