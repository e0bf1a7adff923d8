#include <cstdio>
#include <exception>

#include "CLI11.hpp"
#include "xlem/error.hpp"

#include "cli.hpp"

// Pipeline driver. Everything substantive lives in the library; each
// subcommand here is plumbing: parse flags, call the module, write files
// through atomic replaces, and echo the effective configuration to a
// run.meta next to the primary output (<out>.run.meta for file outputs,
// <out>/run.meta for directory outputs).
//
// Exit codes: 0 success, 1 usage error, 2 data/format error. When a command
// fails, every output path it had claimed and that did not pre-exist is
// removed, so failed runs leave nothing half-written behind.
int main(int argc, char **argv) {
    CLI::App app{"cross-lingual document similarity and event linking"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key = value defaults, [subcommand] sections; flags win");

    xlem::cli::Ctx ctx;
    app.add_option("--seed", ctx.seed, "seed for every stochastic step")
        ->capture_default_str();
    app.add_option("--threads", ctx.threads, "worker threads (0 = OpenMP default)")
        ->capture_default_str();
    app.add_option("--block-size", ctx.block,
                   "column-block width for scoring kernels (0 = built-in)")
        ->capture_default_str();

    xlem::cli::register_corpus_cmds(app, ctx);
    xlem::cli::register_model_cmds(app, ctx);
    xlem::cli::register_event_cmds(app, ctx);
    xlem::cli::register_synth_cmd(app, ctx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int rc = app.exit(e);  // prints help or the usage error
        return rc == 0 ? 0 : 1;
    } catch (const xlem::DataError &e) {
        ctx.discard_outputs();
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        ctx.discard_outputs();
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    ctx.write_meta();
    return 0;
}
