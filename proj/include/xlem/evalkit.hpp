#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "xlem/corpus.hpp"
#include "xlem/io.hpp"
#include "xlem/xmodels.hpp"

namespace xlem::evalkit {

// Mate ranks for one language pair: ranks[l] is the 1-based position of test
// pair l's true mate among all candidate targets.
struct RankList {
    std::string lang_i, lang_j;
    std::vector<std::size_t> ranks;
};

// Ranks every query's mate among the full target list by default-mode
// similarity; equal scores rank the lower candidate index first. Needs at
// least two pairs (a single candidate makes the score meaningless).
RankList mate_ranks(const models::ProjectionModel &m, std::size_t lang_i,
                    std::size_t lang_j, const corpus::TestPairList &pairs);

// (100/n) * sum((n - r)/(n - 1) - 0.5): 50 when every mate ranks first,
// -50 when every mate ranks last, 0 in expectation under random ranking.
double retrieval_score(const RankList &r);
// The same quantity doubled onto a [-100, 100] scale.
double retrieval_score_scaled(const RankList &r);

double mrr(const RankList &r);                  // mean reciprocal rank
double amrr(const std::vector<double> &mrrs);   // unweighted mean over pairs

struct EvalReport {
    struct Row {
        std::string lang_i, lang_j;
        std::size_t n = 0;
        double score_printed = 0.0;
        double score_scaled = 0.0;
        double mrr = 0.0;
    };
    std::vector<Row> rows;  // one per language pair, input order
    double amrr = 0.0;
};

// Scores every language pair of a saved test split against one model.
EvalReport evaluate_model(const models::ProjectionModel &m,
                          const io::TestPairsFile &pairs);

// pair / n / score_printed / score_scaled / mrr table, amrr summary row.
std::string report_tsv(const EvalReport &r);

}  // namespace xlem::evalkit
