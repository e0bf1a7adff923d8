#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "xlem/error.hpp"
#include "xlem/eventlink.hpp"
#include "xlem/numkit/rng.hpp"

namespace xlem::eventlink {

using numkit::Rng;

namespace {

constexpr std::size_t kDim = 9;       // raw feature count
constexpr std::size_t kAug = kDim + 1;  // + constant-one bias feature

// standardized-and-augmented design matrix, row major
std::vector<double> build_design(const std::vector<TrainExample> &ex,
                                 const std::array<double, kDim> &mean,
                                 const std::array<double, kDim> &inv_scale) {
    std::vector<double> X(ex.size() * kAug);
    for (std::size_t i = 0; i < ex.size(); ++i) {
        const auto raw = ex[i].fv.to_array();
        for (std::size_t k = 0; k < kDim; ++k)
            X[i * kAug + k] = (raw[k] - mean[k]) * inv_scale[k];
        X[i * kAug + kDim] = 1.0;
    }
    return X;
}

}  // namespace

LinearModel train_linker(const std::vector<TrainExample> &examples, double C,
                         std::uint64_t seed) {
    const std::size_t n = examples.size();
    if (n < 2) throw DataError("linker training: need at least two examples");
    std::size_t pos = 0;
    for (const auto &e : examples) pos += e.label ? 1 : 0;
    if (pos == 0 || pos == n)
        throw DataError("linker training: both labels must be present");
    if (!(C > 0.0)) throw DataError("linker training: C must be positive");

    LinearModel m;
    m.C = C;
    m.seed = seed;

    // per-feature standardization; constant features pinned at 0
    for (std::size_t k = 0; k < kDim; ++k) {
        double s = 0.0;
        for (const auto &e : examples) s += e.fv.to_array()[k];
        m.mean[k] = s / static_cast<double>(n);
        double v = 0.0;
        for (const auto &e : examples) {
            const double d = e.fv.to_array()[k] - m.mean[k];
            v += d * d;
        }
        const double sd = std::sqrt(v / static_cast<double>(n));
        m.inv_scale[k] = sd > 0.0 ? 1.0 / sd : 0.0;
    }

    const std::vector<double> X = build_design(examples, m.mean, m.inv_scale);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = examples[i].label ? 1.0 : -1.0;
    std::vector<double> qdiag(n);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.0;
        for (std::size_t k = 0; k < kAug; ++k)
            q += X[i * kAug + k] * X[i * kAug + k];
        qdiag[i] = q;  // >= 1 thanks to the bias feature
    }

    // dual coordinate descent on
    //   max  sum(alpha) - 0.5 ||sum alpha_i y_i x_i||^2,  0 <= alpha <= C,
    // whose optimum is the unique minimizer of the primal objective with
    // the bias folded in as a regularized feature.
    std::vector<double> alpha(n, 0.0), w(kAug, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    const double tol = 1e-10;
    const int max_epochs = 200000;
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        rng.shuffle(order);
        double worst = 0.0;
        for (std::size_t i : order) {
            const double *x = &X[i * kAug];
            double g = 0.0;
            for (std::size_t k = 0; k < kAug; ++k) g += w[k] * x[k];
            g = y[i] * g - 1.0;
            double pg = g;  // projected gradient against the box
            if (alpha[i] <= 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] >= C)
                pg = std::max(g, 0.0);
            worst = std::max(worst, std::abs(pg));
            if (pg == 0.0) continue;
            const double prev = alpha[i];
            alpha[i] = std::min(C, std::max(0.0, prev - g / qdiag[i]));
            const double step = (alpha[i] - prev) * y[i];
            if (step != 0.0)
                for (std::size_t k = 0; k < kAug; ++k) w[k] += step * x[k];
        }
        if (worst < tol) break;
    }

    for (std::size_t k = 0; k < kDim; ++k) m.weights[k] = w[k];
    m.bias = w[kDim];
    return m;
}

double primal_objective(const LinearModel &m,
                        const std::vector<TrainExample> &examples) {
    double obj = 0.5 * m.bias * m.bias;
    for (std::size_t k = 0; k < kDim; ++k)
        obj += 0.5 * m.weights[k] * m.weights[k];
    for (const auto &e : examples) {
        const double y = e.label ? 1.0 : -1.0;
        const double hinge = 1.0 - y * predict_link(m, e.fv).margin;
        if (hinge > 0.0) obj += m.C * hinge;
    }
    return obj;
}

Prediction predict_link(const LinearModel &m, const LinkFeatureVector &fv) {
    const auto raw = fv.to_array();
    double margin = m.bias;
    for (std::size_t k = 0; k < kDim; ++k)
        margin += m.weights[k] * (raw[k] - m.mean[k]) * m.inv_scale[k];
    return {margin >= 0.0, margin};
}

std::vector<Prediction> predict_links(
    const LinearModel &m, const std::vector<LinkFeatureVector> &fvs) {
    std::vector<Prediction> out;
    out.reserve(fvs.size());
    for (const auto &fv : fvs) out.push_back(predict_link(m, fv));
    return out;
}

std::vector<std::size_t> stratified_folds(const std::vector<int> &labels,
                                          std::size_t folds,
                                          std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] ? pos : neg).push_back(i);
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::size_t> fold(labels.size(), 0);
    for (std::size_t k = 0; k < pos.size(); ++k) fold[pos[k]] = k % folds;
    // continue dealing where the positives stopped so fold sizes stay even
    for (std::size_t k = 0; k < neg.size(); ++k)
        fold[neg[k]] = (pos.size() + k) % folds;
    return fold;
}

namespace {

Metrics fold_metrics(const std::vector<int> &truth,
                     const std::vector<int> &pred) {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (pred[i] && truth[i]) ++tp;
        else if (pred[i] && !truth[i]) ++fp;
        else if (!pred[i] && truth[i]) ++fn;
        else ++tn;
    }
    Metrics m;
    const auto total = static_cast<double>(truth.size());
    m.accuracy = static_cast<double>(tp + tn) / total;
    m.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall > 0.0)
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

}  // namespace

CvResult kfold_cv(const std::vector<TrainExample> &examples, std::size_t folds,
                  std::uint64_t seed, double C) {
    if (folds < 2) throw DataError("cross validation: need at least 2 folds");
    if (examples.size() < folds)
        throw DataError("cross validation: fewer examples than folds");
    std::vector<int> labels;
    for (const auto &e : examples) labels.push_back(e.label);
    const auto fold = stratified_folds(labels, folds, seed);

    CvResult res;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<TrainExample> train;
        std::vector<int> truth, pred;
        for (std::size_t i = 0; i < examples.size(); ++i)
            if (fold[i] != f) train.push_back(examples[i]);
        const LinearModel m = train_linker(train, C, seed + f);
        for (std::size_t i = 0; i < examples.size(); ++i) {
            if (fold[i] != f) continue;
            truth.push_back(examples[i].label);
            pred.push_back(predict_link(m, examples[i].fv).link ? 1 : 0);
        }
        res.folds.push_back(fold_metrics(truth, pred));
    }

    const auto nf = static_cast<double>(folds);
    auto fields = [](Metrics &m) {
        return std::array<double *, 4>{&m.accuracy, &m.precision, &m.recall,
                                       &m.f1};
    };
    for (Metrics &fm : res.folds) {
        auto src = fields(fm), dst = fields(res.mean);
        for (std::size_t k = 0; k < 4; ++k) *dst[k] += *src[k] / nf;
    }
    for (Metrics &fm : res.folds) {
        auto src = fields(fm), mu = fields(res.mean), dst = fields(res.stddev);
        for (std::size_t k = 0; k < 4; ++k) {
            const double d = *src[k] - *mu[k];
            *dst[k] += d * d / (nf - 1.0);
        }
    }
    auto sd = fields(res.stddev);
    for (std::size_t k = 0; k < 4; ++k) *sd[k] = std::sqrt(*sd[k]);
    return res;
}

}  // namespace xlem::eventlink
