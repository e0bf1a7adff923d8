#include <algorithm>
#include <utility>

#include "xlem/error.hpp"
#include "xlem/eventlink.hpp"

namespace xlem::eventlink {

using textvec::SparseVector;

namespace {

// acc += v over sorted sparse storage; exact zero sums are dropped.
void add_into(SparseVector &acc, const SparseVector &v) {
    SparseVector out;
    out.dim = acc.dim;
    out.idx.reserve(acc.idx.size() + v.idx.size());
    out.val.reserve(acc.idx.size() + v.idx.size());
    std::size_t a = 0, b = 0;
    while (a < acc.idx.size() || b < v.idx.size()) {
        std::uint32_t i;
        double x;
        if (b >= v.idx.size() || (a < acc.idx.size() && acc.idx[a] < v.idx[b])) {
            i = acc.idx[a];
            x = acc.val[a++];
        } else if (a >= acc.idx.size() || v.idx[b] < acc.idx[a]) {
            i = v.idx[b];
            x = v.val[b++];
        } else {
            i = acc.idx[a];
            x = acc.val[a++] + v.val[b++];
        }
        if (x != 0.0) {
            out.idx.push_back(i);
            out.val.push_back(x);
        }
    }
    acc = std::move(out);
}

SparseVector mean_normalized(const SparseVector &sum, std::size_t n) {
    SparseVector c = sum;
    c.scale(1.0 / static_cast<double>(n));
    c.normalize();
    return c;
}

}  // namespace

ClusterStream::ClusterStream(std::string lang, StreamParams p)
    : lang_(std::move(lang)), p_(p), next_id_(p.id_base) {}

Assignment ClusterStream::ingest(const Article &a) {
    if (dim_ == 0) dim_ = a.vec.dim;
    if (a.vec.dim != dim_)
        throw DataError("cluster stream " + lang_ + ": vector dimension " +
                        std::to_string(a.vec.dim) + " != " +
                        std::to_string(dim_));
    latest_ = std::max(latest_, a.ts);

    // best live centroid; scanning in creation order keeps ties on the
    // older cluster
    std::size_t best = live_.size();
    double best_sim = 0.0;
    for (std::size_t c = 0; c < live_.size(); ++c) {
        const double s = textvec::cosine(a.vec, live_[c].centroid);
        if (best == live_.size() || s > best_sim) {
            best = c;
            best_sim = s;
        }
    }

    Assignment out;
    if (best < live_.size() && best_sim >= p_.threshold) {
        Cluster &c = live_[best];
        c.article_ids.push_back(a.id);
        add_into(sums_[best], a.vec);
        c.centroid = mean_normalized(sums_[best], c.article_ids.size());
        c.oldest_ts = std::min(c.oldest_ts, a.ts);
        const auto n = static_cast<double>(c.article_ids.size());
        c.avg_ts += (static_cast<double>(a.ts) - c.avg_ts) / n;
        for (const auto &[id, w] : a.entities) c.entities[id] += w;
        for (const auto &[id, w] : a.keywords) c.keywords[id] += w;
        c.dates.insert(a.dates.begin(), a.dates.end());
        out = {c.id, false, best_sim};
    } else {
        Cluster c;
        c.id = next_id_++;
        c.lang = lang_;
        c.article_ids.push_back(a.id);
        c.centroid = a.vec;
        c.centroid.normalize();
        c.oldest_ts = a.ts;
        c.avg_ts = static_cast<double>(a.ts);
        c.entities = a.entities;
        c.keywords = a.keywords;
        c.dates = a.dates;
        out = {c.id, true, best_sim};
        live_.push_back(std::move(c));
        sums_.push_back(a.vec);
    }

    // cluster location: member majority, earliest seen winning ties
    if (a.location) {
        Cluster &c = out.created ? live_.back() : live_[best];
        auto &counts = loc_counts_[c.id];
        const std::size_t n = ++counts[*a.location];
        if (!c.location ||
            (*c.location != *a.location && n > counts[*c.location]))
            c.location = *a.location;
    }

    sweep(latest_);
    return out;
}

void ClusterStream::sweep(std::int64_t now) {
    const auto cutoff =
        now - static_cast<std::int64_t>(p_.max_age_days * 86400.0);
    std::size_t keep = 0;
    for (std::size_t c = 0; c < live_.size(); ++c) {
        if (live_[c].oldest_ts < cutoff) {
            loc_counts_.erase(live_[c].id);
            frozen_.push_back(std::move(live_[c]));
        } else {
            if (keep != c) {
                live_[keep] = std::move(live_[c]);
                sums_[keep] = std::move(sums_[c]);
            }
            ++keep;
        }
    }
    live_.resize(keep);
    sums_.resize(keep);
}

std::vector<Cluster> ClusterStream::expire(std::int64_t now) {
    sweep(now);
    std::vector<Cluster> out = std::move(frozen_);
    frozen_.clear();
    return out;
}

std::vector<Cluster> ClusterStream::drain() {
    std::vector<Cluster> out = std::move(frozen_);
    frozen_.clear();
    for (Cluster &c : live_) out.push_back(std::move(c));
    live_.clear();
    sums_.clear();
    loc_counts_.clear();
    return out;
}

std::vector<Cluster> events_only(const std::vector<Cluster> &clusters,
                                 std::size_t promote_threshold) {
    std::vector<Cluster> out;
    for (const Cluster &c : clusters)
        if (c.size() >= promote_threshold) out.push_back(c);
    return out;
}

}  // namespace xlem::eventlink
