#include <algorithm>
#include <cmath>
#include <set>

#include "xlem/error.hpp"
#include "xlem/eventlink.hpp"

namespace xlem::eventlink {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// cosine over concept weight maps joined by id; empty/zero maps score 0
double map_cosine(const std::map<std::string, double> &a,
                  const std::map<std::string, double> &b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto &[id, w] : a) {
        na += w * w;
        auto it = b.find(id);
        if (it != b.end()) dot += w * it->second;
    }
    for (const auto &[id, w] : b) nb += w * w;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return clamp01(dot / std::sqrt(na * nb));
}

double map_jaccard(const std::map<std::string, double> &a,
                   const std::map<std::string, double> &b) {
    std::size_t both = 0;
    for (const auto &[id, w] : a) both += b.count(id);
    const std::size_t either = a.size() + b.size() - both;
    if (either == 0) return 0.0;
    return static_cast<double>(both) / static_cast<double>(either);
}

double set_jaccard(const std::set<std::string> &a,
                   const std::set<std::string> &b) {
    std::size_t both = 0;
    for (const auto &x : a) both += b.count(x);
    const std::size_t either = a.size() + b.size() - both;
    if (either == 0) return 0.0;
    return static_cast<double>(both) / static_cast<double>(either);
}

}  // namespace

std::map<std::string, std::uint64_t> membership_index(
    const std::vector<Cluster> &clusters) {
    std::map<std::string, std::uint64_t> out;
    for (const Cluster &c : clusters)
        for (const std::string &id : c.article_ids)
            if (!out.emplace(id, c.id).second)
                throw DataError("membership index: article " + id +
                                " appears in two clusters");
    return out;
}

std::vector<std::uint64_t> candidate_clusters(
    const Cluster &ci, const LinkTable &links,
    const std::map<std::string, std::uint64_t> &cluster_of) {
    std::set<std::uint64_t> cands;
    for (const std::string &a : ci.article_ids) {
        auto per_lang = links.find(a);
        if (per_lang == links.end()) continue;
        for (const auto &[lang, list] : per_lang->second) {
            for (const Link &l : list) {
                auto hit = cluster_of.find(l.neighbor);
                if (hit == cluster_of.end()) continue;  // no live cluster
                if (hit->second != ci.id) cands.insert(hit->second);
            }
        }
    }
    return {cands.begin(), cands.end()};
}

std::array<double, 9> LinkFeatureVector::to_array() const {
    return {link_count,     avg_sim_score,  entity_cos,
            keyword_cos,    entity_jaccard, keyword_jaccard,
            same_location,  time_diff_hours, shared_dates};
}

LinkFeatureVector LinkFeatureVector::from_array(
    const std::array<double, 9> &a) {
    LinkFeatureVector fv;
    fv.link_count = a[0];
    fv.avg_sim_score = a[1];
    fv.entity_cos = a[2];
    fv.keyword_cos = a[3];
    fv.entity_jaccard = a[4];
    fv.keyword_jaccard = a[5];
    fv.same_location = a[6];
    fv.time_diff_hours = a[7];
    fv.shared_dates = a[8];
    return fv;
}

LinkFeatureVector extract_features(const Cluster &ci, const Cluster &cj,
                                   const LinkTable &links) {
    if (ci.lang == cj.lang)
        throw DataError("link features: clusters share language " + ci.lang);

    LinkFeatureVector fv;

    // directed link events: every neighbor slot of a ci member that lands
    // on a cj member counts once
    const std::set<std::string> members(cj.article_ids.begin(),
                                        cj.article_ids.end());
    double sim_sum = 0.0;
    std::size_t hits = 0;
    for (const std::string &a : ci.article_ids) {
        auto per_lang = links.find(a);
        if (per_lang == links.end()) continue;
        auto list = per_lang->second.find(cj.lang);
        if (list == per_lang->second.end()) continue;
        for (const Link &l : list->second) {
            if (members.count(l.neighbor)) {
                ++hits;
                sim_sum += l.sim;
            }
        }
    }
    fv.link_count = static_cast<double>(hits);
    fv.avg_sim_score = hits ? sim_sum / static_cast<double>(hits) : 0.0;

    fv.entity_cos = map_cosine(ci.entities, cj.entities);
    fv.keyword_cos = map_cosine(ci.keywords, cj.keywords);
    fv.entity_jaccard = map_jaccard(ci.entities, cj.entities);
    fv.keyword_jaccard = map_jaccard(ci.keywords, cj.keywords);

    fv.same_location =
        (ci.location && cj.location && *ci.location == *cj.location) ? 1.0
                                                                     : 0.0;
    fv.time_diff_hours = std::abs(ci.avg_ts - cj.avg_ts) / 3600.0;
    fv.shared_dates = set_jaccard(ci.dates, cj.dates);
    return fv;
}

}  // namespace xlem::eventlink
