#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "xlem/binio.hpp"
#include "xlem/error.hpp"
#include "xlem/eventlink.hpp"
#include "xlem/io.hpp"
#include "xlem/numkit/rng.hpp"
#include "xlem/synth.hpp"
#include "xlem/textvec.hpp"

using namespace xlem;
using namespace xlem::eventlink;
using numkit::Rng;
using textvec::SparseVector;

namespace {

SparseVector from_dense(const std::vector<double> &v) {
    SparseVector s;
    s.dim = v.size();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            s.idx.push_back(static_cast<std::uint32_t>(i));
            s.val.push_back(v[i]);
        }
    }
    return s;
}

SparseVector axis(std::size_t dim, std::size_t k, double v = 1.0) {
    std::vector<double> d(dim, 0.0);
    d[k] = v;
    return from_dense(d);
}

Article art(std::string id, SparseVector vec, std::int64_t ts) {
    Article a;
    a.id = std::move(id);
    a.vec = std::move(vec);
    a.ts = ts;
    return a;
}

std::vector<double> to_dense(const SparseVector &s) {
    std::vector<double> d(s.dim, 0.0);
    for (std::size_t i = 0; i < s.idx.size(); ++i) d[s.idx[i]] = s.val[i];
    return d;
}

std::filesystem::path temp_dir(const std::string &tag) {
    auto d = std::filesystem::temp_directory_path() /
             ("xlem_eventlink_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

// random feature vector spanning the very different native scales
LinkFeatureVector random_fv(Rng &rng) {
    LinkFeatureVector fv;
    fv.link_count = double(rng.uniform_index(40));
    fv.avg_sim_score = rng.uniform();
    fv.entity_cos = rng.uniform();
    fv.keyword_cos = rng.uniform();
    fv.entity_jaccard = rng.uniform();
    fv.keyword_jaccard = rng.uniform();
    fv.same_location = rng.uniform() < 0.5 ? 1.0 : 0.0;
    fv.time_diff_hours = rng.uniform() * 200.0;
    fv.shared_dates = rng.uniform();
    return fv;
}

Cluster toy_cluster(std::uint64_t id, const std::string &lang,
                    std::vector<std::string> ids) {
    Cluster c;
    c.id = id;
    c.lang = lang;
    c.article_ids = std::move(ids);
    return c;
}

}  // namespace

TEST_CASE("first article opens a cluster and reports similarity zero") {
    ClusterStream s("en");
    auto a = s.ingest(art("a0", axis(4, 0), 100));
    CHECK(a.created);
    CHECK(a.similarity == 0.0);
    REQUIRE(s.live().size() == 1);
    CHECK(s.live()[0].article_ids == std::vector<std::string>{"a0"});

    // duplicate joins its own singleton at similarity 1
    auto b = s.ingest(art("a1", axis(4, 0), 110));
    CHECK_FALSE(b.created);
    CHECK(b.cluster_id == a.cluster_id);
    CHECK(b.similarity == doctest::Approx(1.0).epsilon(1e-12));

    // orthogonal vector opens a new cluster
    auto c = s.ingest(art("a2", axis(4, 1), 120));
    CHECK(c.created);
    CHECK(c.similarity == 0.0);
    CHECK(s.live().size() == 2);
}

TEST_CASE("equally similar centroids keep the article on the older cluster") {
    ClusterStream s("en");
    auto a = s.ingest(art("a", axis(4, 0), 0));
    auto b = s.ingest(art("b", axis(4, 1), 1));
    REQUIRE(a.cluster_id != b.cluster_id);

    // (1,1,0,0) has the bitwise-identical cosine against both axes
    auto r = s.ingest(art("c", from_dense({1, 1, 0, 0}), 2));
    CHECK_FALSE(r.created);
    CHECK(r.cluster_id == a.cluster_id);
    CHECK(r.similarity == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("joining happens exactly at the threshold, not below") {
    // cosine((1,1,1,1), e0) = 1/sqrt(4) = 0.5 exactly in floating point
    StreamParams p;
    p.threshold = 0.5;
    ClusterStream at("en", p);
    at.ingest(art("a", axis(4, 0), 0));
    CHECK(textvec::cosine(from_dense({1, 1, 1, 1}), axis(4, 0)) == 0.5);
    CHECK_FALSE(at.ingest(art("b", from_dense({1, 1, 1, 1}), 1)).created);

    p.threshold = std::nextafter(0.5, 1.0);
    ClusterStream above("en", p);
    above.ingest(art("a", axis(4, 0), 0));
    CHECK(above.ingest(art("b", from_dense({1, 1, 1, 1}), 1)).created);
}

TEST_CASE("mismatched vector dimensions are rejected") {
    ClusterStream s("en");
    s.ingest(art("a", axis(3, 0), 0));
    CHECK_THROWS_AS(s.ingest(art("b", axis(4, 0), 1)), DataError);
}

TEST_CASE("expiry is strict on the four-day boundary") {
    const std::int64_t t0 = 1000000;
    ClusterStream s("en");
    s.ingest(art("a", axis(2, 0), t0));

    CHECK(s.expire(t0 + 4 * 86400).empty());  // exactly four days: retained
    REQUIRE(s.live().size() == 1);

    auto gone = s.expire(t0 + 4 * 86400 + 1);  // one second past: removed
    REQUIRE(gone.size() == 1);
    CHECK(gone[0].article_ids == std::vector<std::string>{"a"});
    CHECK(s.live().empty());
}

TEST_CASE("expiry of a mixed set equals the brute-force age filter") {
    const std::int64_t t0 = 5000000;
    std::vector<std::int64_t> ts = {t0,          t0 + 20000,  t0 + 90000,
                                    t0 + 170000, t0 + 260000, t0 + 330000};
    ClusterStream s("en");
    std::vector<std::uint64_t> ids;
    for (std::size_t k = 0; k < ts.size(); ++k)
        ids.push_back(s.ingest(art("a" + std::to_string(k), axis(8, k), ts[k]))
                          .cluster_id);  // orthogonal: six singletons

    const std::int64_t now = t0 + 330000 + 200000;
    std::set<std::uint64_t> want;
    for (std::size_t k = 0; k < ts.size(); ++k)
        if (ts[k] < now - 4 * 86400) want.insert(ids[k]);
    REQUIRE(!want.empty());
    REQUIRE(want.size() < ts.size());

    std::set<std::uint64_t> got;
    for (const auto &c : s.expire(now)) got.insert(c.id);
    CHECK(got == want);
    CHECK(s.live().size() == ts.size() - want.size());
}

TEST_CASE("clusters aged out during ingest are parked for collection") {
    ClusterStream s("en");
    auto first = s.ingest(art("a", axis(2, 0), 0));
    // five days later: the ingest sweep must retire the first cluster
    s.ingest(art("b", axis(2, 1), 5 * 86400));
    REQUIRE(s.live().size() == 1);
    CHECK(s.live()[0].article_ids == std::vector<std::string>{"b"});

    auto parked = s.expire(s.latest_ts());
    REQUIRE(parked.size() == 1);
    CHECK(parked[0].id == first.cluster_id);

    auto rest = s.drain();
    REQUIRE(rest.size() == 1);
    CHECK(rest[0].article_ids == std::vector<std::string>{"b"});
    CHECK(s.live().empty());
}

TEST_CASE("cluster metadata aggregates member annotations") {
    ClusterStream s("en");
    Article a = art("a", axis(3, 0), 1000);
    a.entities = {{"x", 1.0}, {"y", 2.0}};
    a.keywords = {{"k", 1.0}};
    a.location = "rome";
    a.dates = {"2024-01-02"};
    Article b = art("b", axis(3, 0), 2000);
    b.entities = {{"y", 3.0}, {"z", 1.0}};
    b.location = "oslo";
    b.dates = {"2024-01-02", "2024-01-03"};
    Article c = art("c", axis(3, 0), 3000);
    c.location = "oslo";

    s.ingest(a);
    s.ingest(b);
    REQUIRE(s.live().size() == 1);
    {
        const Cluster &cl = s.live()[0];
        CHECK(cl.entities ==
              std::map<std::string, double>{{"x", 1}, {"y", 5}, {"z", 1}});
        CHECK(cl.keywords == std::map<std::string, double>{{"k", 1}});
        CHECK(cl.dates ==
              std::set<std::string>{"2024-01-02", "2024-01-03"});
        // one vote each: the earlier-seen location keeps the tie
        CHECK(*cl.location == "rome");
        CHECK(cl.avg_ts == doctest::Approx(1500.0).epsilon(1e-12));
        CHECK(cl.oldest_ts == 1000);
    }

    s.ingest(c);  // oslo now outvotes rome 2:1
    CHECK(*s.live()[0].location == "oslo");
    CHECK(s.live()[0].avg_ts == doctest::Approx(2000.0).epsilon(1e-12));
}

TEST_CASE("incremental centroids track the recomputed mean on a random stream") {
    const std::size_t dim = 40, bases = 8;
    Rng rng(77);
    std::vector<std::vector<double>> base(bases, std::vector<double>(dim, 0.0));
    for (auto &b : base) {
        for (double &x : b) x = rng.uniform() < 0.2 ? rng.uniform() : 0.0;
        b[rng.uniform_index(dim)] += 1.0;  // never the zero vector
    }

    ClusterStream s("en");
    std::map<std::string, std::vector<double>> stored;
    std::int64_t ts = 0;
    for (int n = 0; n < 300; ++n) {
        std::vector<double> v = base[rng.uniform_index(bases)];
        for (double &x : v) x = 0.8 * x + 0.2 * rng.uniform();
        const std::string id = "a" + std::to_string(n);
        stored[id] = v;
        ts += 1200;
        s.ingest(art(id, from_dense(v), ts));

        for (const Cluster &c : s.live()) {
            // oracle: normalized mean over the recorded member vectors
            std::vector<double> mean(dim, 0.0);
            for (const auto &aid : c.article_ids)
                for (std::size_t i = 0; i < dim; ++i)
                    mean[i] += stored[aid][i];
            double nrm = 0.0;
            for (double &x : mean) x /= double(c.article_ids.size());
            for (double x : mean) nrm += x * x;
            nrm = std::sqrt(nrm);
            const auto got = to_dense(c.centroid);
            for (std::size_t i = 0; i < dim; ++i)
                CHECK(std::abs(got[i] - mean[i] / nrm) <= 1e-9);
        }
    }

    // age invariant: nothing live is strictly older than four days
    for (const Cluster &c : s.live())
        CHECK(c.oldest_ts >= s.latest_ts() - 4 * 86400);

    // timestamp bookkeeping against a brute recomputation
    for (const Cluster &c : s.live()) {
        double mean_ts = 0.0;
        std::int64_t oldest = std::numeric_limits<std::int64_t>::max();
        for (const auto &aid : c.article_ids) {
            const auto n = std::stoll(aid.substr(1));
            mean_ts += double((n + 1) * 1200);
            oldest = std::min<std::int64_t>(oldest, (n + 1) * 1200);
        }
        mean_ts /= double(c.article_ids.size());
        CHECK(c.avg_ts == doctest::Approx(mean_ts).epsilon(1e-12));
        CHECK(c.oldest_ts == oldest);
    }
}

TEST_CASE("event promotion filters by member count") {
    std::vector<Cluster> cs;
    cs.push_back(toy_cluster(0, "en", {"a"}));
    cs.push_back(toy_cluster(1, "en", {"a", "b", "c"}));
    cs.push_back(toy_cluster(2, "en", {"a", "b", "c", "d"}));
    auto ev = events_only(cs, 3);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0].id == 1);
    CHECK(ev[1].id == 2);
}

TEST_CASE("membership index rejects an article in two clusters") {
    std::vector<Cluster> cs;
    cs.push_back(toy_cluster(0, "es", {"b1", "b2"}));
    cs.push_back(toy_cluster(1, "es", {"b2"}));
    CHECK_THROWS_AS(membership_index(cs), DataError);
}

TEST_CASE("candidate generation matches the hand-enumerated toy instance") {
    Cluster ci = toy_cluster(100, "en", {"ea1", "ea2"});
    std::vector<Cluster> foreign;
    foreign.push_back(toy_cluster(0, "es", {"sb1", "sb2"}));
    foreign.push_back(toy_cluster(1, "es", {"sb3"}));
    foreign.push_back(toy_cluster(2, "de", {"dc1"}));
    auto member = membership_index(foreign);
    // junk entry mapping back to ci itself must never surface
    member["ea2"] = ci.id;

    LinkTable links;
    links["ea1"]["es"] = {{"sb1", 0.9}, {"sb9", 0.8}};  // sb9 unassigned
    links["ea1"]["de"] = {{"dc1", 0.7}};
    links["ea2"]["es"] = {{"sb3", 0.6}, {"sb1", 0.5}, {"ea2", 0.4}};

    // oracle: the two nested loops transcribed directly
    std::set<std::uint64_t> want;
    for (const auto &a : ci.article_ids)
        for (const auto &[lang, list] : links[a])
            for (const auto &l : list) {
                auto it = member.find(l.neighbor);
                if (it != member.end() && it->second != ci.id)
                    want.insert(it->second);
            }
    CHECK(want == std::set<std::uint64_t>{0, 1, 2});

    auto got = candidate_clusters(ci, links, member);
    CHECK(std::set<std::uint64_t>(got.begin(), got.end()) == want);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(got.size() <= 10 * ci.article_ids.size() * 2);

    // member-article order cannot matter
    std::reverse(ci.article_ids.begin(), ci.article_ids.end());
    CHECK(candidate_clusters(ci, links, member) == got);

    // neighbors pointing nowhere produce no candidates
    Cluster lone = toy_cluster(7, "en", {"zz"});
    LinkTable none;
    none["zz"]["es"] = {{"unknown", 0.9}};
    CHECK(candidate_clusters(lone, none, member).empty());
}

TEST_CASE("link counting is per neighbor slot with its mean similarity") {
    Cluster ci = toy_cluster(100, "en", {"ea1", "ea2"});
    Cluster es0 = toy_cluster(0, "es", {"sb1", "sb2"});
    Cluster es1 = toy_cluster(1, "es", {"sb3"});
    Cluster de2 = toy_cluster(2, "de", {"dc1"});
    LinkTable links;
    links["ea1"]["es"] = {{"sb1", 0.9}, {"sb9", 0.8}};
    links["ea1"]["de"] = {{"dc1", 0.7}};
    links["ea2"]["es"] = {{"sb3", 0.6}, {"sb1", 0.5}};

    auto f0 = extract_features(ci, es0, links);
    CHECK(f0.link_count == 2.0);
    CHECK(f0.avg_sim_score == doctest::Approx(0.7).epsilon(1e-12));
    auto f1 = extract_features(ci, es1, links);
    CHECK(f1.link_count == 1.0);
    CHECK(f1.avg_sim_score == doctest::Approx(0.6).epsilon(1e-12));
    auto f2 = extract_features(ci, de2, links);
    CHECK(f2.link_count == 1.0);
    CHECK(f2.avg_sim_score == doctest::Approx(0.7).epsilon(1e-12));

    // no slots between the pair: both link features zero
    auto fnone = extract_features(es1, de2, links);
    CHECK(fnone.link_count == 0.0);
    CHECK(fnone.avg_sim_score == 0.0);
}

TEST_CASE("concept similarities on hand-computed maps") {
    LinkTable links;
    Cluster a = toy_cluster(0, "en", {"x"});
    Cluster b = toy_cluster(1, "es", {"y"});
    a.entities = {{"A", 1.0}, {"B", 1.0}};
    b.entities = {{"B", 1.0}, {"C", 1.0}};
    auto fv = extract_features(a, b, links);
    CHECK(fv.entity_jaccard == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(fv.entity_cos == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fv.keyword_cos == 0.0);      // both empty
    CHECK(fv.keyword_jaccard == 0.0);  // 0/0 convention
    CHECK(fv.shared_dates == 0.0);
    CHECK(fv.same_location == 0.0);  // both missing

    // weights scale out of the cosine but not the presence sets
    Cluster b2 = b;
    for (auto &[id, w] : b2.entities) w *= 7.5;
    auto fv2 = extract_features(a, b2, links);
    CHECK(fv2.entity_cos == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fv2.entity_jaccard == fv.entity_jaccard);
}

TEST_CASE("self-comparison limits of the symmetric features") {
    LinkTable links;
    Cluster a = toy_cluster(0, "en", {"x"});
    a.entities = {{"A", 2.0}, {"B", 1.0}};
    a.keywords = {{"k1", 1.0}, {"k2", 3.0}};
    a.location = "lisbon";
    a.avg_ts = 7200.0;
    a.dates = {"2024-02-01", "2024-02-02"};
    Cluster b = a;
    b.id = 1;
    b.lang = "es";
    b.article_ids = {"y"};

    auto fv = extract_features(a, b, links);
    CHECK(fv.entity_cos == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fv.keyword_cos == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fv.entity_jaccard == 1.0);
    CHECK(fv.keyword_jaccard == 1.0);
    CHECK(fv.same_location == 1.0);
    CHECK(fv.time_diff_hours == 0.0);
    CHECK(fv.shared_dates == 1.0);

    b.avg_ts = a.avg_ts + 2.0 * 3600.0;  // two hours apart
    b.location = "porto";
    CHECK(extract_features(a, b, links).time_diff_hours ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(extract_features(a, b, links).same_location == 0.0);

    CHECK_THROWS_AS(extract_features(a, a, links), DataError);
}

TEST_CASE("the seven undirected features are exactly symmetric") {
    Rng rng(5);
    LinkTable links;
    for (int trial = 0; trial < 20; ++trial) {
        Cluster a = toy_cluster(0, "en", {"x"});
        Cluster b = toy_cluster(1, "es", {"y"});
        for (auto *c : {&a, &b}) {
            for (int k = 0; k < 6; ++k) {
                c->entities["e" + std::to_string(rng.uniform_index(9))] =
                    rng.uniform() * 3.0;
                c->keywords["k" + std::to_string(rng.uniform_index(9))] =
                    rng.uniform() * 3.0;
            }
            if (rng.uniform() < 0.7)
                c->location = "loc" + std::to_string(rng.uniform_index(3));
            c->avg_ts = rng.uniform() * 1e6;
            for (int k = 0; k < 3; ++k)
                c->dates.insert("2024-03-0" +
                                std::to_string(1 + rng.uniform_index(8)));
        }
        auto ab = extract_features(a, b, links).to_array();
        auto ba = extract_features(b, a, links).to_array();
        for (std::size_t k = 2; k < 9; ++k) CHECK(ab[k] == ba[k]);
    }
}

TEST_CASE("separable pair trains to unit functional margins") {
    TrainExample pos, neg;
    pos.fv.entity_cos = 1.0;
    pos.label = 1;
    neg.fv.entity_cos = 0.0;
    neg.label = 0;
    auto m = train_linker({pos, neg}, 1.0, 3);
    auto pp = predict_link(m, pos.fv);
    auto pn = predict_link(m, neg.fv);
    CHECK(pp.link);
    CHECK_FALSE(pn.link);
    CHECK(pp.margin >= 1.0 - 1e-6);
    CHECK(pn.margin <= -1.0 + 1e-6);
}

TEST_CASE("training rejects degenerate inputs") {
    TrainExample a, b;
    a.label = 1;
    b.label = 1;
    CHECK_THROWS_AS(train_linker({a}, 1.0, 0), DataError);
    CHECK_THROWS_AS(train_linker({a, b}, 1.0, 0), DataError);
    b.label = 0;
    CHECK_THROWS_AS(train_linker({a, b}, 0.0, 0), DataError);
    CHECK_THROWS_AS(train_linker({a, b}, -1.0, 0), DataError);
}

TEST_CASE("trained primal objective matches an independent optimizer") {
    Rng rng(11);
    for (int ds = 0; ds < 10; ++ds) {
        const std::size_t n = 20 + rng.uniform_index(30);
        std::vector<TrainExample> ex;
        double shift = rng.gaussian();
        for (std::size_t i = 0; i < n; ++i) {
            TrainExample e;
            e.fv = random_fv(rng);
            // weak signal keeps the problem non-separable but nontrivial
            e.label =
                (e.fv.entity_cos + 0.8 * rng.gaussian() + 0.2 * shift > 0.5)
                    ? 1
                    : 0;
            ex.push_back(e);
        }
        std::size_t pos = 0;
        for (const auto &e : ex) pos += e.label;
        if (pos == 0 || pos == ex.size()) continue;

        const double C = (ds % 2) ? 1.0 : 0.25;
        auto m = train_linker(ex, C, 17 + ds);

        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (const auto &e : ex) {
            const auto raw = e.fv.to_array();
            std::vector<double> row(10, 1.0);
            for (std::size_t k = 0; k < 9; ++k)
                row[k] = (raw[k] - m.mean[k]) * m.inv_scale[k];
            X.push_back(row);
            y.push_back(e.label ? 1.0 : -1.0);
        }
        const double ref = oracle::svm_primal_reference(X, y, C, 1e-7);
        const double got = primal_objective(m, ex);
        CHECK(std::abs(got - ref) <= 1e-4 * std::max(1.0, ref));
    }
}

TEST_CASE("training is deterministic in the seed and stable across seeds") {
    Rng rng(23);
    std::vector<TrainExample> ex;
    for (int i = 0; i < 60; ++i) {
        TrainExample e;
        e.fv = random_fv(rng);
        e.label = (e.fv.keyword_cos > 0.5) == (rng.uniform() < 0.9) ? 1 : 0;
        ex.push_back(e);
    }
    auto m1 = train_linker(ex, 1.0, 42);
    auto m2 = train_linker(ex, 1.0, 42);
    CHECK(m1.weights == m2.weights);
    CHECK(m1.bias == m2.bias);
    CHECK(m1.mean == m2.mean);
    CHECK(m1.inv_scale == m2.inv_scale);

    // the objective is strictly convex: any seed reaches the same optimum
    auto m3 = train_linker(ex, 1.0, 1234);
    CHECK(primal_objective(m1, ex) ==
          doctest::Approx(primal_objective(m3, ex)).epsilon(1e-8));
}

TEST_CASE("prediction basics") {
    LinearModel m;  // zero weights, zero bias, inv_scale all zero
    m.bias = 0.75;
    auto p = predict_link(m, LinkFeatureVector{});
    CHECK(p.margin == 0.75);
    CHECK(p.link);

    Rng rng(31);
    std::vector<LinkFeatureVector> fvs;
    for (int i = 0; i < 25; ++i) fvs.push_back(random_fv(rng));
    std::vector<TrainExample> ex;
    for (std::size_t i = 0; i < fvs.size(); ++i)
        ex.push_back({fvs[i], fvs[i].entity_cos > 0.5 ? 1 : 0});
    auto trained = train_linker(ex, 1.0, 7);

    auto batch = predict_links(trained, fvs);
    REQUIRE(batch.size() == fvs.size());
    for (std::size_t i = 0; i < fvs.size(); ++i) {
        auto one = predict_link(trained, fvs[i]);
        CHECK(batch[i].margin == one.margin);
        CHECK(batch[i].link == one.link);
    }
}

TEST_CASE("constant features are pinned to zero and stay harmless") {
    Rng rng(41);
    std::vector<TrainExample> ex;
    for (int i = 0; i < 40; ++i) {
        TrainExample e;
        e.fv = random_fv(rng);
        e.fv.time_diff_hours = 36.0;  // constant across the training set
        e.label = e.fv.entity_cos > 0.5 ? 1 : 0;
        ex.push_back(e);
    }
    auto m = train_linker(ex, 1.0, 5);
    CHECK(m.inv_scale[7] == 0.0);

    // deviating values of the constant feature cannot move the margin
    LinkFeatureVector probe = ex[0].fv;
    const double before = predict_link(m, probe).margin;
    probe.time_diff_hours = 4000.0;
    CHECK(predict_link(m, probe).margin == before);
}

TEST_CASE("labels independent of features cross-validate near chance") {
    double acc = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        Rng rng(100 + s);
        std::vector<TrainExample> ex;
        for (int i = 0; i < 60; ++i) {
            TrainExample e;
            e.fv = random_fv(rng);
            e.label = i % 2;  // balanced, independent of the features
            ex.push_back(e);
        }
        acc += kfold_cv(ex, 5, 900 + s).mean.accuracy / seeds;
    }
    CHECK(acc > 0.4);
    CHECK(acc < 0.6);
}

TEST_CASE("a planted decision rule is recovered by cross validation") {
    Rng rng(55);
    std::vector<TrainExample> ex;
    for (int i = 0; i < 400; ++i) {
        TrainExample e;
        e.fv = random_fv(rng);
        e.label = e.fv.entity_cos > 0.5 ? 1 : 0;
        ex.push_back(e);
    }
    auto cv = kfold_cv(ex, 10, 3);
    CHECK(cv.mean.accuracy >= 0.95);
    CHECK(cv.folds.size() == 10);

    // a perfectly separated rule scores 1.0 in every fold
    std::vector<TrainExample> clean;
    for (int i = 0; i < 80; ++i) {
        TrainExample e;
        e.fv = random_fv(rng);
        e.fv.entity_jaccard = (i % 2) ? 0.9 : 0.1;
        e.label = i % 2;
        clean.push_back(e);
    }
    auto cv2 = kfold_cv(clean, 10, 4);
    for (const auto &f : cv2.folds) {
        CHECK(f.accuracy == 1.0);
        CHECK(f.precision == 1.0);
        CHECK(f.recall == 1.0);
        CHECK(f.f1 == 1.0);
    }
    CHECK(cv2.stddev.accuracy <= 1e-12);
}

TEST_CASE("stratified folds partition the data with balanced classes") {
    std::vector<int> labels;
    for (int i = 0; i < 17; ++i) labels.push_back(1);
    for (int i = 0; i < 23; ++i) labels.push_back(0);
    auto fold = stratified_folds(labels, 5, 99);
    REQUIRE(fold.size() == labels.size());

    std::vector<std::size_t> pos(5, 0), neg(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        REQUIRE(fold[i] < 5);
        (labels[i] ? pos : neg)[fold[i]] += 1;
    }
    const auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
    const auto [nmin, nmax] = std::minmax_element(neg.begin(), neg.end());
    CHECK(*pmax - *pmin <= 1);
    CHECK(*nmax - *nmin <= 1);
    std::size_t total = 0;
    for (std::size_t f = 0; f < 5; ++f) total += pos[f] + neg[f];
    CHECK(total == labels.size());  // every example in exactly one fold
}

TEST_CASE("cross validation rejects undersized inputs") {
    Rng rng(1);
    std::vector<TrainExample> ex;
    for (int i = 0; i < 8; ++i) ex.push_back({random_fv(rng), i % 2});
    CHECK_THROWS_AS(kfold_cv(ex, 1, 0), DataError);
    CHECK_THROWS_AS(kfold_cv(ex, 9, 0), DataError);
    CHECK_NOTHROW(kfold_cv(ex, 8, 0));
}

TEST_CASE("linker container round-trips bit-exactly and rejects corruption") {
    Rng rng(13);
    std::vector<TrainExample> ex;
    for (int i = 0; i < 30; ++i) {
        TrainExample e;
        e.fv = random_fv(rng);
        e.label = e.fv.keyword_jaccard > 0.4 ? 1 : 0;
        ex.push_back(e);
    }
    auto m = train_linker(ex, 0.5, 77);
    auto dir = temp_dir("linker");
    const std::string path = (dir / "model.xlnk").string();
    save_linker(m, path);

    auto r = load_linker(path);
    CHECK(r.weights == m.weights);
    CHECK(r.bias == m.bias);
    CHECK(r.mean == m.mean);
    CHECK(r.inv_scale == m.inv_scale);
    CHECK(r.C == m.C);
    CHECK(r.seed == m.seed);

    // byte-identical re-save
    save_linker(r, (dir / "again.xlnk").string());
    CHECK(io::read_file(path) == io::read_file((dir / "again.xlnk").string()));

    auto bytes = io::read_file(path);
    auto patch = [&](std::string b, const std::string &p) {
        io::write_file_atomic(p, b);
    };
    auto recrc = [&](std::string b) {
        std::string body = b.substr(0, b.size() - 8);
        binio::Writer w;
        w.bytes(body.data(), body.size());
        w.u64(binio::crc64(body));
        return w.buffer();
    };

    // flipped payload byte: checksum catches it
    std::string bad = bytes;
    bad[9] = char(bad[9] ^ 0x20);
    patch(bad, (dir / "bad.xlnk").string());
    CHECK_THROWS_WITH_AS(load_linker((dir / "bad.xlnk").string()),
                         doctest::Contains("checksum"), FormatError);

    // wrong magic with a fixed-up checksum
    bad = bytes;
    bad[0] = 'Y';
    patch(recrc(bad), (dir / "magic.xlnk").string());
    CHECK_THROWS_WITH_AS(load_linker((dir / "magic.xlnk").string()),
                         doctest::Contains("magic"), FormatError);

    // future version with a fixed-up checksum
    bad = bytes;
    bad[4] = 9;
    patch(recrc(bad), (dir / "version.xlnk").string());
    CHECK_THROWS_WITH_AS(load_linker((dir / "version.xlnk").string()),
                         doctest::Contains("version"), FormatError);

    // truncation
    patch(bytes.substr(0, 10), (dir / "short.xlnk").string());
    CHECK_THROWS_AS(load_linker((dir / "short.xlnk").string()), FormatError);

    std::filesystem::remove_all(dir);
}

TEST_CASE("cluster metadata files round-trip through jsonl") {
    std::vector<Cluster> cs;
    Cluster a = toy_cluster(3, "en", {"a1", "a2"});
    a.entities = {{"ent1", 2.0}, {"ent2", 1.5}};
    a.keywords = {{"kw9", 4.0}};
    a.location = "madrid";
    a.oldest_ts = 1700000000;
    a.avg_ts = 1700000100.6;  // rounds on write
    a.dates = {"2023-11-14", "2023-11-15"};
    Cluster b = toy_cluster(9, "es", {"b1"});
    b.oldest_ts = 1700000050;
    b.avg_ts = 1700000050.0;
    cs.push_back(a);
    cs.push_back(b);

    auto dir = temp_dir("jsonl");
    const std::string path = (dir / "clusters.jsonl").string();
    save_clusters_jsonl(cs, path);
    auto r = load_clusters_jsonl(path);
    REQUIRE(r.size() == 2);
    CHECK(r[0].id == 3);
    CHECK(r[0].lang == "en");
    CHECK(r[0].article_ids == a.article_ids);
    CHECK(r[0].entities == a.entities);
    CHECK(r[0].keywords == a.keywords);
    CHECK(*r[0].location == "madrid");
    CHECK(r[0].oldest_ts == a.oldest_ts);
    CHECK(r[0].avg_ts == 1700000101.0);
    CHECK(r[0].dates == a.dates);
    CHECK_FALSE(r[1].location.has_value());
    CHECK(r[1].avg_ts == 1700000050.0);

    // deterministic writer: re-saving the loaded list is byte-identical
    save_clusters_jsonl(r, (dir / "again.jsonl").string());
    CHECK(io::read_file(path) ==
          io::read_file((dir / "again.jsonl").string()));

    std::ofstream((dir / "bad.jsonl").string()) << "{\"id\": 1}\n";
    CHECK_THROWS_AS(load_clusters_jsonl((dir / "bad.jsonl").string()),
                    DataError);
    std::ofstream((dir / "worse.jsonl").string()) << "not json\n";
    CHECK_THROWS_AS(load_clusters_jsonl((dir / "worse.jsonl").string()),
                    DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("labelled pair files round-trip and validate their labels") {
    std::vector<LabelledPair> ps = {{3, 9, 1}, {4, 9, 0}, {12, 1, 1}};
    auto dir = temp_dir("pairs");
    const std::string path = (dir / "pairs.tsv").string();
    save_labelled_pairs(ps, path);
    CHECK(io::read_file(path) == "3\t9\t1\n4\t9\t0\n12\t1\t1\n");
    auto r = load_labelled_pairs(path);
    REQUIRE(r.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r[i].a == ps[i].a);
        CHECK(r[i].b == ps[i].b);
        CHECK(r[i].label == ps[i].label);
    }

    std::ofstream((dir / "bad.tsv").string()) << "1\t2\t7\n";
    CHECK_THROWS_AS(load_labelled_pairs((dir / "bad.tsv").string()),
                    DataError);
    std::ofstream((dir / "junk.tsv").string()) << "1\t2\t1\textra\n";
    CHECK_THROWS_AS(load_labelled_pairs((dir / "junk.tsv").string()),
                    DataError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("event stream generator is deterministic and well-formed") {
    synth::EventStreamParams p;
    p.n_events = 12;
    p.n_topics = 6;
    p.vocab_size = 300;
    p.doc_len = 60;
    p.train_docs = 80;
    p.min_articles = 2;
    p.max_articles = 4;
    p.seed = 9;
    auto s1 = synth::make_event_streams(p);
    auto s2 = synth::make_event_streams(p);

    REQUIRE(s1.streams.size() == 2);
    REQUIRE(s1.langs == std::vector<std::string>{"l0", "l1"});
    CHECK(s1.train.alignment.size() == 80);

    for (std::size_t l = 0; l < 2; ++l) {
        REQUIRE(s1.streams[l].size() == s2.streams[l].size());
        CHECK(s1.streams[l].size() >= 12 * p.min_articles);
        std::set<std::string> ids;
        std::size_t with_loc = 0, with_concepts = 0;
        for (std::size_t k = 0; k < s1.streams[l].size(); ++k) {
            const auto &a = s1.streams[l][k];
            const auto &b = s2.streams[l][k];
            CHECK(a.doc.id == b.doc.id);
            CHECK(a.doc.tokens == b.doc.tokens);
            CHECK(*a.doc.timestamp == *b.doc.timestamp);
            CHECK(a.entities == b.entities);
            CHECK(a.dates == b.dates);
            CHECK(a.event < 12);
            CHECK(a.doc.lang == s1.langs[l]);
            ids.insert(a.doc.id);
            if (k)
                CHECK(*s1.streams[l][k - 1].doc.timestamp <=
                      *a.doc.timestamp);
            with_loc += a.location.has_value() ? 1 : 0;
            with_concepts += a.entities.empty() ? 0 : 1;
        }
        CHECK(ids.size() == s1.streams[l].size());  // unique article ids
        CHECK(with_loc * 2 > s1.streams[l].size());
        CHECK(with_concepts * 2 > s1.streams[l].size());
    }
}
