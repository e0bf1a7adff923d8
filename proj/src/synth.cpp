#include "xlem/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "xlem/error.hpp"
#include "xlem/numkit/rng.hpp"

namespace xlem::synth {

using numkit::Rng;

namespace {

// Squared-gaussian mixture over topics: dense, doc-specific, and far from
// other documents' mixtures with high probability.
std::vector<double> draw_mixture(std::size_t n_topics, Rng &rng) {
    std::vector<double> w(n_topics);
    double total = 0.0;
    for (double &x : w) {
        const double g = rng.gaussian();
        x = g * g;
        total += x;
    }
    for (double &x : w) x /= total;
    return w;
}

std::size_t draw_from(const std::vector<double> &weights, Rng &rng) {
    double u = rng.uniform();
    for (std::size_t t = 0; t + 1 < weights.size(); ++t) {
        if (u < weights[t]) return t;
        u -= weights[t];
    }
    return weights.size() - 1;
}

std::vector<std::string> topic_tokens(const std::vector<double> &mixture,
                                      std::size_t vocab_size,
                                      std::size_t doc_len, double noise,
                                      Rng &rng) {
    const std::size_t slice = vocab_size / mixture.size();
    std::vector<std::string> tokens;
    tokens.reserve(doc_len);
    for (std::size_t w = 0; w < doc_len; ++w) {
        std::size_t term;
        if (rng.uniform() < noise) {
            term = rng.uniform_index(vocab_size);
        } else {
            const std::size_t t = draw_from(mixture, rng);
            term = t * slice + rng.uniform_index(slice);
        }
        tokens.push_back("t" + std::to_string(term));
    }
    return tokens;
}

std::string iso_date(std::int64_t ts) {
    const auto t = static_cast<std::time_t>(ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday);
    return buf;
}

std::set<std::string> sample_pool(const char *prefix, std::size_t universe,
                                  std::size_t count, Rng &rng) {
    std::set<std::string> pool;
    while (pool.size() < count)
        pool.insert(prefix + std::to_string(rng.uniform_index(universe)));
    return pool;
}

}  // namespace

TopicCorpus make_topic_corpus(const TopicCorpusParams &p) {
    if (p.n_langs < 2) throw DataError("topic corpus: need at least two languages");
    if (p.vocab_size < p.n_topics)
        throw DataError("topic corpus: vocabulary smaller than the topic count");
    for (const auto &[flags, weight] : p.presence) {
        if (flags.size() != p.n_langs)
            throw DataError("topic corpus: presence pattern length mismatch");
        std::size_t on = 0;
        for (auto f : flags) on += f ? 1 : 0;
        if (on < 2)
            throw DataError("topic corpus: presence pattern with fewer than two languages");
        if (weight <= 0.0) throw DataError("topic corpus: nonpositive pattern weight");
    }

    Rng rng(p.seed);
    TopicCorpus out;
    out.docs.resize(p.n_langs);
    for (std::size_t i = 0; i < p.n_langs; ++i)
        out.langs.push_back("l" + std::to_string(i));

    double pattern_total = 0.0;
    for (const auto &[flags, weight] : p.presence) pattern_total += weight;

    for (std::size_t l = 0; l < p.n_docs; ++l) {
        const auto mixture = draw_mixture(p.n_topics, rng);

        std::vector<std::uint8_t> flags(p.n_langs, 1);
        if (!p.presence.empty()) {
            double u = rng.uniform() * pattern_total;
            for (const auto &[f, weight] : p.presence) {
                flags = f;
                if (u < weight) break;
                u -= weight;
            }
        }

        std::vector<std::string> row(p.n_langs);
        for (std::size_t i = 0; i < p.n_langs; ++i) {
            if (!flags[i]) continue;
            textvec::Document d;
            d.lang = out.langs[i];
            d.id = out.langs[i] + "_" + std::to_string(l);
            d.tokens =
                topic_tokens(mixture, p.vocab_size, p.doc_len, p.noise, rng);
            row[i] = d.id;
            out.docs[i].push_back(std::move(d));
        }
        out.alignment.push_back(std::move(row));
    }
    return out;
}

EventStreamCorpus make_event_streams(const EventStreamParams &p) {
    if (p.n_langs < 2)
        throw DataError("event streams: need at least two languages");
    if (p.min_articles == 0 || p.max_articles < p.min_articles)
        throw DataError("event streams: bad articles-per-event range");
    if (p.n_locations == 0 || p.n_entities == 0 || p.n_keywords == 0)
        throw DataError("event streams: empty concept universe");

    EventStreamCorpus out;
    TopicCorpusParams tp;
    tp.n_langs = p.n_langs;
    tp.n_docs = p.train_docs;
    tp.n_topics = p.n_topics;
    tp.vocab_size = p.vocab_size;
    tp.doc_len = p.doc_len;
    tp.noise = p.noise;
    tp.seed = p.seed;
    out.train = make_topic_corpus(tp);
    out.langs = out.train.langs;
    out.streams.resize(p.n_langs);

    // streams draw from a separate generator; the topic -> term-slice layout
    // is positional, so stream articles land in the training topic space
    Rng rng(p.seed + 0x9e3779b97f4a7c15ull);
    const std::int64_t base_ts = 1704067200;  // 2024-01-01T00:00:00Z

    for (std::size_t e = 0; e < p.n_events; ++e) {
        const auto mixture = draw_mixture(p.n_topics, rng);
        const std::int64_t start =
            base_ts + static_cast<std::int64_t>(rng.uniform() *
                                                p.horizon_days * 86400.0);
        const auto entity_pool =
            sample_pool("ent", p.n_entities, p.entities_per_event, rng);
        const auto keyword_pool =
            sample_pool("kw", p.n_keywords, p.keywords_per_event, rng);
        const std::string location =
            "loc" + std::to_string(rng.uniform_index(p.n_locations));
        const std::string day0 = iso_date(start);
        const std::string day1 = iso_date(start + 86400);

        for (std::size_t i = 0; i < p.n_langs; ++i) {
            const std::size_t count =
                p.min_articles +
                rng.uniform_index(p.max_articles - p.min_articles + 1);
            for (std::size_t k = 0; k < count; ++k) {
                EventArticle a;
                a.event = e;
                a.doc.lang = out.langs[i];
                a.doc.id = out.langs[i] + "_e" + std::to_string(e) + "_a" +
                           std::to_string(k);
                a.doc.timestamp =
                    start + static_cast<std::int64_t>(
                                rng.uniform() * p.span_hours * 3600.0);
                a.doc.tokens = topic_tokens(mixture, p.vocab_size, p.doc_len,
                                            p.noise, rng);
                for (const auto &id : entity_pool)
                    if (rng.uniform() < p.concept_keep)
                        a.entities[id] = 1.0 + double(rng.uniform_index(3));
                for (const auto &id : keyword_pool)
                    if (rng.uniform() < p.concept_keep)
                        a.keywords[id] = 1.0 + double(rng.uniform_index(3));
                for (std::size_t s = 0; s < p.noise_concepts; ++s) {
                    if (rng.uniform() < 0.5)
                        a.entities["ent" + std::to_string(rng.uniform_index(
                                               p.n_entities))] += 1.0;
                    else
                        a.keywords["kw" + std::to_string(rng.uniform_index(
                                              p.n_keywords))] += 1.0;
                }
                if (rng.uniform() < p.location_rate) a.location = location;
                if (rng.uniform() < p.date_rate) a.dates.insert(day0);
                if (rng.uniform() < 0.2) a.dates.insert(day1);
                if (rng.uniform() < 0.05)
                    a.dates.insert(iso_date(
                        base_ts + static_cast<std::int64_t>(
                                      rng.uniform() * p.horizon_days *
                                      86400.0)));
                out.streams[i].push_back(std::move(a));
            }
        }
    }

    for (auto &stream : out.streams)
        std::sort(stream.begin(), stream.end(),
                  [](const EventArticle &x, const EventArticle &y) {
                      if (*x.doc.timestamp != *y.doc.timestamp)
                          return *x.doc.timestamp < *y.doc.timestamp;
                      return x.doc.id < y.doc.id;
                  });
    return out;
}

}  // namespace xlem::synth
