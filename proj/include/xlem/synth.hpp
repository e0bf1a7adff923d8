#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xlem/textvec.hpp"

namespace xlem::synth {

// Multilingual topic-mixture corpus: every multilingual document draws one
// mixture over latent topics, shared across its language versions; each
// version then samples its own tokens from language-specific topic slices.
// Mates are therefore related only through the latent mixture, never through
// shared tokens.
struct TopicCorpusParams {
    std::size_t n_langs = 2;
    std::size_t n_docs = 1000;    // multilingual documents (alignment rows)
    std::size_t n_topics = 20;
    std::size_t vocab_size = 800;  // terms per language
    std::size_t doc_len = 120;     // tokens per document version
    double noise = 0.1;            // chance a token ignores the topic mixture
    // Presence patterns drawn per document: (per-language flags, weight).
    // Empty means "all languages present".
    std::vector<std::pair<std::vector<std::uint8_t>, double>> presence;
    std::uint64_t seed = 1;
};

struct TopicCorpus {
    std::vector<std::string> langs;
    std::vector<std::vector<textvec::Document>> docs;  // per language stream
    std::vector<std::vector<std::string>> alignment;   // one row per document
};

TopicCorpus make_topic_corpus(const TopicCorpusParams &p);

// Multilingual event streams over the same latent topic space: an aligned
// training corpus plus per-language timestamped article streams where each
// planted event owns one topic mixture, a concept pool, a location and a
// date. Articles inherit noisy subsets of their event's annotations, so
// stream clusters can be linked across languages and scored against the
// planted truth.
struct EventStreamParams {
    std::size_t n_langs = 2;
    std::size_t n_events = 200;
    std::size_t n_topics = 30;
    std::size_t vocab_size = 1500;  // terms per language
    std::size_t doc_len = 120;
    double noise = 0.05;           // chance a token ignores the mixture
    std::size_t train_docs = 2000;  // aligned documents for model fitting

    std::size_t min_articles = 3;  // per event per language
    std::size_t max_articles = 8;
    double horizon_days = 30.0;  // event start times spread over this range
    double span_hours = 12.0;    // article timestamps inside one event

    std::size_t n_entities = 1200;  // concept universe sizes
    std::size_t n_keywords = 1800;
    std::size_t entities_per_event = 6;
    std::size_t keywords_per_event = 9;
    double concept_keep = 0.7;       // article keeps a pool concept w.p.
    std::size_t noise_concepts = 2;  // stray concepts per article
    std::size_t n_locations = 25;    // shared by many events on purpose
    double location_rate = 0.85;     // article carries the event location
    double date_rate = 0.7;          // article mentions the event date

    std::uint64_t seed = 1;
};

struct EventArticle {
    textvec::Document doc;  // id, lang, tokens, timestamp always set
    std::map<std::string, double> entities;
    std::map<std::string, double> keywords;
    std::optional<std::string> location;
    std::set<std::string> dates;
    std::size_t event = 0;  // planted ground truth
};

struct EventStreamCorpus {
    TopicCorpus train;
    std::vector<std::string> langs;
    std::vector<std::vector<EventArticle>> streams;  // per language, by time
};

EventStreamCorpus make_event_streams(const EventStreamParams &p);

}  // namespace xlem::synth
