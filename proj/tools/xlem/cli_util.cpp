#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "xlem/error.hpp"
#include "xlem/io.hpp"
#include "xlem/numkit/kernels.hpp"

#include "cli.hpp"

namespace xlem::cli {

using nlohmann::json;

void Ctx::begin(const std::string &cmd, const std::string &meta_out) {
    command = cmd;
    meta_path = meta_out;
    numkit::set_num_threads(threads);
    numkit::set_block_size(block);
    set("seed", std::to_string(seed));
    set("threads", std::to_string(threads));
    set("block-size", std::to_string(block));
}

void Ctx::set(const std::string &key, const std::string &value) {
    meta[key] = value;
}

void Ctx::claim(const std::string &path) {
    outputs.emplace_back(path, std::filesystem::exists(path));
}

void Ctx::write_meta() const {
    if (meta_path.empty()) return;
    std::ostringstream out;
    out << "command = " << command << "\n";
    for (const auto &[k, v] : meta) out << k << " = " << v << "\n";
    io::write_file_atomic(meta_path, out.str());
}

void Ctx::discard_outputs() const {
    for (const auto &[path, existed] : outputs) {
        if (existed) continue;
        std::error_code ec;  // best effort; the error path is already fatal
        std::filesystem::remove_all(path, ec);
    }
}

std::string join(const std::vector<std::string> &v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += v[i];
    }
    return out;
}

std::vector<std::string> split_tabs(const std::string &line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

double parse_double(const std::string &s, const std::string &where) {
    char *end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw DataError(where + ": bad number '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string &s, const std::string &where) {
    char *end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size())
        throw DataError(where + ": bad integer '" + s + "'");
    return v;
}

std::vector<StreamArticle> load_stream_jsonl(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open document file: " + path);
    std::vector<StreamArticle> arts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path + ":" + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw DataError(where + ": bad JSON: " + e.what());
        }
        StreamArticle a;
        try {
            a.doc.id = j.at("id").get<std::string>();
            a.doc.lang = j.at("lang").get<std::string>();
            a.doc.tokens = j.at("tokens").get<std::vector<std::string>>();
            if (j.contains("timestamp") && !j["timestamp"].is_null())
                a.doc.timestamp = j["timestamp"].get<std::int64_t>();
            if (j.contains("entities"))
                a.entities = j["entities"].get<std::map<std::string, double>>();
            if (j.contains("keywords"))
                a.keywords = j["keywords"].get<std::map<std::string, double>>();
            if (j.contains("location") && !j["location"].is_null())
                a.location = j["location"].get<std::string>();
            if (j.contains("dates")) {
                for (const auto &d : j.at("dates"))
                    a.dates.insert(d.get<std::string>());
            }
        } catch (const json::exception &e) {
            throw DataError(where + ": bad article record: " + e.what());
        }
        if (a.doc.id.empty() || a.doc.lang.empty())
            throw DataError(where + ": document id and lang must be nonempty");
        arts.push_back(std::move(a));
    }
    return arts;
}

eventlink::LinkTable load_link_table(const std::vector<std::string> &paths) {
    eventlink::LinkTable table;
    for (const std::string &path : paths) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open link file: " + path);
        std::string line;
        if (!std::getline(in, line) || line.rfind("#langs:", 0) != 0)
            throw DataError(path + ": missing #langs: header row");
        auto head = split_tabs(line);
        if (head.size() != 3 || head[1].empty() || head[2].empty())
            throw DataError(path + ": header must name query and target language");
        const std::string tlang = head[2];
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const std::string where = path + ":" + std::to_string(lineno);
            auto cells = split_tabs(line);
            if (cells.size() != 4)
                throw DataError(where + ": expected query/rank/target/score");
            parse_u64(cells[1], where);  // rank column, informational
            table[cells[0]][tlang].push_back(
                {cells[2], parse_double(cells[3], where)});
        }
    }
    return table;
}

std::pair<std::vector<eventlink::Cluster>, std::map<std::uint64_t, std::size_t>>
load_all_clusters(const std::vector<std::string> &paths) {
    std::vector<eventlink::Cluster> all;
    std::map<std::uint64_t, std::size_t> by_id;
    for (const std::string &path : paths) {
        for (eventlink::Cluster &c : eventlink::load_clusters_jsonl(path)) {
            if (!by_id.emplace(c.id, all.size()).second)
                throw DataError(path + ": duplicate cluster id " +
                                std::to_string(c.id));
            all.push_back(std::move(c));
        }
    }
    return {std::move(all), std::move(by_id)};
}

const char *const kFeatureNames[9] = {
    "link_count",     "avg_sim_score",  "entity_cos",
    "keyword_cos",    "entity_jaccard", "keyword_jaccard",
    "same_location",  "time_diff_hours", "shared_dates",
};

std::vector<eventlink::TrainExample> load_feature_examples(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open feature file: " + path);
    std::vector<eventlink::TrainExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const std::string where = path + ":" + std::to_string(lineno);
        auto cells = split_tabs(line);
        if (cells.size() != 12)
            throw DataError(where + ": expected pair, 9 features and a label");
        std::array<double, 9> fv{};
        for (std::size_t k = 0; k < 9; ++k)
            fv[k] = parse_double(cells[2 + k], where);
        if (cells[11] != "0" && cells[11] != "1")
            throw DataError(where + ": label must be 0 or 1");
        out.push_back({eventlink::LinkFeatureVector::from_array(fv),
                       cells[11] == "1" ? 1 : 0});
    }
    return out;
}

}  // namespace xlem::cli
