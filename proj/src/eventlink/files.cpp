#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xlem/binio.hpp"
#include "xlem/error.hpp"
#include "xlem/eventlink.hpp"
#include "xlem/io.hpp"

namespace xlem::eventlink {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'X', 'L', 'N', 'K'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_linker(const LinearModel &m, const std::string &path) {
    binio::Writer w;
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.f64(m.C);
    w.u64(m.seed);
    for (double v : m.weights) w.f64(v);
    w.f64(m.bias);
    for (double v : m.mean) w.f64(v);
    for (double v : m.inv_scale) w.f64(v);
    binio::Writer framed;
    framed.bytes(w.buffer().data(), w.buffer().size());
    framed.u64(binio::crc64(w.buffer()));
    io::write_file_atomic(path, framed.buffer());
}

LinearModel load_linker(const std::string &path) {
    const std::string buf = io::read_file(path);
    if (buf.size() < 4 + 4 + 8)
        throw FormatError(path + ": too short for a linker container");
    const std::string body = buf.substr(0, buf.size() - 8);
    {
        std::uint64_t want = 0;
        for (int b = 7; b >= 0; --b)
            want = (want << 8) | std::uint8_t(buf[buf.size() - 8 + std::size_t(b)]);
        if (binio::crc64(body) != want)
            throw FormatError(path + ": checksum mismatch");
    }
    binio::Reader r(body, path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(path + ": not a linker container (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError(path + ": unsupported container version " +
                          std::to_string(version));
    LinearModel m;
    m.C = r.f64();
    m.seed = r.u64();
    for (double &v : m.weights) v = r.f64();
    m.bias = r.f64();
    for (double &v : m.mean) v = r.f64();
    for (double &v : m.inv_scale) v = r.f64();
    if (r.remaining() != 0)
        throw FormatError(path + ": trailing bytes after the last block");
    return m;
}

void save_clusters_jsonl(const std::vector<Cluster> &clusters,
                         const std::string &path) {
    std::ostringstream out;
    for (const Cluster &c : clusters) {
        json j;
        j["id"] = c.id;
        j["lang"] = c.lang;
        j["article_ids"] = c.article_ids;
        j["entities"] = c.entities;
        j["keywords"] = c.keywords;
        j["location"] = c.location ? json(*c.location) : json(nullptr);
        j["avg_ts"] = static_cast<std::int64_t>(std::llround(c.avg_ts));
        j["oldest_ts"] = c.oldest_ts;
        j["dates"] = c.dates;
        out << j.dump() << '\n';
    }
    io::write_file_atomic(path, out.str());
}

std::vector<Cluster> load_clusters_jsonl(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open clusters file: " + path);
    std::vector<Cluster> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": bad JSON: " + e.what());
        }
        Cluster c;
        try {
            c.id = j.at("id").get<std::uint64_t>();
            c.lang = j.at("lang").get<std::string>();
            c.article_ids = j.at("article_ids").get<std::vector<std::string>>();
            c.entities = j.at("entities").get<std::map<std::string, double>>();
            c.keywords = j.at("keywords").get<std::map<std::string, double>>();
            if (!j.at("location").is_null())
                c.location = j["location"].get<std::string>();
            c.avg_ts = static_cast<double>(j.at("avg_ts").get<std::int64_t>());
            c.oldest_ts = j.at("oldest_ts").get<std::int64_t>();
            c.dates = j.at("dates").get<std::set<std::string>>();
        } catch (const json::exception &e) {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": bad cluster record: " + e.what());
        }
        if (c.article_ids.empty())
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": cluster without articles");
        out.push_back(std::move(c));
    }
    return out;
}

void save_labelled_pairs(const std::vector<LabelledPair> &pairs,
                         const std::string &path) {
    std::ostringstream out;
    for (const auto &p : pairs)
        out << p.a << '\t' << p.b << '\t' << (p.label ? 1 : 0) << '\n';
    io::write_file_atomic(path, out.str());
}

std::vector<LabelledPair> load_labelled_pairs(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open labelled pairs file: " + path);
    std::vector<LabelledPair> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        LabelledPair p;
        char extra;
        std::istringstream row(line);
        int label = -1;
        if (!(row >> p.a >> p.b >> label) || (label != 0 && label != 1) ||
            (row >> extra))
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": expected `a<TAB>b<TAB>0|1`");
        p.label = label;
        out.push_back(p);
    }
    return out;
}

}  // namespace xlem::eventlink
