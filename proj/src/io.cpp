#include "xlem/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xlem/error.hpp"

namespace xlem::io {

using nlohmann::json;

std::vector<textvec::Document> load_documents_jsonl(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open document file: " + path);
    std::vector<textvec::Document> docs;
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
        textvec::Document d;
        try {
            d.id = j.at("id").get<std::string>();
            d.lang = j.at("lang").get<std::string>();
            d.tokens = j.at("tokens").get<std::vector<std::string>>();
            if (j.contains("timestamp") && !j["timestamp"].is_null())
                d.timestamp = j["timestamp"].get<std::int64_t>();
        } catch (const json::exception &e) {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": bad document record: " + e.what());
        }
        if (d.id.empty() || d.lang.empty())
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": document id and lang must be nonempty");
        docs.push_back(std::move(d));
    }
    return docs;
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

void save_vocabulary(const textvec::Vocabulary &v, const std::string &path) {
    std::ostringstream out;
    out << "#n_docs=" << v.n_docs << "\n";
    for (const auto &[term, index] : v.term_to_index)
        out << term << '\t' << index << '\t' << v.df[index] << "\n";
    write_file_atomic(path, out.str());
}

textvec::Vocabulary load_vocabulary(const std::string &path,
                                    const std::string &lang) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open vocabulary file: " + path);
    textvec::Vocabulary v;
    v.lang = lang;
    std::string line;
    if (!std::getline(in, line) || line.rfind("#n_docs=", 0) != 0)
        throw FormatError(path + ": missing #n_docs= header");
    try {
        v.n_docs = std::stoull(line.substr(8));
    } catch (...) {
        throw FormatError(path + ": bad #n_docs= header");
    }
    std::size_t lineno = 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;  // index, df
    std::vector<std::string> terms;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) +
                              ": expected term<TAB>index<TAB>df");
        terms.push_back(line.substr(0, t1));
        try {
            entries.emplace_back(std::stoul(line.substr(t1 + 1, t2 - t1 - 1)),
                                 std::stoul(line.substr(t2 + 1)));
        } catch (...) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    v.df.assign(terms.size(), 0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto [index, dfc] = entries[i];
        if (index >= terms.size())
            throw FormatError(path + ": index " + std::to_string(index) +
                              " out of range");
        if (!v.term_to_index.emplace(terms[i], index).second)
            throw FormatError(path + ": duplicate term '" + terms[i] + "'");
        if (v.df[index] != 0)
            throw FormatError(path + ": duplicate index " + std::to_string(index));
        v.df[index] = dfc;
    }
    return v;
}

std::uint64_t vocabulary_hash(const textvec::Vocabulary &v) {
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    auto mix = [&h](const char *data, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(data[i]);
            h *= 1099511628211ull;  // FNV prime
        }
    };
    char buf[32];
    int n = std::snprintf(buf, sizeof buf, "%llu\n",
                          static_cast<unsigned long long>(v.n_docs));
    mix(buf, static_cast<std::size_t>(n));
    for (const auto &[term, index] : v.term_to_index) {
        mix(term.data(), term.size());
        n = std::snprintf(buf, sizeof buf, "\t%u\t%u\n", index, v.df[index]);
        mix(buf, static_cast<std::size_t>(n));
    }
    return h;
}

AtomicFile::AtomicFile(const std::string &path)
    : path_(path), tmp_(path + ".tmp") {
    std::ofstream out(tmp_, std::ios::binary | std::ios::trunc);  // clear stale temp
    if (!out) throw DataError("cannot create " + tmp_);
}

AtomicFile::~AtomicFile() {
    if (!committed_) std::remove(tmp_.c_str());
}

void AtomicFile::write(const std::string &data) {
    std::ofstream out(tmp_, std::ios::binary | std::ios::app);
    if (!out) throw DataError("cannot write to " + tmp_);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw DataError("write failed on " + tmp_);
}

void AtomicFile::commit() {
    if (std::rename(tmp_.c_str(), path_.c_str()) != 0)
        throw DataError("cannot rename " + tmp_ + " to " + path_);
    committed_ = true;
}

void write_file_atomic(const std::string &path, const std::string &content) {
    AtomicFile f(path);
    f.write(content);
    f.commit();
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<std::string> split_tabs(const std::string &line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cells;
}

}  // namespace

AlignmentFile load_alignment(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open alignment file: " + path);
    AlignmentFile a;
    std::string line;
    if (!std::getline(in, line) || line.rfind("#langs:", 0) != 0)
        throw FormatError(path + ": missing #langs: header row");
    auto head = split_tabs(line);
    for (std::size_t i = 1; i < head.size(); ++i) {
        if (head[i].empty()) throw FormatError(path + ": empty language in header");
        a.langs.push_back(head[i]);
    }
    if (a.langs.size() < 2) throw FormatError(path + ": need at least two languages");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() != a.langs.size())
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(a.langs.size()) + " cells, got " +
                              std::to_string(cells.size()));
        a.rows.push_back(std::move(cells));
    }
    return a;
}

void save_alignment(const AlignmentFile &a, const std::string &path) {
    std::ostringstream out;
    out << "#langs:";
    for (const auto &l : a.langs) out << '\t' << l;
    out << "\n";
    for (const auto &row : a.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << '\t';
            out << row[i];
        }
        out << "\n";
    }
    write_file_atomic(path, out.str());
}

void save_triplet_matrix(const numkit::CscMatrix &m, const std::string &path) {
    std::ostringstream out;
    out << "dims " << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << "\n";
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t t = m.col_begin(j); t < m.col_end(j); ++t)
            out << m.row_at(t) << '\t' << j << '\t' << format_double(m.value_at(t))
                << "\n";
    write_file_atomic(path, out.str());
}

numkit::CscMatrix load_triplet_matrix(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open matrix file: " + path);
    std::string word;
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(in >> word >> rows >> cols >> nnz) || word != "dims")
        throw FormatError(path + ": missing dims header");
    std::vector<numkit::Triplet> trips;
    trips.reserve(nnz);
    std::uint32_t r = 0, c = 0;
    double v = 0.0;
    for (std::size_t i = 0; i < nnz; ++i) {
        if (!(in >> r >> c >> v))
            throw FormatError(path + ": truncated at entry " + std::to_string(i));
        trips.push_back({r, c, v});
    }
    return numkit::CscMatrix::from_triplets(rows, cols, trips);
}

void save_corpus(const corpus::ComparableCorpus &c, const std::string &dir) {
    std::filesystem::create_directories(dir);
    {
        std::ostringstream out;
        for (const auto &l : c.langs) out << l << "\n";
        write_file_atomic(dir + "/langs.txt", out.str());
    }
    for (std::size_t i = 0; i < c.m(); ++i) {
        save_vocabulary(c.vocabs[i], dir + "/vocab_" + c.langs[i] + ".tsv");
        save_triplet_matrix(c.X[i], dir + "/matrix_" + c.langs[i] + ".txt");
    }
    {
        std::ostringstream out;
        for (std::size_t l = 0; l < c.s(); ++l) {
            for (std::size_t i = 0; i < c.m(); ++i) {
                if (i) out << ',';
                out << (c.present[i][l] ? '1' : '0');
            }
            out << "\n";
        }
        write_file_atomic(dir + "/presence.csv", out.str());
    }
    {
        std::ostringstream out;
        for (std::size_t l = 0; l < c.s(); ++l) {
            for (std::size_t i = 0; i < c.m(); ++i) {
                if (i) out << '\t';
                out << c.doc_ids[i][l];
            }
            out << "\n";
        }
        write_file_atomic(dir + "/doc_ids.tsv", out.str());
    }
}

corpus::ComparableCorpus load_corpus(const std::string &dir) {
    corpus::ComparableCorpus c;
    {
        std::ifstream in(dir + "/langs.txt");
        if (!in) throw DataError("cannot open " + dir + "/langs.txt");
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) c.langs.push_back(line);
    }
    if (c.langs.size() < 2) throw FormatError(dir + ": fewer than two languages");
    const std::size_t m = c.langs.size();
    for (std::size_t i = 0; i < m; ++i) {
        c.vocabs.push_back(
            load_vocabulary(dir + "/vocab_" + c.langs[i] + ".tsv", c.langs[i]));
        c.X.push_back(load_triplet_matrix(dir + "/matrix_" + c.langs[i] + ".txt"));
        if (c.X[i].rows() != c.vocabs[i].size())
            throw FormatError(dir + ": matrix rows do not match vocabulary for " +
                              c.langs[i]);
    }
    const std::size_t s = c.X[0].cols();
    for (std::size_t i = 0; i < m; ++i)
        if (c.X[i].cols() != s)
            throw FormatError(dir + ": inconsistent column counts across languages");
    {
        std::ifstream in(dir + "/presence.csv");
        if (!in) throw DataError("cannot open " + dir + "/presence.csv");
        c.present.assign(m, std::vector<std::uint8_t>(s, 0));
        std::string line;
        std::size_t l = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (l >= s) throw FormatError(dir + "/presence.csv: too many rows");
            std::size_t i = 0, pos = 0;
            while (pos < line.size() && i < m) {
                c.present[i][l] = line[pos] == '1';
                ++i;
                pos += 2;  // skip value + comma
            }
            if (i != m) throw FormatError(dir + "/presence.csv: short row");
            ++l;
        }
        if (l != s) throw FormatError(dir + "/presence.csv: row count mismatch");
    }
    {
        std::ifstream in(dir + "/doc_ids.tsv");
        if (!in) throw DataError("cannot open " + dir + "/doc_ids.tsv");
        c.doc_ids.assign(m, std::vector<std::string>(s));
        std::string line;
        std::size_t l = 0;
        while (std::getline(in, line)) {
            if (l >= s) {
                if (line.empty()) continue;
                throw FormatError(dir + "/doc_ids.tsv: too many rows");
            }
            auto cells = split_tabs(line);
            if (cells.size() != m)
                throw FormatError(dir + "/doc_ids.tsv: short row " + std::to_string(l));
            for (std::size_t i = 0; i < m; ++i) c.doc_ids[i][l] = cells[i];
            ++l;
        }
        if (l != s) throw FormatError(dir + "/doc_ids.tsv: row count mismatch");
    }
    return c;
}

namespace {

numkit::CscMatrix pairs_to_matrix(const corpus::TestPairList &list, bool first,
                                  std::size_t dim) {
    auto m = numkit::CscMatrix::empty_cols(dim);
    for (const auto &[x, y] : list) {
        const textvec::SparseVector &v = first ? x : y;
        m.push_col(v.idx, v.val);
    }
    return m;
}

}  // namespace

void save_test_pairs(const TestPairsFile &t, const std::string &dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream idx;
    for (const auto &e : t.entries) {
        idx << e.lang_i << '\t' << e.lang_j << '\t' << e.pairs.size() << "\n";
        const std::size_t dim_x = e.pairs.empty() ? 0 : e.pairs[0].first.dim;
        const std::size_t dim_y = e.pairs.empty() ? 0 : e.pairs[0].second.dim;
        save_triplet_matrix(pairs_to_matrix(e.pairs, true, dim_x),
                            dir + "/pair_" + e.lang_i + "_" + e.lang_j + "_x.txt");
        save_triplet_matrix(pairs_to_matrix(e.pairs, false, dim_y),
                            dir + "/pair_" + e.lang_i + "_" + e.lang_j + "_y.txt");
    }
    write_file_atomic(dir + "/pairs.tsv", idx.str());
}

TestPairsFile load_test_pairs(const std::string &dir) {
    std::ifstream in(dir + "/pairs.tsv");
    if (!in) throw DataError("cannot open " + dir + "/pairs.tsv");
    TestPairsFile t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_tabs(line);
        if (cells.size() != 3) throw FormatError(dir + "/pairs.tsv: bad row");
        TestPairsFile::Entry e;
        e.lang_i = cells[0];
        e.lang_j = cells[1];
        const std::size_t count = std::stoull(cells[2]);
        auto mx = load_triplet_matrix(dir + "/pair_" + e.lang_i + "_" + e.lang_j +
                                      "_x.txt");
        auto my = load_triplet_matrix(dir + "/pair_" + e.lang_i + "_" + e.lang_j +
                                      "_y.txt");
        if (mx.cols() != count || my.cols() != count)
            throw FormatError(dir + ": pair matrix column count mismatch for " +
                              e.lang_i + "/" + e.lang_j);
        for (std::size_t l = 0; l < count; ++l) {
            textvec::SparseVector x, y;
            x.dim = mx.rows();
            for (std::size_t k = mx.col_begin(l); k < mx.col_end(l); ++k) {
                x.idx.push_back(mx.row_at(k));
                x.val.push_back(mx.value_at(k));
            }
            y.dim = my.rows();
            for (std::size_t k = my.col_begin(l); k < my.col_end(l); ++k) {
                y.idx.push_back(my.row_at(k));
                y.val.push_back(my.value_at(k));
            }
            e.pairs.emplace_back(std::move(x), std::move(y));
        }
        t.entries.push_back(std::move(e));
    }
    return t;
}

}  // namespace xlem::io
