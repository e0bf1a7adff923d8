#include <array>
#include <cstring>

#include "xlem/binio.hpp"
#include "xlem/error.hpp"
#include "xlem/io.hpp"
#include "xlem/xmodels.hpp"

namespace xlem::binio {

namespace {

std::array<std::uint64_t, 256> make_crc_table() {
    std::array<std::uint64_t, 256> t{};
    const std::uint64_t poly = 0xC96C5795D7870F42ull;
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint64_t r = i;
        for (int b = 0; b < 8; ++b) r = (r >> 1) ^ ((r & 1) ? poly : 0);
        t[i] = r;
    }
    return t;
}

}  // namespace

std::uint64_t crc64(const unsigned char *data, std::size_t n) {
    static const auto table = make_crc_table();
    std::uint64_t crc = ~0ull;
    for (std::size_t i = 0; i < n; ++i)
        crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
    return ~crc;
}

}  // namespace xlem::binio

namespace xlem::models {

using numkit::DenseMatrix;

namespace {

constexpr char kMagic[4] = {'X', 'L', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_matrix(binio::Writer &w, const DenseMatrix &M) {
    w.u64(M.rows());
    w.u64(M.cols());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) w.f64(M(i, j));
}

DenseMatrix get_matrix(binio::Reader &r) {
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (rows > (1ull << 32) || cols > (1ull << 32))
        throw FormatError("model container: implausible matrix dimensions");
    DenseMatrix M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) M(i, j) = r.f64();
    return M;
}

}  // namespace

void save_model(const ProjectionModel &m, const std::string &path) {
    binio::Writer w;
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u32(static_cast<std::uint32_t>(m.method));
    w.u32(static_cast<std::uint32_t>(m.langs.size()));
    w.u32(m.k_lsi);
    w.u32(m.k_cca);
    w.f64(m.kappa);
    w.u64(m.seed);
    for (const auto &e : m.langs) {
        w.str(e.lang);
        w.u64(e.vocab_hash);
        if (m.method == Method::hubcca) {
            w.u32(2);
            put_matrix(w, e.V);
            put_matrix(w, e.W);
        } else {
            w.u32(1);
            put_matrix(w, e.P);
        }
    }
    binio::Writer framed;
    framed.bytes(w.buffer().data(), w.buffer().size());
    framed.u64(binio::crc64(w.buffer()));
    io::write_file_atomic(path, framed.buffer());
}

ProjectionModel load_model(const std::string &path) {
    const std::string buf = io::read_file(path);
    if (buf.size() < 4 + 4 + 8)
        throw FormatError(path + ": too short for a model container");
    const std::string body = buf.substr(0, buf.size() - 8);
    {
        // checksum first: corruption anywhere must be reported as such
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
        throw FormatError(path + ": not a model container (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw FormatError(path + ": unsupported container version " +
                          std::to_string(version));
    ProjectionModel m;
    const std::uint32_t method = r.u32();
    if (method > static_cast<std::uint32_t>(Method::hubcca))
        throw FormatError(path + ": unknown method tag");
    m.method = static_cast<Method>(method);
    const std::uint32_t nlangs = r.u32();
    m.k_lsi = r.u32();
    m.k_cca = r.u32();
    m.kappa = r.f64();
    m.seed = r.u64();
    for (std::uint32_t i = 0; i < nlangs; ++i) {
        LangEntry e;
        e.lang = r.str();
        e.vocab_hash = r.u64();
        const std::uint32_t nmats = r.u32();
        const std::uint32_t want = m.method == Method::hubcca ? 2 : 1;
        if (nmats != want)
            throw FormatError(path + ": wrong matrix count for method");
        if (m.method == Method::hubcca) {
            e.V = get_matrix(r);
            e.W = get_matrix(r);
        } else {
            e.P = get_matrix(r);
        }
        m.langs.push_back(std::move(e));
    }
    if (r.remaining() != 0)
        throw FormatError(path + ": trailing bytes after the last block");
    return m;
}

}  // namespace xlem::models
