#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>

#include "xlem/error.hpp"

namespace xlem::binio {

// CRC-64/XZ (reflected polynomial 0xC96C5795D7870F42, init and final xor
// all-ones). Used as the container trailer checksum.
std::uint64_t crc64(const unsigned char *data, std::size_t n);
inline std::uint64_t crc64(const std::string &s) {
    return crc64(reinterpret_cast<const unsigned char *>(s.data()), s.size());
}

// Little-endian append-only buffer writer.
class Writer {
  public:
    void u32(std::uint32_t v) {
        for (int b = 0; b < 4; ++b) buf_.push_back(char((v >> (8 * b)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) buf_.push_back(char((v >> (8 * b)) & 0xff));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void bytes(const void *p, std::size_t n) {
        buf_.append(static_cast<const char *>(p), n);
    }
    void str(const std::string &s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    const std::string &buffer() const { return buf_; }

  private:
    std::string buf_;
};

// Bounds-checked little-endian reader over a loaded buffer.
class Reader {
  public:
    Reader(const std::string &buf, std::string origin)
        : buf_(buf), origin_(std::move(origin)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 3; b >= 0; --b)
            v = (v << 8) | std::uint8_t(buf_[pos_ + std::size_t(b)]);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 7; b >= 0; --b)
            v = (v << 8) | std::uint8_t(buf_[pos_ + std::size_t(b)]);
        pos_ += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    void raw(void *out, std::size_t n) {
        need(n);
        std::memcpy(out, buf_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return buf_.size() - pos_; }

  private:
    void need(std::size_t n) const {
        if (buf_.size() - pos_ < n)
            throw FormatError(origin_ + ": truncated (need " + std::to_string(n) +
                              " bytes at offset " + std::to_string(pos_) + ")");
    }
    const std::string &buf_;
    std::string origin_;
    std::size_t pos_ = 0;
};

}  // namespace xlem::binio
