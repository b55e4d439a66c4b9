// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef BLOCKMARK_BYTES_HPP
#define BLOCKMARK_BYTES_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockmark {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(const std::string& s) {
    return Bytes(s.begin(), s.end());
}

std::string to_hex(ByteView data);
Bytes from_hex(const std::string& hex);

/// ceil(a * num / den) without overflow for the sizes this library handles.
inline std::uint64_t ceil_mul_div(std::uint64_t a, std::uint64_t num, std::uint64_t den) {
    if (den == 0) {
        throw std::invalid_argument("ceil_mul_div: zero denominator");
    }
    return (a * num + den - 1) / den;
}

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return (a + b - 1) / b;
}

/// Smallest d with 2^d >= n; 0 for n <= 1.
inline std::uint32_t ceil_log2(std::uint64_t n) {
    std::uint32_t d = 0;
    std::uint64_t cap = 1;
    while (cap < n) {
        cap <<= 1;
        ++d;
    }
    return d;
}

/// Big-endian wire encoder for on-chain payloads and file formats.
class ByteWriter {
  public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 7; i >= 0; --i) {
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void raw(ByteView data) { out_.insert(out_.end(), data.begin(), data.end()); }
    /// 4-byte length prefix followed by the bytes.
    void field(ByteView data) {
        u32(static_cast<std::uint32_t>(data.size()));
        raw(data);
    }

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

  private:
    Bytes out_;
};

/// Bounds-checked decoder matching ByteWriter. Throws on truncated input.
class ByteReader {
  public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8() { return take(1)[0]; }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v = (v << 8) | b[i];
        }
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v = (v << 8) | b[i];
        }
        return v;
    }
    Bytes raw(std::size_t n) {
        auto b = take(n);
        return Bytes(b.begin(), b.end());
    }
    Bytes field() { return raw(u32()); }

    bool done() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

  private:
    ByteView take(std::size_t n) {
        if (pos_ + n > data_.size()) {
            throw std::runtime_error("ByteReader: truncated input");
        }
        ByteView v = data_.subspan(pos_, n);
        pos_ += n;
        return v;
    }

    ByteView data_;
    std::size_t pos_ = 0;
};

/// Deterministic byte stream for data generation and key material.
/// mt19937_64 raw output is pinned by the standard, so transcripts are
/// reproducible across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    Bytes bytes(std::size_t n) {
        Bytes out;
        out.reserve(n);
        while (out.size() < n) {
            std::uint64_t v = next_u64();
            for (int i = 0; i < 8 && out.size() < n; ++i) {
                out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
            }
        }
        return out;
    }

    /// Independent child stream; used to keep actor randomness decoupled.
    Rng fork(std::uint64_t label) { return Rng(next_u64() ^ (label * 0x9e3779b97f4a7c15ULL)); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace blockmark

#endif  // BLOCKMARK_BYTES_HPP
