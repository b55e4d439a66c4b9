// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/crypto.hpp"

#include <sodium.h>

#include <array>
#include <cstring>
#include <sstream>

namespace blockmark {

namespace {

constexpr char kHexDigits[] = "0123456789abcdef";

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) {
        throw std::runtime_error("libsodium initialization failed");
    }
}

void check_descriptor(const SchemeDescriptor& d) {
    if (d.hash_bits == 0 || d.hash_bits % 8 != 0 || d.hash_bits > 256) {
        throw std::invalid_argument("hash_bits must be a positive multiple of 8, at most 256");
    }
    if (d.alpha_den == 0 || d.alpha_num < d.alpha_den) {
        throw std::invalid_argument("alpha must be a rational >= 1");
    }
    if (d.signature_bytes == 0 || d.symmetric_key_bytes == 0) {
        throw std::invalid_argument("signature and key sizes must be positive");
    }
}

Bytes sha256(ByteView data) {
    Bytes out(crypto_hash_sha256_BYTES);
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

/// XOR `buf` with a keystream derived block-by-block from `block_fn`.
template <typename BlockFn>
void xor_keystream(Bytes& buf, std::size_t n, BlockFn block_fn) {
    std::uint64_t counter = 0;
    std::size_t pos = 0;
    while (pos < n) {
        Bytes block = block_fn(counter++);
        for (std::size_t i = 0; i < block.size() && pos < n; ++i, ++pos) {
            buf[pos] ^= block[i];
        }
    }
}

class StandardScheme final : public Scheme {
  public:
    explicit StandardScheme(SchemeDescriptor desc) : Scheme(std::move(desc)) {
        ensure_sodium();
        check_descriptor(desc_);
        if (desc_.signature_bytes != crypto_sign_BYTES + 1) {
            throw std::invalid_argument("standard scheme signatures are fixed at 65 bytes");
        }
        if (desc_.public_key_bytes != crypto_sign_PUBLICKEYBYTES) {
            throw std::invalid_argument("standard scheme public keys are fixed at 32 bytes");
        }
    }

    Digest hash(ByteView data) const override {
        Bytes full = sha256(data);
        full.resize(desc_.hash_bytes());
        return Digest{std::move(full)};
    }

    Bytes encrypt(const SymmetricKey& key, std::uint64_t chunk_index,
                  ByteView plaintext) const override {
        if (key.bytes.empty()) {
            throw std::invalid_argument("encrypt: empty key");
        }
        const std::uint64_t ct_len = desc_.ciphertext_bytes(plaintext.size());
        Bytes out(plaintext.begin(), plaintext.end());
        out.resize(ct_len, 0);  // expansion filler is pure keystream
        xor_keystream(out, out.size(), [&](std::uint64_t ctr) {
            return keystream_block(key, chunk_index, ctr);
        });
        return out;
    }

    Bytes decrypt(const SymmetricKey& key, std::uint64_t chunk_index,
                  ByteView ciphertext) const override {
        const std::uint64_t pt_len = plaintext_bytes(ciphertext.size());
        Bytes out(ciphertext.begin(), ciphertext.end());
        xor_keystream(out, pt_len, [&](std::uint64_t ctr) {
            return keystream_block(key, chunk_index, ctr);
        });
        out.resize(pt_len);
        return out;
    }

    SignatureKeyPair keypair_from_seed(ByteView seed) const override {
        std::array<std::uint8_t, crypto_sign_SEEDBYTES> s{};
        Bytes material = sha256(seed);
        std::memcpy(s.data(), material.data(), s.size());
        SignatureKeyPair kp;
        kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
        kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
        crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), s.data());
        return kp;
    }

    Signature sign(ByteView secret_key, ByteView message) const override {
        if (secret_key.size() != crypto_sign_SECRETKEYBYTES) {
            throw std::invalid_argument("sign: bad secret key length");
        }
        Bytes sig(crypto_sign_BYTES);
        crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                             secret_key.data());
        sig.push_back(0x00);  // fixed format byte, part of the 65-byte layout
        return Signature{std::move(sig)};
    }

    bool verify(ByteView public_key, ByteView message, const Signature& sig) const override {
        if (public_key.size() != crypto_sign_PUBLICKEYBYTES) {
            return false;
        }
        if (sig.bytes.size() != desc_.signature_bytes || sig.bytes.back() != 0x00) {
            return false;
        }
        return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                           public_key.data()) == 0;
    }

  private:
    Bytes keystream_block(const SymmetricKey& key, std::uint64_t chunk_index,
                          std::uint64_t counter) const {
        ByteWriter w;
        w.raw(key.bytes);
        w.u64(chunk_index);
        w.u64(counter);
        return sha256(w.bytes());
    }
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Digest-sized mix of arbitrary input. Good enough to make accidental
/// collisions vanish at test scale; trivially breakable on purpose.
Bytes toy_mix(ByteView data, std::size_t out_len) {
    std::uint64_t state = 0x243f6a8885a308d3ULL ^ (data.size() * 0x1000193ULL);
    for (std::size_t i = 0; i < data.size(); ++i) {
        state = splitmix64(state ^ (static_cast<std::uint64_t>(data[i]) << (8 * (i % 8))));
    }
    Bytes out;
    out.reserve(out_len);
    std::uint64_t v = state;
    while (out.size() < out_len) {
        v = splitmix64(v);
        for (int i = 0; i < 8 && out.size() < out_len; ++i) {
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    return out;
}

class ToyScheme final : public Scheme {
  public:
    explicit ToyScheme(SchemeDescriptor desc) : Scheme(std::move(desc)) {
        check_descriptor(desc_);
    }

    Digest hash(ByteView data) const override {
        return Digest{toy_mix(data, desc_.hash_bytes())};
    }

    Bytes encrypt(const SymmetricKey& key, std::uint64_t chunk_index,
                  ByteView plaintext) const override {
        if (key.bytes.empty()) {
            throw std::invalid_argument("encrypt: empty key");
        }
        const std::uint64_t ct_len = desc_.ciphertext_bytes(plaintext.size());
        Bytes out(plaintext.begin(), plaintext.end());
        out.resize(ct_len, 0);
        xor_keystream(out, out.size(), [&](std::uint64_t ctr) {
            return keystream_block(key, chunk_index, ctr);
        });
        return out;
    }

    Bytes decrypt(const SymmetricKey& key, std::uint64_t chunk_index,
                  ByteView ciphertext) const override {
        const std::uint64_t pt_len = plaintext_bytes(ciphertext.size());
        Bytes out(ciphertext.begin(), ciphertext.end());
        xor_keystream(out, pt_len, [&](std::uint64_t ctr) {
            return keystream_block(key, chunk_index, ctr);
        });
        out.resize(pt_len);
        return out;
    }

    SignatureKeyPair keypair_from_seed(ByteView seed) const override {
        SignatureKeyPair kp;
        kp.secret_key = toy_mix(seed, 32);
        ByteWriter w;
        w.u8(0x70);  // 'p' domain tag
        w.raw(kp.secret_key);
        kp.public_key = toy_mix(w.bytes(), desc_.public_key_bytes);
        return kp;
    }

    Signature sign(ByteView secret_key, ByteView message) const override {
        ByteWriter w;
        w.u8(0x70);
        w.raw(secret_key);
        Bytes pub = toy_mix(w.bytes(), desc_.public_key_bytes);
        return Signature{tag(pub, message)};
    }

    bool verify(ByteView public_key, ByteView message, const Signature& sig) const override {
        if (public_key.size() != desc_.public_key_bytes) {
            return false;
        }
        return sig.bytes == tag(public_key, message);
    }

  private:
    Bytes tag(ByteView public_key, ByteView message) const {
        ByteWriter w;
        w.u8(0x73);  // 's' domain tag
        w.raw(public_key);
        w.raw(message);
        return toy_mix(w.bytes(), desc_.signature_bytes);
    }

    Bytes keystream_block(const SymmetricKey& key, std::uint64_t chunk_index,
                          std::uint64_t counter) const {
        ByteWriter w;
        w.raw(key.bytes);
        w.u64(chunk_index);
        w.u64(counter);
        return toy_mix(w.bytes(), 32);
    }
};

}  // namespace

std::string SchemeDescriptor::to_string() const {
    std::ostringstream os;
    os << name << " h=" << hash_bits << " alpha=" << alpha_num << "/" << alpha_den
       << " sig_bytes=" << signature_bytes << " key_bytes=" << symmetric_key_bytes;
    return os.str();
}

std::string to_hex(ByteView data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(const std::string& hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    if (hex.size() % 2 != 0) {
        throw std::invalid_argument("from_hex: odd length");
    }
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]);
        int lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            throw std::invalid_argument("from_hex: bad digit");
        }
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

SymmetricKey Scheme::symmetric_key_from_seed(ByteView seed) const {
    Bytes material;
    {
        ByteWriter w;
        w.u8(0x6b);  // 'k' domain tag
        w.raw(seed);
        material = hash(w.bytes()).bytes;
    }
    while (material.size() < desc_.symmetric_key_bytes) {
        ByteWriter w;
        w.raw(material);
        Bytes more = hash(w.bytes()).bytes;
        material.insert(material.end(), more.begin(), more.end());
    }
    material.resize(desc_.symmetric_key_bytes);
    SymmetricKey key{std::move(material), {}};
    key.key_id = "k-" + to_hex(hash(key.bytes).bytes).substr(0, 8);
    return key;
}

std::uint64_t Scheme::plaintext_bytes(std::uint64_t ciphertext_len) const {
    // ceil(num*n/den) == c has at most one solution n for alpha >= 1.
    const std::uint64_t n = ciphertext_len * desc_.alpha_den / desc_.alpha_num;
    if (desc_.ciphertext_bytes(n) != ciphertext_len) {
        throw std::invalid_argument("decrypt: ciphertext length inconsistent with alpha");
    }
    return n;
}

std::shared_ptr<const Scheme> make_standard_scheme(SchemeDescriptor desc) {
    return std::make_shared<StandardScheme>(std::move(desc));
}

std::shared_ptr<const Scheme> make_toy_scheme(SchemeDescriptor desc) {
    return std::make_shared<ToyScheme>(std::move(desc));
}

std::shared_ptr<const Scheme> make_scheme(const SchemeDescriptor& desc) {
    if (desc.name == "sha256-ed25519") {
        return make_standard_scheme(desc);
    }
    if (desc.name == "toy") {
        return make_toy_scheme(desc);
    }
    throw std::invalid_argument("unknown scheme: " + desc.name);
}

SchemeDescriptor default_descriptor() {
    SchemeDescriptor d;
    d.name = "sha256-ed25519";
    return d;
}

}  // namespace blockmark
