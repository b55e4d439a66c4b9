// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/chunk.hpp"

#include <cmath>

namespace blockmark {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::ON: return "on";
        case Variant::OLogN: return "ologn";
        case Variant::O1: return "o1";
    }
    return "?";
}

std::optional<Variant> parse_variant(const std::string& name) {
    if (name == "on") return Variant::ON;
    if (name == "ologn") return Variant::OLogN;
    if (name == "o1") return Variant::O1;
    return std::nullopt;
}

ChunkedData split(ByteView data, std::uint32_t chunk_bits) {
    if (data.empty()) {
        throw std::invalid_argument("split: empty data");
    }
    if (chunk_bits == 0 || chunk_bits % 8 != 0) {
        throw std::invalid_argument("split: chunk size must be a positive multiple of 8 bits");
    }
    const std::uint64_t chunk_bytes = chunk_bits / 8;
    ChunkedData out;
    out.original_len = data.size();
    out.chunk_bits = chunk_bits;
    const std::uint64_t count = ceil_div(data.size(), chunk_bytes);
    out.chunks.reserve(count);
    for (std::uint64_t m = 0; m < count; ++m) {
        const std::uint64_t begin = m * chunk_bytes;
        const std::uint64_t len = std::min<std::uint64_t>(chunk_bytes, data.size() - begin);
        Bytes chunk(data.begin() + begin, data.begin() + begin + len);
        chunk.resize(chunk_bytes, 0);  // zero-pad the final chunk
        out.chunks.push_back(std::move(chunk));
    }
    return out;
}

Bytes join(const ChunkedData& chunked) {
    Bytes out;
    out.reserve(chunked.chunks.size() * (chunked.chunk_bits / 8));
    for (const Bytes& chunk : chunked.chunks) {
        out.insert(out.end(), chunk.begin(), chunk.end());
    }
    out.resize(chunked.original_len);
    return out;
}

Bytes payload_leaf(const PayloadElement& element) {
    Bytes leaf = element.chunk_hash.bytes;
    leaf.insert(leaf.end(), element.ciphertext.begin(), element.ciphertext.end());
    return leaf;
}

std::vector<Bytes> payload_leaves(const OffchainPayload& payload) {
    std::vector<Bytes> leaves;
    leaves.reserve(payload.elements.size());
    for (const PayloadElement& e : payload.elements) {
        leaves.push_back(payload_leaf(e));
    }
    return leaves;
}

Digest certificate_root(const Scheme& scheme, Variant variant, const ChunkedData& chunked) {
    if (variant == Variant::ON) {
        return scheme.hash(join(chunked));
    }
    std::vector<Bytes> hash_leaves;
    hash_leaves.reserve(chunked.chunks.size());
    for (const Bytes& chunk : chunked.chunks) {
        hash_leaves.push_back(scheme.hash(chunk).bytes);
    }
    return merkle::Tree(scheme, hash_leaves).root();
}

Certificate make_certificate(const Scheme& scheme, Variant variant, const ChunkedData& chunked,
                             const SignatureKeyPair& certifier) {
    Certificate cert;
    cert.root = certificate_root(scheme, variant, chunked);
    cert.certifier_signature = scheme.sign(certifier.secret_key, cert.root.bytes);
    cert.chunk_bits = chunked.chunk_bits;
    cert.chunk_count = chunked.chunk_count();
    cert.original_len = chunked.original_len;
    cert.certifier_public_key = certifier.public_key;
    return cert;
}

bool certificate_valid(const Scheme& scheme, const Certificate& cert) {
    return scheme.verify(cert.certifier_public_key, cert.root.bytes, cert.certifier_signature);
}

OffchainPayload make_payload(const Scheme& scheme, Variant variant, const ChunkedData& chunked,
                             const SymmetricKey& key, const Bytes* seller_secret_key) {
    OffchainPayload payload;
    payload.variant = variant;
    if (variant == Variant::ON) {
        PayloadElement e;
        e.ciphertext = scheme.encrypt(key, 0, join(chunked));
        payload.elements.push_back(std::move(e));
        return payload;
    }
    if (variant == Variant::O1 && seller_secret_key == nullptr) {
        throw std::invalid_argument("make_payload: O(1) variant needs a seller signing key");
    }
    payload.elements.reserve(chunked.chunks.size());
    for (std::uint32_t m = 0; m < chunked.chunk_count(); ++m) {
        PayloadElement e;
        e.chunk_hash = scheme.hash(chunked.chunks[m]);
        e.ciphertext = scheme.encrypt(key, m, chunked.chunks[m]);
        if (variant == Variant::O1) {
            const Digest msg = scheme.hash(payload_leaf(e));
            e.signature = scheme.sign(*seller_secret_key, msg.bytes);
        }
        payload.elements.push_back(std::move(e));
    }
    return payload;
}

Bytes serialize_payload(const OffchainPayload& payload) {
    ByteWriter w;
    w.u8(static_cast<std::uint8_t>(payload.variant));
    w.u32(static_cast<std::uint32_t>(payload.elements.size()));
    for (const PayloadElement& e : payload.elements) {
        if (payload.variant != Variant::ON) {
            w.field(e.chunk_hash.bytes);
        }
        w.field(e.ciphertext);
        if (payload.variant == Variant::O1) {
            w.field(e.signature ? e.signature->bytes : Bytes{});
        }
    }
    return w.take();
}

OffchainPayload parse_payload(ByteView data) {
    ByteReader r(data);
    OffchainPayload payload;
    const std::uint8_t tag = r.u8();
    if (tag > 2) {
        throw std::runtime_error("payload: bad variant byte");
    }
    payload.variant = static_cast<Variant>(tag);
    const std::uint32_t count = r.u32();
    payload.elements.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        PayloadElement e;
        if (payload.variant != Variant::ON) {
            e.chunk_hash = Digest{r.field()};
        }
        e.ciphertext = r.field();
        if (payload.variant == Variant::O1) {
            e.signature = Signature{r.field()};
        }
        payload.elements.push_back(std::move(e));
    }
    if (!r.done()) {
        throw std::runtime_error("payload: trailing bytes");
    }
    return payload;
}

std::uint64_t payload_framing_bytes(Variant variant, std::uint32_t element_count) {
    const std::uint64_t fields = variant == Variant::ON ? 1 : variant == Variant::OLogN ? 2 : 3;
    return 5 + static_cast<std::uint64_t>(element_count) * 4 * fields;
}

double optimal_chunk_bits(std::uint32_t hash_bits, double alpha) {
    if (hash_bits == 0 || alpha < 1.0) {
        throw std::invalid_argument("optimal_chunk_bits: need h > 0 and alpha >= 1");
    }
    return static_cast<double>(hash_bits) / (alpha * std::log(2.0));
}

double dispute_cost_bits_continuous(std::uint64_t data_bits, double chunk_bits,
                                    std::uint32_t hash_bits, double alpha) {
    if (data_bits == 0 || chunk_bits <= 0.0) {
        throw std::invalid_argument("dispute_cost_bits_continuous: need N > 0 and L > 0");
    }
    const double levels = std::log2(static_cast<double>(data_bits) / chunk_bits) + 1.0;
    return levels * static_cast<double>(hash_bits) + alpha * chunk_bits;
}

std::uint64_t dispute_payload_bits(Variant variant, std::uint64_t data_bits,
                                   std::uint32_t chunk_bits, std::uint32_t hash_bits,
                                   std::uint32_t alpha_num, std::uint32_t alpha_den,
                                   std::uint32_t signature_bits) {
    if (data_bits == 0 || data_bits % 8 != 0) {
        throw std::invalid_argument("dispute_payload_bits: data size must be whole bytes");
    }
    if (alpha_den == 0 || alpha_num < alpha_den) {
        throw std::invalid_argument("dispute_payload_bits: alpha must be >= 1");
    }
    if (variant == Variant::ON) {
        return 8 * ceil_mul_div(data_bits / 8, alpha_num, alpha_den);
    }
    if (chunk_bits == 0 || chunk_bits % 8 != 0) {
        throw std::invalid_argument("dispute_payload_bits: chunk size must be whole bytes");
    }
    const std::uint64_t ct_bits = 8 * ceil_mul_div(chunk_bits / 8, alpha_num, alpha_den);
    if (variant == Variant::O1) {
        return hash_bits + ct_bits + signature_bits;
    }
    const std::uint64_t chunk_count = ceil_div(data_bits, chunk_bits);
    const std::uint64_t depth = ceil_log2(chunk_count);
    return (depth + 1) * hash_bits + ct_bits;
}

}  // namespace blockmark
