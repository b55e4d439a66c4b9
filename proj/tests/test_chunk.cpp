// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/chunk.hpp"
#include "blockmark/contract.hpp"

#include <doctest.h>

#include <cmath>

using namespace blockmark;

namespace {

std::shared_ptr<const Scheme> std_scheme() {
    return make_standard_scheme(default_descriptor());
}

}  // namespace

TEST_CASE("split basics") {
    Rng rng(31);
    const Bytes data = rng.bytes(1000);

    SUBCASE("whole data as one chunk") {
        const ChunkedData c = split(data, 8 * 1000);
        CHECK(c.chunk_count() == 1);
        CHECK(c.chunks[0] == data);
    }
    SUBCASE("1000 bytes at 256-bit chunks") {
        const ChunkedData c = split(data, 256);
        CHECK(c.chunk_count() == 32);
        CHECK(c.chunks.back().size() == 32);
        // 32*32 - 1000 = 24 zero-padding bytes
        for (std::size_t i = 8; i < 32; ++i) {
            CHECK(c.chunks.back()[i] == 0);
        }
        CHECK(join(c) == data);
    }
    SUBCASE("four chunks") {
        const Bytes d = rng.bytes(128);
        CHECK(split(d, 256).chunk_count() == 4);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(split({}, 256), std::invalid_argument);
        CHECK_THROWS_AS(split(data, 0), std::invalid_argument);
        CHECK_THROWS_AS(split(data, 12), std::invalid_argument);
    }
}

TEST_CASE("join is the inverse of split") {
    Rng rng(32);
    for (int trial = 0; trial < 1'000; ++trial) {
        const Bytes data = rng.bytes(1 + rng.below(500));
        const std::uint32_t chunk_bits = 8 * static_cast<std::uint32_t>(1 + rng.below(64));
        CHECK(join(split(data, chunk_bits)) == data);
    }
}

TEST_CASE("optimal chunk size") {
    const double l_star = optimal_chunk_bits(256, 1.0);
    CHECK(l_star == doctest::Approx(369.33).epsilon(0.0001));
    CHECK(optimal_chunk_bits(256, 2.0) == doctest::Approx(l_star / 2));

    // The stationary point does not move with the data size.
    for (std::uint64_t n : {1ULL << 16, 1ULL << 20, 1ULL << 24}) {
        std::uint64_t best_l = 0;
        double best = 1e30;
        for (std::uint64_t l = 16; l <= 2048; ++l) {
            const double c = dispute_cost_bits_continuous(n, static_cast<double>(l), 256, 1.0);
            if (c < best) {
                best = c;
                best_l = l;
            }
        }
        CHECK(std::llabs(static_cast<long long>(best_l) - 369) <= 8);
    }
}

TEST_CASE("dispute payload bits") {
    SUBCASE("constant variant hits 1032 bits") {
        for (std::uint64_t n = 1ULL << 10; n <= 1ULL << 24; n <<= 1) {
            CHECK(dispute_payload_bits(Variant::O1, n, 256, 256, 1, 1, 520) == 1032);
        }
    }
    SUBCASE("single chunk tree has an empty proof path") {
        CHECK(dispute_payload_bits(Variant::OLogN, 256, 256, 256, 1, 1, 520) == 256 + 256);
    }
    SUBCASE("full-ciphertext variant is linear") {
        CHECK(dispute_payload_bits(Variant::ON, 8000, 0, 256, 1, 1, 520) == 8000);
        CHECK(dispute_payload_bits(Variant::ON, 8000, 0, 256, 2, 1, 520) == 16000);
    }
    SUBCASE("one extra hash per doubling") {
        for (std::uint64_t n : {1ULL << 13, 3ULL << 12, 5ULL << 13, 1ULL << 20}) {
            const auto bits = dispute_payload_bits(Variant::OLogN, n, 256, 256, 1, 1, 0);
            const auto doubled = dispute_payload_bits(Variant::OLogN, 2 * n, 256, 256, 1, 1, 0);
            CHECK(doubled == bits + 256);
        }
    }
}

TEST_CASE("serialized dispute submission matches the formula plus framing") {
    auto scheme = std_scheme();
    Rng rng(33);
    const std::uint64_t data_bits = 1ULL << 20;
    const std::uint32_t chunk_bits = 368;  // byte-aligned near the optimum
    const Bytes data = rng.bytes(data_bits / 8);
    const ChunkedData chunked = split(data, chunk_bits);
    const SymmetricKey key = scheme->symmetric_key_from_seed(rng.bytes(32));
    const OffchainPayload payload = make_payload(*scheme, Variant::OLogN, chunked, key);

    merkle::Tree tree(*scheme, payload_leaves(payload));
    MerkleChunkEvidence e;
    e.chunk_hash = payload.elements[5].chunk_hash;
    e.ciphertext = payload.elements[5].ciphertext;
    e.proof = tree.prove(5);

    const std::uint64_t formula =
        dispute_payload_bits(Variant::OLogN, data_bits, chunk_bits, 256, 1, 1, 0);
    const Bytes wire = serialize_submission(e);
    CHECK(8 * wire.size() ==
          formula + 8 * dispute_framing_bytes(Variant::OLogN, e.proof.steps.size()));
}

TEST_CASE("payload size law") {
    auto scheme = std_scheme();
    Rng rng(34);
    const Bytes data = rng.bytes(1024);
    const ChunkedData chunked = split(data, 256);
    const SymmetricKey key = scheme->symmetric_key_from_seed(rng.bytes(32));
    const SignatureKeyPair kp = scheme->keypair_from_seed(rng.bytes(32));
    const std::uint64_t m = chunked.chunk_count();

    const auto measure = [&](Variant v) {
        return serialize_payload(
                   make_payload(*scheme, v, chunked, key, &kp.secret_key))
            .size();
    };
    CHECK(measure(Variant::OLogN) ==
          m * (32 + 32) + payload_framing_bytes(Variant::OLogN, m));
    CHECK(measure(Variant::O1) ==
          m * (32 + 32 + 65) + payload_framing_bytes(Variant::O1, m));
    CHECK(measure(Variant::ON) == 1024 + payload_framing_bytes(Variant::ON, 1));

    // Rational expansion rounds each ciphertext up to whole bytes.
    SchemeDescriptor d = default_descriptor();
    d.alpha_num = 3;
    d.alpha_den = 2;
    auto wide = make_standard_scheme(d);
    const std::uint64_t ct_len = (3 * 32 + 1) / 2;
    CHECK(serialize_payload(make_payload(*wide, Variant::OLogN, chunked, key)).size() ==
          m * (32 + ct_len) + payload_framing_bytes(Variant::OLogN, m));
}

TEST_CASE("payload round trip and errors") {
    auto scheme = std_scheme();
    Rng rng(35);
    const Bytes data = rng.bytes(300);
    const ChunkedData chunked = split(data, 256);
    const SymmetricKey key = scheme->symmetric_key_from_seed(rng.bytes(32));
    const SignatureKeyPair kp = scheme->keypair_from_seed(rng.bytes(32));

    CHECK_THROWS_AS(make_payload(*scheme, Variant::O1, chunked, key, nullptr),
                    std::invalid_argument);

    const OffchainPayload payload = make_payload(*scheme, Variant::O1, chunked, key,
                                                 &kp.secret_key);
    const OffchainPayload back = parse_payload(serialize_payload(payload));
    CHECK(back.variant == Variant::O1);
    REQUIRE(back.elements.size() == payload.elements.size());
    for (std::size_t i = 0; i < payload.elements.size(); ++i) {
        CHECK(back.elements[i].chunk_hash == payload.elements[i].chunk_hash);
        CHECK(back.elements[i].ciphertext == payload.elements[i].ciphertext);
        CHECK(back.elements[i].signature == payload.elements[i].signature);
    }
}

TEST_CASE("certificates bind the chunk geometry") {
    auto scheme = std_scheme();
    Rng rng(36);
    const Bytes data = rng.bytes(777);
    const ChunkedData chunked = split(data, 256);
    const SignatureKeyPair carol = scheme->keypair_from_seed(rng.bytes(32));

    const Certificate cert = make_certificate(*scheme, Variant::OLogN, chunked, carol);
    CHECK(certificate_valid(*scheme, cert));
    CHECK(cert.chunk_count == chunked.chunk_count());
    CHECK(cert.original_len == 777);

    Certificate tampered = cert;
    tampered.root.bytes[0] ^= 1;
    CHECK_FALSE(certificate_valid(*scheme, tampered));

    // The linear variant anchors the plain hash of the whole data.
    const Certificate on_cert = make_certificate(*scheme, Variant::ON, chunked, carol);
    CHECK(on_cert.root == scheme->hash(data));
}
