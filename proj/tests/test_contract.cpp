// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/contract.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace blockmark;

namespace {

/// Prebuilt honest trade material for driving the contract by hand.
struct Fixture {
    std::shared_ptr<const Scheme> scheme = testsupport::standard_scheme();
    Bytes data;
    ChunkedData chunked;
    SignatureKeyPair carol;
    SignatureKeyPair seller;
    SymmetricKey key;
    Certificate cert;
    OffchainPayload payload;
    Digest commit_value;

    explicit Fixture(Variant variant, std::uint64_t seed = 41, std::size_t data_len = 256) {
        Rng rng(seed);
        data = rng.bytes(data_len);
        chunked = split(data, 256);
        carol = scheme->keypair_from_seed(rng.bytes(32));
        seller = scheme->keypair_from_seed(rng.bytes(32));
        key = scheme->symmetric_key_from_seed(rng.bytes(32));
        cert = make_certificate(*scheme, variant, chunked, carol);
        payload = make_payload(*scheme, variant, chunked, key, &seller.secret_key);
        if (variant == Variant::ON) {
            commit_value = scheme->hash(payload.elements[0].ciphertext);
        } else if (variant == Variant::OLogN) {
            commit_value = merkle::Tree(*scheme, payload_leaves(payload)).root();
        }
    }

    Contract fresh(Variant variant) const {
        Contract::Config config;
        config.variant = variant;
        return Contract(scheme, config);
    }

    /// Drives an honest trade up to KeyRevealed.
    void advance_to_reveal(Contract& c, Variant variant) const {
        REQUIRE(c.register_certificate(cert, 0));
        REQUIRE(c.buyer_intent_and_fund(cert.root, 1000, 300, 1));
        REQUIRE(c.seller_fund(500, seller.public_key, 2));
        if (variant != Variant::O1) {
            REQUIRE(c.commit(commit_value, 3));
        }
        REQUIRE(c.buyer_ack(true, 4));
        REQUIRE(c.reveal_key(key, 5));
    }

    DisputeSubmission genuine(Variant variant, std::uint32_t w) const {
        if (variant == Variant::ON) {
            return FullCiphertextEvidence{payload.elements[0].ciphertext};
        }
        if (variant == Variant::OLogN) {
            merkle::Tree tree(*scheme, payload_leaves(payload));
            return MerkleChunkEvidence{payload.elements[w].chunk_hash,
                                       payload.elements[w].ciphertext, tree.prove(w)};
        }
        return SignedChunkEvidence{w, payload.elements[w].chunk_hash,
                                   payload.elements[w].ciphertext,
                                   *payload.elements[w].signature};
    }
};

}  // namespace

TEST_CASE("happy path settles for the seller in every variant") {
    for (Variant v : {Variant::ON, Variant::OLogN, Variant::O1}) {
        CAPTURE(variant_name(v));
        Fixture fx(v);
        Contract c = fx.fresh(v);
        fx.advance_to_reveal(c, v);
        CHECK(c.phase() == Phase::KeyRevealed);
        REQUIRE(c.tick(c.grace_deadline() + 1));
        CHECK(c.phase() == Phase::Settled);
        CHECK(c.ledger().seller == c.config().seller_balance + 1000);
        CHECK(c.ledger().buyer == c.config().buyer_balance - 1000);
        CHECK(c.ledger().total() ==
              c.config().seller_balance + c.config().buyer_balance);
    }
}

TEST_CASE("buyer No refunds everyone") {
    Fixture fx(Variant::OLogN);
    Contract c = fx.fresh(Variant::OLogN);
    REQUIRE(c.register_certificate(fx.cert, 0));
    REQUIRE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1));
    REQUIRE(c.seller_fund(500, fx.seller.public_key, 2));
    REQUIRE(c.commit(fx.commit_value, 3));
    REQUIRE(c.buyer_ack(false, 4));
    CHECK(c.phase() == Phase::Refunded);
    CHECK(c.ledger().seller == c.config().seller_balance);
    CHECK(c.ledger().buyer == c.config().buyer_balance);
}

TEST_CASE("funding window expiry refunds at every pre-reveal phase") {
    for (Variant v : {Variant::ON, Variant::OLogN, Variant::O1}) {
        const int last_step = v == Variant::O1 ? 3 : 4;
        for (int stop = 1; stop <= last_step; ++stop) {
            CAPTURE(variant_name(v));
            CAPTURE(stop);
            Fixture fx(v);
            Contract c = fx.fresh(v);
            REQUIRE(c.register_certificate(fx.cert, 0));
            if (stop >= 1) c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1);
            if (stop >= 2) c.seller_fund(500, fx.seller.public_key, 2);
            if (v != Variant::O1 && stop >= 3) c.commit(fx.commit_value, 3);
            if (stop >= last_step) c.buyer_ack(true, 4);
            REQUIRE(c.tick(c.funding_deadline() + 1));
            CHECK(c.phase() == Phase::Refunded);
            CHECK(c.ledger().seller == c.config().seller_balance);
            CHECK(c.ledger().buyer == c.config().buyer_balance);
        }
    }
}

TEST_CASE("rejected actions leave no trace") {
    Fixture fx(Variant::OLogN);
    Contract c = fx.fresh(Variant::OLogN);

    CHECK_FALSE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 0));  // unregistered

    Certificate bad = fx.cert;
    bad.certifier_signature.bytes[3] ^= 0x40;
    CHECK_FALSE(c.register_certificate(bad, 0));
    CHECK_FALSE(c.registered());

    REQUIRE(c.register_certificate(fx.cert, 0));
    CHECK_FALSE(c.register_certificate(fx.cert, 0));  // immutable once set

    Digest wrong_root = fx.cert.root;
    wrong_root.bytes[0] ^= 1;
    CHECK_FALSE(c.buyer_intent_and_fund(wrong_root, 1000, 300, 1));
    CHECK_FALSE(c.buyer_intent_and_fund(fx.cert.root, 1'000'000'000, 300, 1));  // balance
    CHECK_FALSE(c.seller_fund(500, fx.seller.public_key, 1));  // wrong phase

    REQUIRE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1));
    CHECK_FALSE(c.seller_fund(0, fx.seller.public_key, 2));  // deposit must be positive
    REQUIRE(c.seller_fund(500, fx.seller.public_key, 2));
    CHECK_FALSE(c.buyer_ack(true, 3));  // commitment still missing
    REQUIRE(c.commit(fx.commit_value, 3));
    CHECK_FALSE(c.commit(fx.commit_value, 3));  // immutable once set
    CHECK_FALSE(c.reveal_key(fx.key, 4));       // needs the ack first
    REQUIRE(c.buyer_ack(true, 4));
    CHECK_FALSE(c.buyer_ack(true, 4));
    CHECK_FALSE(c.reveal_key(fx.key, 3));  // clock went backwards
    REQUIRE(c.reveal_key(fx.key, 5));

    CHECK(c.log().size() == 6);  // none of the rejections were billed
}

TEST_CASE("commit is absent from the constant-dispute variant") {
    Fixture fx(Variant::O1);
    Contract c = fx.fresh(Variant::O1);
    REQUIRE(c.register_certificate(fx.cert, 0));
    REQUIRE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1));
    REQUIRE(c.seller_fund(500, fx.seller.public_key, 2));
    CHECK_FALSE(c.commit(fx.commit_value, 3));
    REQUIRE(c.buyer_ack(true, 3));  // acks straight from the funded phase
}

TEST_CASE("dispute guards: first only, in the grace window, well-formed") {
    Fixture fx(Variant::O1);

    SUBCASE("second dispute rejected") {
        Contract c = fx.fresh(Variant::O1);
        fx.advance_to_reveal(c, Variant::O1);
        REQUIRE(c.dispute(fx.genuine(Variant::O1, 0), 6));
        CHECK(c.phase() == Phase::DisputeResolved);
        CHECK_FALSE(c.dispute(fx.genuine(Variant::O1, 1), 7));
    }
    SUBCASE("post-deadline dispute rejected, trade settles on the tick") {
        Contract c = fx.fresh(Variant::O1);
        fx.advance_to_reveal(c, Variant::O1);
        CHECK_FALSE(c.dispute(fx.genuine(Variant::O1, 0), c.grace_deadline() + 1));
        CHECK(c.phase() == Phase::KeyRevealed);  // rejection changes nothing
        REQUIRE(c.tick(c.grace_deadline() + 1));
        CHECK(c.phase() == Phase::Settled);
    }
    SUBCASE("wrong phase rejected") {
        Contract c = fx.fresh(Variant::O1);
        REQUIRE(c.register_certificate(fx.cert, 0));
        CHECK_FALSE(c.dispute(fx.genuine(Variant::O1, 0), 1));
    }
    SUBCASE("wrong variant and malformed widths rejected") {
        Contract c = fx.fresh(Variant::O1);
        fx.advance_to_reveal(c, Variant::O1);
        CHECK_FALSE(c.dispute(FullCiphertextEvidence{fx.payload.elements[0].ciphertext}, 6));
        SignedChunkEvidence bad = std::get<SignedChunkEvidence>(fx.genuine(Variant::O1, 0));
        bad.signature.bytes.pop_back();
        CHECK_FALSE(c.dispute(bad, 6));
        CHECK(c.phase() == Phase::KeyRevealed);
    }
}

TEST_CASE("adjudication branches") {
    SUBCASE("full ciphertext: commitment mismatch blames the buyer") {
        Fixture fx(Variant::ON);
        Contract c = fx.fresh(Variant::ON);
        fx.advance_to_reveal(c, Variant::ON);
        Rng rng(51);
        REQUIRE(c.dispute(FullCiphertextEvidence{rng.bytes(fx.data.size())}, 6));
        REQUIRE(c.verdict());
        CHECK(c.verdict()->dishonest == Party::Buyer);
    }
    SUBCASE("full ciphertext: genuine upload blames the buyer") {
        Fixture fx(Variant::ON);
        Contract c = fx.fresh(Variant::ON);
        fx.advance_to_reveal(c, Variant::ON);
        REQUIRE(c.dispute(fx.genuine(Variant::ON, 0), 6));
        CHECK(c.verdict()->dishonest == Party::Buyer);
    }
    SUBCASE("full ciphertext: committed-but-inconsistent blames the seller") {
        // The seller committed a ciphertext that does not decrypt to the
        // certified data; rebuild the trade around the tampered bytes.
        Fixture fx(Variant::ON);
        OffchainPayload tampered = fx.payload;
        tampered.elements[0].ciphertext[7] ^= 0x20;
        Contract c = fx.fresh(Variant::ON);
        REQUIRE(c.register_certificate(fx.cert, 0));
        REQUIRE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1));
        REQUIRE(c.seller_fund(500, fx.seller.public_key, 2));
        REQUIRE(c.commit(fx.scheme->hash(tampered.elements[0].ciphertext), 3));
        REQUIRE(c.buyer_ack(true, 4));
        REQUIRE(c.reveal_key(fx.key, 5));
        REQUIRE(c.dispute(FullCiphertextEvidence{tampered.elements[0].ciphertext}, 6));
        CHECK(c.verdict()->dishonest == Party::Seller);
        CHECK(c.ledger().buyer == c.config().buyer_balance + 500);
        CHECK(c.ledger().seller == c.config().seller_balance - 500);
    }
    SUBCASE("merkle: invalid proof blames the buyer") {
        Fixture fx(Variant::OLogN);
        Contract c = fx.fresh(Variant::OLogN);
        fx.advance_to_reveal(c, Variant::OLogN);
        auto sub = std::get<MerkleChunkEvidence>(fx.genuine(Variant::OLogN, 1));
        sub.proof.steps[0].sibling.bytes[0] ^= 1;
        REQUIRE(c.dispute(sub, 6));
        CHECK(c.verdict()->dishonest == Party::Buyer);
    }
    SUBCASE("merkle: real leaf under a wrong claimed hash blames the buyer") {
        Fixture fx(Variant::OLogN);
        Contract c = fx.fresh(Variant::OLogN);
        fx.advance_to_reveal(c, Variant::OLogN);
        auto sub = std::get<MerkleChunkEvidence>(fx.genuine(Variant::OLogN, 2));
        sub.chunk_hash.bytes[4] ^= 0x08;  // the leaf no longer matches the tree
        REQUIRE(c.dispute(sub, 6));
        CHECK(c.verdict()->dishonest == Party::Buyer);
    }
    SUBCASE("merkle: valid proof with decrypt mismatch blames the seller") {
        Fixture fx(Variant::OLogN);
        OffchainPayload tampered = fx.payload;
        tampered.elements[2].ciphertext[0] ^= 1;  // claimed hash left genuine
        const Digest root = merkle::Tree(*fx.scheme, payload_leaves(tampered)).root();
        Contract c = fx.fresh(Variant::OLogN);
        REQUIRE(c.register_certificate(fx.cert, 0));
        REQUIRE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1));
        REQUIRE(c.seller_fund(500, fx.seller.public_key, 2));
        REQUIRE(c.commit(root, 3));
        REQUIRE(c.buyer_ack(true, 4));
        REQUIRE(c.reveal_key(fx.key, 5));
        merkle::Tree tree(*fx.scheme, payload_leaves(tampered));
        REQUIRE(c.dispute(MerkleChunkEvidence{tampered.elements[2].chunk_hash,
                                              tampered.elements[2].ciphertext, tree.prove(2)},
                          6));
        CHECK(c.verdict()->dishonest == Party::Seller);
    }
    SUBCASE("signed chunk: genuine tuple blames the buyer") {
        Fixture fx(Variant::O1);
        Contract c = fx.fresh(Variant::O1);
        fx.advance_to_reveal(c, Variant::O1);
        REQUIRE(c.dispute(fx.genuine(Variant::O1, 3), 6));
        CHECK(c.verdict()->dishonest == Party::Buyer);
        CHECK(c.ledger().seller ==
              c.config().seller_balance + 1300);  // price plus the buyer deposit
    }
    SUBCASE("signed chunk: bad signature blames the buyer") {
        Fixture fx(Variant::O1);
        Contract c = fx.fresh(Variant::O1);
        fx.advance_to_reveal(c, Variant::O1);
        auto sub = std::get<SignedChunkEvidence>(fx.genuine(Variant::O1, 0));
        sub.chunk_hash.bytes[0] ^= 1;  // breaks the signed message
        REQUIRE(c.dispute(sub, 6));
        CHECK(c.verdict()->dishonest == Party::Buyer);
    }
}

TEST_CASE("adjudication compute is exactly metered") {
    SUBCASE("constant variant: one verify, one chunk decrypt, two hashes") {
        Fixture fx(Variant::O1);
        Contract c = fx.fresh(Variant::O1);
        fx.advance_to_reveal(c, Variant::O1);
        REQUIRE(c.dispute(fx.genuine(Variant::O1, 2), 6));
        const OpCounters& ops = c.onchain_footprint().adjudication;
        CHECK(ops.signature_verifies == 1);
        CHECK(ops.decrypt_bits == 256);  // alpha * L
        CHECK(ops.hashes == 2);
        CHECK(ops.merkle_fold_steps == 0);
    }
    SUBCASE("merkle variant: folds equal the proof depth") {
        Fixture fx(Variant::OLogN);  // 256 bytes -> 8 chunks -> depth 3
        Contract c = fx.fresh(Variant::OLogN);
        fx.advance_to_reveal(c, Variant::OLogN);
        REQUIRE(c.dispute(fx.genuine(Variant::OLogN, 5), 6));
        const OpCounters& ops = c.onchain_footprint().adjudication;
        CHECK(ops.merkle_fold_steps == 3);
        CHECK(ops.hashes == 3 + 2);  // leaf tag, folds, and the decrypt check
        CHECK(ops.decrypt_bits == 256);
        CHECK(ops.signature_verifies == 0);
    }
}

TEST_CASE("verdict evidence carries digests only") {
    Fixture fx(Variant::OLogN);
    Contract c = fx.fresh(Variant::OLogN);
    fx.advance_to_reveal(c, Variant::OLogN);
    REQUIRE(c.dispute(fx.genuine(Variant::OLogN, 0), 6));
    for (const auto& [label, value] : c.verdict()->evidence) {
        CAPTURE(label);
        CHECK(value.size() == 64);  // hex of one 256-bit digest
    }
}

TEST_CASE("on-chain footprint is constant until the dispute") {
    for (Variant v : {Variant::ON, Variant::OLogN, Variant::O1}) {
        CAPTURE(variant_name(v));
        std::uint64_t happy_bytes[2];
        int i = 0;
        for (std::size_t len : {256, 4096}) {
            Fixture fx(v, 42, len);
            Contract c = fx.fresh(v);
            fx.advance_to_reveal(c, v);
            REQUIRE(c.tick(c.grace_deadline() + 1));
            happy_bytes[i++] = c.onchain_footprint().onchain_bytes;
        }
        CHECK(happy_bytes[0] == happy_bytes[1]);  // independent of the data size

        Fixture fx(v, 42, 4096);
        Contract c = fx.fresh(v);
        fx.advance_to_reveal(c, v);
        REQUIRE(c.dispute(fx.genuine(v, 0), 6));
        const auto& cost = c.onchain_footprint();
        // Both runs share the same trading-phase uploads; the submission is
        // the only addition.
        CHECK(cost.onchain_bytes == happy_bytes[0] + cost.dispute_submission_bytes);
    }
}

TEST_CASE("replaying the action log reproduces the state byte for byte") {
    for (Variant v : {Variant::ON, Variant::OLogN, Variant::O1}) {
        CAPTURE(variant_name(v));

        SUBCASE("settled run") {
            Fixture fx(v);
            Contract c = fx.fresh(v);
            fx.advance_to_reveal(c, v);
            REQUIRE(c.tick(c.grace_deadline() + 1));
            Contract again = replay_log(fx.scheme, c.config(), c.log());
            CHECK(again.state_json() == c.state_json());
        }
        SUBCASE("disputed run") {
            Fixture fx(v);
            Contract c = fx.fresh(v);
            fx.advance_to_reveal(c, v);
            REQUIRE(c.dispute(fx.genuine(v, 0), 6));
            Contract again = replay_log(fx.scheme, c.config(), c.log());
            CHECK(again.state_json() == c.state_json());
        }
        SUBCASE("timed-out run") {
            Fixture fx(v);
            Contract c = fx.fresh(v);
            REQUIRE(c.register_certificate(fx.cert, 0));
            REQUIRE(c.buyer_intent_and_fund(fx.cert.root, 1000, 300, 1));
            REQUIRE(c.tick(c.funding_deadline() + 1));
            CHECK(c.phase() == Phase::Refunded);
            Contract again = replay_log(fx.scheme, c.config(), c.log());
            CHECK(again.state_json() == c.state_json());
        }
    }
}

TEST_CASE("action records survive their JSON line format") {
    Fixture fx(Variant::O1);
    Contract c = fx.fresh(Variant::O1);
    fx.advance_to_reveal(c, Variant::O1);
    REQUIRE(c.dispute(fx.genuine(Variant::O1, 1), 6));
    for (const ActionRecord& rec : c.log()) {
        const ActionRecord back = ActionRecord::from_json_line(rec.to_json_line());
        CHECK(back.to_json_line() == rec.to_json_line());
    }
}

TEST_CASE("coin conservation under random action sequences") {
    for (Variant v : {Variant::ON, Variant::OLogN, Variant::O1}) {
        CAPTURE(variant_name(v));
        const auto res = testsupport::random_action_sequences(v, 500, 7);
        CHECK_MESSAGE(res.ok, res.what);
    }
}
