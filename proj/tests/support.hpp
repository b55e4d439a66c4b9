// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

// Shared helpers for the unit and acceptance suites.

#ifndef BLOCKMARK_TESTS_SUPPORT_HPP
#define BLOCKMARK_TESTS_SUPPORT_HPP

#include "blockmark/contract.hpp"
#include "blockmark/sim.hpp"

#include <sstream>
#include <string>

namespace blockmark::testsupport {

inline std::shared_ptr<const Scheme> standard_scheme() {
    return make_standard_scheme(default_descriptor());
}

struct CheckResult {
    bool ok = true;
    std::string what;
};

/// Feeds `sequences` random action sequences into fresh contracts and checks,
/// after every single call, that coins are conserved, nothing goes negative,
/// and rejected actions leave the observable state untouched.
inline CheckResult random_action_sequences(Variant variant, std::uint64_t sequences,
                                           std::uint64_t base_seed) {
    auto scheme = standard_scheme();
    Rng setup(base_seed);
    const Bytes data = setup.bytes(256);
    const ChunkedData chunked = split(data, 256);
    const SignatureKeyPair carol = scheme->keypair_from_seed(setup.bytes(32));
    const SignatureKeyPair seller = scheme->keypair_from_seed(setup.bytes(32));
    const SymmetricKey key = scheme->symmetric_key_from_seed(setup.bytes(32));
    const Certificate cert = make_certificate(*scheme, variant, chunked, carol);
    const OffchainPayload payload =
        make_payload(*scheme, variant, chunked, key, &seller.secret_key);
    const Digest commit_value = variant == Variant::ON
        ? scheme->hash(payload.elements[0].ciphertext)
        : merkle::Tree(*scheme, payload_leaves(payload)).root();

    for (std::uint64_t s = 0; s < sequences; ++s) {
        Rng rng(base_seed * 1'000'003 + s);
        Contract::Config config;
        config.variant = variant;
        config.funding_window = 100;
        config.grace_window = 50;
        config.seller_balance = 1000 + static_cast<std::int64_t>(rng.below(1000));
        config.buyer_balance = 2000 + static_cast<std::int64_t>(rng.below(1000));
        Contract contract(scheme, config);
        const std::int64_t initial_total = contract.ledger().total();
        std::uint64_t now = 0;

        const std::uint64_t steps = 6 + rng.below(14);
        for (std::uint64_t i = 0; i < steps; ++i) {
            now += rng.below(40);
            const std::string before = contract.state_json();
            ActionResult res{true, {}};
            switch (rng.below(9)) {
                case 0: {
                    Certificate c = cert;
                    if (rng.below(4) == 0) {
                        c.certifier_signature.bytes[0] ^= 0xff;  // bad signature
                    }
                    res = contract.register_certificate(c, now);
                    break;
                }
                case 1: {
                    Digest root = cert.root;
                    if (rng.below(4) == 0) {
                        root.bytes[0] ^= 0x01;
                    }
                    res = contract.buyer_intent_and_fund(
                        root, static_cast<std::int64_t>(rng.below(3000)),
                        static_cast<std::int64_t>(rng.below(1500)), now);
                    break;
                }
                case 2:
                    res = contract.seller_fund(static_cast<std::int64_t>(rng.below(2500)),
                                               seller.public_key, now);
                    break;
                case 3: {
                    Digest value = commit_value;
                    if (rng.below(4) == 0) {
                        value.bytes[0] ^= 0x01;
                    }
                    res = contract.commit(value, now);
                    break;
                }
                case 4:
                    res = contract.buyer_ack(rng.below(4) != 0, now);
                    break;
                case 5:
                    res = contract.reveal_key(key, now);
                    break;
                case 6: {
                    DisputeSubmission sub = [&]() -> DisputeSubmission {
                        const std::uint32_t w =
                            static_cast<std::uint32_t>(rng.below(chunked.chunk_count()));
                        switch (variant) {
                            case Variant::ON:
                                return FullCiphertextEvidence{rng.bytes(data.size())};
                            case Variant::OLogN: {
                                merkle::Tree tree(*scheme, payload_leaves(payload));
                                MerkleChunkEvidence e;
                                e.chunk_hash = payload.elements[w].chunk_hash;
                                e.ciphertext = payload.elements[w].ciphertext;
                                e.proof = tree.prove(w);
                                return e;
                            }
                            default: {
                                SignedChunkEvidence e;
                                e.chunk_index = w;
                                e.chunk_hash = payload.elements[w].chunk_hash;
                                e.ciphertext = payload.elements[w].ciphertext;
                                e.signature = *payload.elements[w].signature;
                                return e;
                            }
                        }
                    }();
                    res = contract.dispute(sub, now);
                    break;
                }
                case 7:
                    res = contract.tick(now);
                    break;
                default:
                    res = contract.tick(now + rng.below(200));
                    break;
            }

            const Ledger& led = contract.ledger();
            if (led.total() != initial_total) {
                std::ostringstream os;
                os << "conservation violated: seq " << s << " step " << i << " total "
                   << led.total() << " vs " << initial_total;
                return {false, os.str()};
            }
            if (led.seller < 0 || led.buyer < 0 || led.target.amount < 0 ||
                led.deposit_a.amount < 0 || led.deposit_b.amount < 0) {
                return {false, "negative balance or escrow"};
            }
            if (!res.accepted && contract.state_json() != before) {
                return {false, "rejected action mutated state: " + res.reason};
            }
        }
    }
    return {};
}

}  // namespace blockmark::testsupport

#endif  // BLOCKMARK_TESTS_SUPPORT_HPP
