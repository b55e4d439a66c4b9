// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/sim.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace blockmark::sim {

namespace {

using nlohmann::json;

constexpr std::uint64_t kRegisterTick = 0;
constexpr std::uint64_t kBuyerFundTick = 1;
constexpr std::uint64_t kSellerFundTick = 2;
constexpr std::uint64_t kPayloadTick = 3;
constexpr std::uint64_t kCommitTick = 4;
constexpr std::uint64_t kAckTick = 5;
constexpr std::uint64_t kRevealTick = 6;
constexpr std::uint64_t kDisputeTick = 7;

constexpr std::uint64_t kRollBase = 0x100000001b3ULL;

std::uint64_t roll_hash(const std::uint8_t* p, std::size_t len) {
    std::uint64_t h = 0;
    for (std::size_t i = 0; i < len; ++i) {
        h = h * kRollBase + p[i];
    }
    return h;
}

/// Rabin-Karp multi-pattern search: marks which needles occur in any record
/// payload. Keeps the scan linear in the on-chain byte volume even for runs
/// with tens of thousands of chunks.
std::vector<bool> find_needles(const std::vector<ActionRecord>& log,
                               const std::vector<Bytes>& needles) {
    std::vector<bool> seen(needles.size(), false);
    std::map<std::size_t, std::unordered_map<std::uint64_t, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < needles.size(); ++i) {
        if (!needles[i].empty()) {
            groups[needles[i].size()][roll_hash(needles[i].data(), needles[i].size())]
                .push_back(i);
        }
    }
    for (const ActionRecord& rec : log) {
        const Bytes& hay = rec.payload;
        for (const auto& [len, by_hash] : groups) {
            if (len > hay.size()) {
                continue;
            }
            std::uint64_t pow = 1;
            for (std::size_t i = 1; i < len; ++i) {
                pow *= kRollBase;
            }
            std::uint64_t h = roll_hash(hay.data(), len);
            for (std::size_t pos = 0;; ++pos) {
                const auto it = by_hash.find(h);
                if (it != by_hash.end()) {
                    for (std::size_t idx : it->second) {
                        if (!seen[idx] &&
                            std::equal(needles[idx].begin(), needles[idx].end(),
                                       hay.begin() + pos)) {
                            seen[idx] = true;
                        }
                    }
                }
                if (pos + len >= hay.size()) {
                    break;
                }
                h = (h - pow * hay[pos]) * kRollBase + hay[pos + len];
            }
        }
    }
    return seen;
}

Bytes corrupted_chunk(const Bytes& chunk, Rng& rng) {
    Bytes pattern = rng.bytes(chunk.size());
    pattern[0] |= 0x01;  // never the identity
    Bytes out = chunk;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] ^= pattern[i];
    }
    return out;
}

/// Everything derived from the scenario seed, in a fixed order so that
/// transcripts differ only where behavior differs.
struct TradeMaterial {
    Bytes data;
    ChunkedData chunked;
    SignatureKeyPair carol;
    SignatureKeyPair seller;
    SignatureKeyPair decoy_seller;
    SymmetricKey key;
    SymmetricKey wrong_key;
    SymmetricKey prior_key;
    Digest garbage_commit;
    Rng corruption_rng{0};
    Rng fabrication_rng{0};
    Certificate cert;
    OffchainPayload honest_payload;
};

TradeMaterial derive_material(const Scheme& scheme, const Scenario& sc) {
    TradeMaterial m;
    Rng rng(sc.seed);
    m.data = sc.fixed_data ? *sc.fixed_data : rng.bytes(sc.data_bytes);
    m.carol = scheme.keypair_from_seed(rng.bytes(32));
    m.seller = scheme.keypair_from_seed(rng.bytes(32));
    m.decoy_seller = scheme.keypair_from_seed(rng.bytes(32));
    m.key = scheme.symmetric_key_from_seed(rng.bytes(32));
    m.wrong_key = scheme.symmetric_key_from_seed(rng.bytes(32));
    m.prior_key = scheme.symmetric_key_from_seed(rng.bytes(32));
    m.garbage_commit = Digest{rng.bytes(scheme.descriptor().hash_bytes())};
    m.corruption_rng = rng.fork(1);
    m.fabrication_rng = rng.fork(2);
    m.chunked = split(m.data, sc.chunk_bits);
    m.cert = make_certificate(scheme, sc.variant, m.chunked, m.carol);
    m.honest_payload = make_payload(scheme, sc.variant, m.chunked, m.key,
                                    &m.seller.secret_key);
    return m;
}

struct SellerPlan {
    bool sends_payload = true;
    bool commits = true;  // ignored for O(1)
    bool reveals = true;
    OffchainPayload payload;
    Digest commit_value;
    SymmetricKey reveal_key;
};

SellerPlan plan_seller(const Scheme& scheme, const Scenario& sc, TradeMaterial& m) {
    SellerPlan plan;
    plan.payload = m.honest_payload;
    plan.reveal_key = m.key;
    const std::uint32_t chunk_count = m.chunked.chunk_count();

    switch (sc.seller.kind) {
        case SellerBehavior::Honest:
            break;
        case SellerBehavior::CorruptChunk:
        case SellerBehavior::CorruptAllChunks: {
            const bool all = sc.seller.kind == SellerBehavior::CorruptAllChunks;
            if (sc.variant == Variant::ON) {
                ChunkedData tampered = m.chunked;
                for (std::uint32_t w = 0; w < chunk_count; ++w) {
                    if (all || w == sc.seller.chunk_index) {
                        tampered.chunks[w] = corrupted_chunk(tampered.chunks[w], m.corruption_rng);
                    }
                }
                plan.payload.elements[0].ciphertext =
                    scheme.encrypt(m.key, 0, join(tampered));
            } else {
                for (std::uint32_t w = 0; w < chunk_count; ++w) {
                    if (!all && w != sc.seller.chunk_index) {
                        continue;
                    }
                    // Claimed hash stays genuine; only the ciphertext lies.
                    Bytes bad = corrupted_chunk(m.chunked.chunks[w], m.corruption_rng);
                    plan.payload.elements[w].ciphertext = scheme.encrypt(m.key, w, bad);
                    if (sc.variant == Variant::O1) {
                        const Digest msg = scheme.hash(payload_leaf(plan.payload.elements[w]));
                        plan.payload.elements[w].signature =
                            scheme.sign(m.seller.secret_key, msg.bytes);
                    }
                }
            }
            break;
        }
        case SellerBehavior::WrongKey:
            plan.reveal_key = m.wrong_key;
            break;
        case SellerBehavior::WrongCommitment:
            if (sc.variant == Variant::O1) {
                // No commitment step exists; the analogous lie is signing with
                // a key other than the one registered on-chain.
                for (auto& e : plan.payload.elements) {
                    const Digest msg = scheme.hash(payload_leaf(e));
                    e.signature = scheme.sign(m.decoy_seller.secret_key, msg.bytes);
                }
            }
            break;
        case SellerBehavior::SilentAfterFunding:
            plan.sends_payload = false;
            plan.commits = false;
            plan.reveals = false;
            break;
        case SellerBehavior::ReplaySignedChunk: {
            const OffchainPayload prior =
                make_payload(scheme, sc.variant, m.chunked, m.prior_key, &m.seller.secret_key);
            if (sc.variant == Variant::ON) {
                plan.payload.elements[0] = prior.elements[0];
            } else {
                plan.payload.elements[sc.seller.chunk_index] =
                    prior.elements[sc.seller.chunk_index];
            }
            break;
        }
    }

    if (sc.variant == Variant::ON) {
        plan.commit_value = scheme.hash(plan.payload.elements[0].ciphertext);
    } else if (sc.variant == Variant::OLogN) {
        plan.commit_value = merkle::Tree(scheme, payload_leaves(plan.payload)).root();
    }
    if (sc.seller.kind == SellerBehavior::WrongCommitment && sc.variant != Variant::O1) {
        plan.commit_value = m.garbage_commit;
    }
    return plan;
}

/// The checks Bob runs before answering the ack step.
bool buyer_checks_pass(const Scheme& scheme, const Scenario& sc, const Contract& contract,
                       const OffchainPayload& payload, const Certificate& cert) {
    const auto& desc = scheme.descriptor();
    if (sc.variant == Variant::ON) {
        if (payload.elements.size() != 1 || !contract.committed_value()) {
            return false;
        }
        return scheme.hash(payload.elements[0].ciphertext) == *contract.committed_value();
    }
    if (payload.elements.size() != cert.chunk_count) {
        return false;
    }
    const std::uint64_t ct_len = desc.ciphertext_bytes(sc.chunk_bits / 8);
    for (const auto& e : payload.elements) {
        if (e.chunk_hash.bytes.size() != desc.hash_bytes() || e.ciphertext.size() != ct_len) {
            return false;
        }
    }
    std::vector<Bytes> hash_leaves;
    hash_leaves.reserve(payload.elements.size());
    for (const auto& e : payload.elements) {
        hash_leaves.push_back(e.chunk_hash.bytes);
    }
    if (merkle::Tree(scheme, hash_leaves).root() != cert.root) {
        return false;  // claimed chunk hashes are not the certified data
    }
    if (sc.variant == Variant::OLogN) {
        if (!contract.committed_value()) {
            return false;
        }
        return merkle::Tree(scheme, payload_leaves(payload)).root() ==
               *contract.committed_value();
    }
    // O(1): every element must carry the registered seller's signature.
    for (const auto& e : payload.elements) {
        if (!e.signature) {
            return false;
        }
        const Digest msg = scheme.hash(payload_leaf(e));
        if (!scheme.verify(contract.seller_public_key(), msg.bytes, *e.signature)) {
            return false;
        }
    }
    return true;
}

/// First chunk whose ciphertext does not decrypt to its claimed hash, if any.
std::optional<std::uint32_t> first_bad_chunk(const Scheme& scheme, const Scenario& sc,
                                             const OffchainPayload& payload,
                                             const SymmetricKey& key,
                                             const Certificate& cert) {
    if (sc.variant == Variant::ON) {
        const Bytes plain = scheme.decrypt(key, 0, payload.elements[0].ciphertext);
        if (scheme.hash(plain) != cert.root) {
            return 0;
        }
        return std::nullopt;
    }
    for (std::uint32_t m = 0; m < payload.elements.size(); ++m) {
        const Bytes plain = scheme.decrypt(key, m, payload.elements[m].ciphertext);
        if (scheme.hash(plain) != payload.elements[m].chunk_hash) {
            return m;
        }
    }
    return std::nullopt;
}

DisputeSubmission genuine_submission(const Scheme& scheme, const Scenario& sc,
                                     const OffchainPayload& payload, std::uint32_t w) {
    if (sc.variant == Variant::ON) {
        return FullCiphertextEvidence{payload.elements[0].ciphertext};
    }
    if (sc.variant == Variant::OLogN) {
        merkle::Tree tree(scheme, payload_leaves(payload));
        MerkleChunkEvidence e;
        e.chunk_hash = payload.elements[w].chunk_hash;
        e.ciphertext = payload.elements[w].ciphertext;
        e.proof = tree.prove(w);
        return e;
    }
    SignedChunkEvidence e;
    e.chunk_index = w;
    e.chunk_hash = payload.elements[w].chunk_hash;
    e.ciphertext = payload.elements[w].ciphertext;
    e.signature = *payload.elements[w].signature;
    return e;
}

DisputeSubmission fabricated_submission(const Scheme& scheme, const Scenario& sc,
                                        std::uint32_t chunk_count, std::uint32_t w, Rng& rng) {
    const auto& desc = scheme.descriptor();
    const std::uint64_t ct_len = desc.ciphertext_bytes(sc.chunk_bits / 8);
    if (sc.variant == Variant::ON) {
        const std::uint64_t full_len =
            desc.ciphertext_bytes(sc.fixed_data ? sc.fixed_data->size() : sc.data_bytes);
        return FullCiphertextEvidence{rng.bytes(full_len)};
    }
    if (sc.variant == Variant::OLogN) {
        MerkleChunkEvidence e;
        e.chunk_hash = Digest{rng.bytes(desc.hash_bytes())};
        e.ciphertext = rng.bytes(ct_len);
        e.proof.leaf_index = w;
        const std::uint32_t depth = ceil_log2(chunk_count);
        for (std::uint32_t lvl = 0; lvl < depth; ++lvl) {
            merkle::ProofStep step;
            step.side = ((w >> lvl) & 1) != 0 ? merkle::ProofStep::Side::Left
                                              : merkle::ProofStep::Side::Right;
            step.sibling = Digest{rng.bytes(desc.hash_bytes())};
            e.proof.steps.push_back(std::move(step));
        }
        return e;
    }
    SignedChunkEvidence e;
    e.chunk_index = w;
    e.chunk_hash = Digest{rng.bytes(desc.hash_bytes())};
    e.ciphertext = rng.bytes(ct_len);
    e.signature = Signature{rng.bytes(desc.signature_bytes)};
    return e;
}

void validate(const Scenario& sc) {
    if (sc.fixed_data && sc.fixed_data->empty()) {
        throw std::invalid_argument("scenario: fixed data must be nonempty");
    }
    if (!sc.fixed_data && sc.data_bytes == 0) {
        throw std::invalid_argument("scenario: data size must be positive");
    }
    if (sc.chunk_bits == 0 || sc.chunk_bits % 8 != 0) {
        throw std::invalid_argument("scenario: chunk_bits must be a positive multiple of 8");
    }
    if (sc.c_target < 0 || sc.c_dep_a <= 0 || sc.c_dep_b < 0) {
        throw std::invalid_argument("scenario: deposits must be nonnegative, seller deposit positive");
    }
    if (sc.funding_window < 8 || sc.grace_window < 2) {
        throw std::invalid_argument("scenario: timeout windows too short for the message script");
    }
    const std::uint64_t data_len = sc.fixed_data ? sc.fixed_data->size() : sc.data_bytes;
    const std::uint64_t chunk_count = ceil_div(data_len, sc.chunk_bits / 8);
    const bool seller_indexed = sc.seller.kind == SellerBehavior::CorruptChunk ||
                                sc.seller.kind == SellerBehavior::ReplaySignedChunk;
    if (seller_indexed && sc.seller.chunk_index >= chunk_count) {
        throw std::invalid_argument("scenario: seller chunk_index out of range");
    }
    const bool buyer_indexed = sc.buyer.kind == BuyerBehavior::FalseDisputeFabricated ||
                               sc.buyer.kind == BuyerBehavior::FalseDisputeGenuineChunk;
    if (buyer_indexed && sc.buyer.chunk_index >= chunk_count) {
        throw std::invalid_argument("scenario: buyer chunk_index out of range");
    }
}

std::string header_line(const Scenario& sc) {
    json j;
    j["kind"] = "header";
    j["variant"] = variant_name(sc.variant);
    j["seed"] = sc.seed;
    j["chunk_bits"] = sc.chunk_bits;
    j["data_bytes"] = sc.fixed_data ? sc.fixed_data->size() : sc.data_bytes;
    j["scheme"] = {{"name", sc.scheme.name},
                   {"hash_bits", sc.scheme.hash_bits},
                   {"alpha", {sc.scheme.alpha_num, sc.scheme.alpha_den}},
                   {"signature_bytes", sc.scheme.signature_bytes},
                   {"symmetric_key_bytes", sc.scheme.symmetric_key_bytes},
                   {"public_key_bytes", sc.scheme.public_key_bytes}};
    j["seller_strategy"] = seller_behavior_name(sc.seller.kind);
    j["buyer_strategy"] = buyer_behavior_name(sc.buyer.kind);
    j["deposits"] = {{"target", sc.c_target}, {"seller", sc.c_dep_a}, {"buyer", sc.c_dep_b}};
    return j.dump();
}

}  // namespace

std::string seller_behavior_name(SellerBehavior b) {
    switch (b) {
        case SellerBehavior::Honest: return "honest";
        case SellerBehavior::CorruptChunk: return "corrupt_chunk";
        case SellerBehavior::CorruptAllChunks: return "corrupt_all_chunks";
        case SellerBehavior::WrongKey: return "wrong_key";
        case SellerBehavior::WrongCommitment: return "wrong_commitment";
        case SellerBehavior::SilentAfterFunding: return "silent_after_funding";
        case SellerBehavior::ReplaySignedChunk: return "replay_signed_chunk";
    }
    return "?";
}

std::string buyer_behavior_name(BuyerBehavior b) {
    switch (b) {
        case BuyerBehavior::Honest: return "honest";
        case BuyerBehavior::FalseDisputeFabricated: return "false_dispute_fabricated";
        case BuyerBehavior::FalseDisputeGenuineChunk: return "false_dispute_genuine_chunk";
        case BuyerBehavior::NoThenAbort: return "no_then_abort";
        case BuyerBehavior::SilentAfterPayload: return "silent_after_payload";
    }
    return "?";
}

std::optional<SellerBehavior> parse_seller_behavior(const std::string& name) {
    for (auto b : {SellerBehavior::Honest, SellerBehavior::CorruptChunk,
                   SellerBehavior::CorruptAllChunks, SellerBehavior::WrongKey,
                   SellerBehavior::WrongCommitment, SellerBehavior::SilentAfterFunding,
                   SellerBehavior::ReplaySignedChunk}) {
        if (seller_behavior_name(b) == name) return b;
    }
    return std::nullopt;
}

std::optional<BuyerBehavior> parse_buyer_behavior(const std::string& name) {
    for (auto b : {BuyerBehavior::Honest, BuyerBehavior::FalseDisputeFabricated,
                   BuyerBehavior::FalseDisputeGenuineChunk, BuyerBehavior::NoThenAbort,
                   BuyerBehavior::SilentAfterPayload}) {
        if (buyer_behavior_name(b) == name) return b;
    }
    return std::nullopt;
}

std::string Scenario::to_json() const {
    json j;
    j["variant"] = variant_name(variant);
    j["data"] = json{{"seed", seed}};
    if (fixed_data) {
        j["data"]["hex"] = to_hex(*fixed_data);
    } else {
        j["data"]["size_bytes"] = data_bytes;
    }
    j["chunk_bits"] = chunk_bits;
    j["scheme"] = {{"name", scheme.name},
                   {"hash_bits", scheme.hash_bits},
                   {"alpha", {scheme.alpha_num, scheme.alpha_den}},
                   {"signature_bytes", scheme.signature_bytes},
                   {"symmetric_key_bytes", scheme.symmetric_key_bytes},
                   {"public_key_bytes", scheme.public_key_bytes}};
    j["deposits"] = {{"target", c_target}, {"seller", c_dep_a}, {"buyer", c_dep_b}};
    j["windows"] = {{"funding", funding_window}, {"grace", grace_window}};
    j["seller_strategy"] = {{"kind", seller_behavior_name(seller.kind)},
                            {"chunk_index", seller.chunk_index}};
    j["buyer_strategy"] = {{"kind", buyer_behavior_name(buyer.kind)},
                           {"chunk_index", buyer.chunk_index}};
    j["network"] = {{"disconnect_at_tick",
                     network.disconnect_at_tick ? json(*network.disconnect_at_tick) : json()},
                    {"drop_offchain_payload", network.drop_offchain_payload}};
    return j.dump(2);
}

Scenario Scenario::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scenario: invalid JSON: ") + e.what());
    }
    Scenario sc;
    const auto v = parse_variant(j.value("variant", "ologn"));
    if (!v) {
        throw std::invalid_argument("scenario: unknown variant");
    }
    sc.variant = *v;
    if (j.contains("data")) {
        const auto& d = j.at("data");
        sc.seed = d.value("seed", sc.seed);
        if (d.contains("hex")) {
            sc.fixed_data = from_hex(d.at("hex").get<std::string>());
        } else {
            sc.data_bytes = d.value("size_bytes", sc.data_bytes);
        }
    }
    sc.chunk_bits = j.value("chunk_bits", sc.chunk_bits);
    if (j.contains("scheme")) {
        const auto& s = j.at("scheme");
        sc.scheme.name = s.value("name", sc.scheme.name);
        sc.scheme.hash_bits = s.value("hash_bits", sc.scheme.hash_bits);
        if (s.contains("alpha")) {
            sc.scheme.alpha_num = s.at("alpha").at(0).get<std::uint32_t>();
            sc.scheme.alpha_den = s.at("alpha").at(1).get<std::uint32_t>();
        }
        sc.scheme.signature_bytes = s.value("signature_bytes", sc.scheme.signature_bytes);
        sc.scheme.symmetric_key_bytes =
            s.value("symmetric_key_bytes", sc.scheme.symmetric_key_bytes);
        sc.scheme.public_key_bytes = s.value("public_key_bytes", sc.scheme.public_key_bytes);
    }
    if (j.contains("deposits")) {
        const auto& d = j.at("deposits");
        sc.c_target = d.value("target", sc.c_target);
        sc.c_dep_a = d.value("seller", sc.c_dep_a);
        sc.c_dep_b = d.value("buyer", sc.c_dep_b);
    }
    if (j.contains("windows")) {
        sc.funding_window = j.at("windows").value("funding", sc.funding_window);
        sc.grace_window = j.at("windows").value("grace", sc.grace_window);
    }
    if (j.contains("seller_strategy")) {
        const auto& s = j.at("seller_strategy");
        const auto kind = parse_seller_behavior(s.value("kind", "honest"));
        if (!kind) {
            throw std::invalid_argument("scenario: unknown seller strategy");
        }
        sc.seller.kind = *kind;
        sc.seller.chunk_index = s.value("chunk_index", 0u);
    }
    if (j.contains("buyer_strategy")) {
        const auto& b = j.at("buyer_strategy");
        const auto kind = parse_buyer_behavior(b.value("kind", "honest"));
        if (!kind) {
            throw std::invalid_argument("scenario: unknown buyer strategy");
        }
        sc.buyer.kind = *kind;
        sc.buyer.chunk_index = b.value("chunk_index", 0u);
    }
    if (j.contains("network")) {
        const auto& n = j.at("network");
        if (n.contains("disconnect_at_tick") && !n.at("disconnect_at_tick").is_null()) {
            sc.network.disconnect_at_tick = n.at("disconnect_at_tick").get<std::uint64_t>();
        }
        sc.network.drop_offchain_payload = n.value("drop_offchain_payload", false);
    }
    return sc;
}

PrivacyReport scan_privacy(const std::vector<ActionRecord>& log,
                           const std::vector<Bytes>& plain_chunks,
                           const std::vector<Bytes>& cipher_chunks,
                           const std::vector<Bytes>& chunk_hashes) {
    PrivacyReport report;
    const std::vector<bool> plain_seen = find_needles(log, plain_chunks);
    const std::vector<bool> cipher_seen = find_needles(log, cipher_chunks);
    const std::vector<bool> hash_seen = find_needles(log, chunk_hashes);
    for (std::size_t m = 0; m < plain_seen.size(); ++m) {
        if (plain_seen[m]) {
            report.plaintext_indices.push_back(static_cast<std::uint32_t>(m));
        }
    }
    report.plaintext_chunks_onchain = report.plaintext_indices.size();
    report.ciphertext_chunks_onchain =
        static_cast<std::uint64_t>(std::count(cipher_seen.begin(), cipher_seen.end(), true));
    report.chunk_hashes_onchain =
        static_cast<std::uint64_t>(std::count(hash_seen.begin(), hash_seen.end(), true));
    return report;
}

std::string TradeOutcome::summary_json() const {
    json j;
    j["scheme"] = scheme.to_string();
    j["terminal_phase"] = phase_name(terminal_phase);
    if (verdict) {
        j["verdict"] = {{"dishonest", party_name(verdict->dishonest)},
                        {"reason", verdict->reason}};
    } else {
        j["verdict"] = nullptr;
    }
    j["seller_delta"] = seller_delta;
    j["buyer_delta"] = buyer_delta;
    j["buyer_received_valid_data"] = buyer_received_valid_data;
    j["cost"] = {{"onchain_bytes", cost.onchain_bytes},
                 {"onchain_actions", cost.onchain_actions},
                 {"offchain_bytes", cost.offchain_bytes},
                 {"dispute_submission_bytes", cost.dispute_submission_bytes},
                 {"formula_dispute_bits", formula_dispute_bits},
                 {"ops",
                  {{"hashes", cost.adjudication.hashes},
                   {"decrypt_bits", cost.adjudication.decrypt_bits},
                   {"sig_verifies", cost.adjudication.signature_verifies},
                   {"fold_steps", cost.adjudication.merkle_fold_steps}}}};
    j["privacy"] = {{"plaintext_chunks_onchain", privacy.plaintext_chunks_onchain},
                    {"plaintext_indices", privacy.plaintext_indices},
                    {"ciphertext_chunks_onchain", privacy.ciphertext_chunks_onchain},
                    {"chunk_hashes_onchain", privacy.chunk_hashes_onchain}};
    return j.dump(2);
}

TradeOutcome run(const Scenario& sc) {
    validate(sc);
    auto scheme = make_scheme(sc.scheme);
    TradeMaterial m = derive_material(*scheme, sc);
    SellerPlan plan = plan_seller(*scheme, sc, m);

    Contract::Config config;
    config.variant = sc.variant;
    config.funding_window = sc.funding_window;
    config.grace_window = sc.grace_window;
    config.seller_balance = sc.c_dep_a;
    config.buyer_balance = sc.c_target + sc.c_dep_b;
    Contract contract(scheme, config);

    const auto connected = [&](std::uint64_t t) {
        return !sc.network.disconnect_at_tick || t < *sc.network.disconnect_at_tick;
    };

    TradeOutcome out;
    out.scheme = sc.scheme;
    out.certificate = m.cert;
    out.chunk_count = m.chunked.chunk_count();

    if (connected(kRegisterTick)) {
        contract.register_certificate(m.cert, kRegisterTick);
    }
    if (connected(kBuyerFundTick)) {
        contract.buyer_intent_and_fund(m.cert.root, sc.c_target, sc.c_dep_b, kBuyerFundTick);
    }
    if (connected(kSellerFundTick)) {
        contract.seller_fund(sc.c_dep_a, m.seller.public_key, kSellerFundTick);
    }

    if (connected(kPayloadTick) && plan.sends_payload && !sc.network.drop_offchain_payload) {
        out.payload_received = plan.payload;
    }
    if (sc.variant != Variant::O1 && connected(kCommitTick) && plan.commits) {
        contract.commit(plan.commit_value, kCommitTick);
    }

    if (connected(kAckTick) && out.payload_received &&
        sc.buyer.kind != BuyerBehavior::SilentAfterPayload) {
        if (sc.buyer.kind == BuyerBehavior::NoThenAbort) {
            contract.buyer_ack(false, kAckTick);
        } else {
            const bool ok =
                buyer_checks_pass(*scheme, sc, contract, *out.payload_received, m.cert);
            contract.buyer_ack(ok, kAckTick);
        }
    }

    if (connected(kRevealTick) && plan.reveals) {
        contract.reveal_key(plan.reveal_key, kRevealTick);
    }

    if (connected(kDisputeTick) && contract.phase() == Phase::KeyRevealed &&
        out.payload_received) {
        const SymmetricKey& onchain_key = *contract.revealed_key();
        std::optional<DisputeSubmission> submission;
        switch (sc.buyer.kind) {
            case BuyerBehavior::Honest: {
                const auto bad =
                    first_bad_chunk(*scheme, sc, *out.payload_received, onchain_key, m.cert);
                if (bad) {
                    submission = genuine_submission(*scheme, sc, *out.payload_received, *bad);
                }
                break;
            }
            case BuyerBehavior::FalseDisputeFabricated:
                submission = fabricated_submission(*scheme, sc, m.chunked.chunk_count(),
                                                   sc.buyer.chunk_index, m.fabrication_rng);
                break;
            case BuyerBehavior::FalseDisputeGenuineChunk:
                submission = genuine_submission(*scheme, sc, *out.payload_received,
                                                sc.buyer.chunk_index);
                break;
            case BuyerBehavior::NoThenAbort:
            case BuyerBehavior::SilentAfterPayload:
                break;
        }
        if (submission) {
            if (contract.dispute(*submission, kDisputeTick)) {
                out.submission = submission;
            }
        }
    }

    // Let the clock run out; dispute-free trades settle on their deadlines.
    if (!is_terminal(contract.phase())) {
        contract.tick(contract.funding_deadline() + 1);
    }
    if (!is_terminal(contract.phase()) && contract.phase() == Phase::KeyRevealed) {
        contract.tick(contract.grace_deadline() + 1);
    }

    out.terminal_phase = contract.phase();
    out.verdict = contract.verdict();
    out.seller_delta = contract.ledger().seller - config.seller_balance;
    out.buyer_delta = contract.ledger().buyer - config.buyer_balance;
    out.revealed_key = contract.revealed_key();
    out.committed_value = contract.committed_value();
    out.seller_public_key = contract.seller_public_key();
    out.cost = contract.onchain_footprint();
    if (out.payload_received) {
        out.cost.offchain_bytes = serialize_payload(*out.payload_received).size();
    }
    out.formula_dispute_bits = dispute_payload_bits(
        sc.variant, 8 * m.data.size(), sc.chunk_bits, sc.scheme.hash_bits, sc.scheme.alpha_num,
        sc.scheme.alpha_den, 8 * sc.scheme.signature_bytes);
    out.log = contract.log();

    if (out.payload_received && out.revealed_key) {
        try {
            if (sc.variant == Variant::ON) {
                const Bytes plain = scheme->decrypt(*out.revealed_key, 0,
                                                    out.payload_received->elements[0].ciphertext);
                out.buyer_received_valid_data = plain == m.data;
            } else {
                ChunkedData got;
                got.chunk_bits = sc.chunk_bits;
                got.original_len = m.cert.original_len;
                for (std::uint32_t i = 0; i < out.payload_received->elements.size(); ++i) {
                    got.chunks.push_back(scheme->decrypt(
                        *out.revealed_key, i, out.payload_received->elements[i].ciphertext));
                }
                out.buyer_received_valid_data = join(got) == m.data;
            }
        } catch (const std::invalid_argument&) {
            out.buyer_received_valid_data = false;
        }
    }

    std::vector<Bytes> cipher_chunks;
    std::vector<Bytes> chunk_hashes;
    for (std::uint32_t w = 0; w < m.chunked.chunk_count(); ++w) {
        chunk_hashes.push_back(scheme->hash(m.chunked.chunks[w]).bytes);
    }
    if (out.payload_received) {
        for (const auto& e : out.payload_received->elements) {
            cipher_chunks.push_back(e.ciphertext);
        }
    }
    out.privacy = scan_privacy(out.log, m.chunked.chunks, cipher_chunks, chunk_hashes);

    std::ostringstream transcript;
    transcript << header_line(sc) << '\n';
    for (const ActionRecord& rec : out.log) {
        transcript << rec.to_json_line() << '\n';
    }
    out.transcript = transcript.str();
    return out;
}

std::optional<Verdict> oracle_adjudicate(const Scheme& scheme, const OracleInputs& in) {
    if (!in.submission || !in.revealed_key) {
        return std::nullopt;
    }
    const SymmetricKey& key = *in.revealed_key;
    Verdict v;
    const auto blame = [&](Party p, const char* why) {
        v.dishonest = p;
        v.reason = why;
        return v;
    };

    if (in.variant == Variant::ON) {
        const auto& e = std::get<FullCiphertextEvidence>(*in.submission);
        if (scheme.hash(e.ciphertext) != *in.committed_value) {
            return blame(Party::Buyer, "oracle: hash of upload differs from commitment");
        }
        if (scheme.hash(scheme.decrypt(key, 0, e.ciphertext)) == in.certificate.root) {
            return blame(Party::Buyer, "oracle: decryption matches certified hash");
        }
        return blame(Party::Seller, "oracle: decryption mismatches certified hash");
    }

    if (in.variant == Variant::OLogN) {
        const auto& e = std::get<MerkleChunkEvidence>(*in.submission);
        // Hand-rolled fold, independent of the library verifier.
        Bytes leaf = e.chunk_hash.bytes;
        leaf.insert(leaf.end(), e.ciphertext.begin(), e.ciphertext.end());
        bool proof_ok = e.proof.steps.size() >= 32 ||
                        (e.proof.leaf_index >> e.proof.steps.size()) == 0;
        Bytes tagged;
        tagged.push_back(0x00);
        tagged.insert(tagged.end(), leaf.begin(), leaf.end());
        Digest cur = scheme.hash(tagged);
        for (std::size_t lvl = 0; proof_ok && lvl < e.proof.steps.size(); ++lvl) {
            const auto& step = e.proof.steps[lvl];
            const bool right_child = ((e.proof.leaf_index >> lvl) & 1) != 0;
            if ((step.side == merkle::ProofStep::Side::Left) != right_child) {
                proof_ok = false;
                break;
            }
            Bytes node;
            node.push_back(0x01);
            if (step.side == merkle::ProofStep::Side::Left) {
                node.insert(node.end(), step.sibling.bytes.begin(), step.sibling.bytes.end());
                node.insert(node.end(), cur.bytes.begin(), cur.bytes.end());
            } else {
                node.insert(node.end(), cur.bytes.begin(), cur.bytes.end());
                node.insert(node.end(), step.sibling.bytes.begin(), step.sibling.bytes.end());
            }
            cur = scheme.hash(node);
        }
        proof_ok = proof_ok && cur == *in.committed_value;
        if (!proof_ok) {
            return blame(Party::Buyer, "oracle: proof fails against committed root");
        }
        if (scheme.hash(scheme.decrypt(key, e.proof.leaf_index, e.ciphertext)) == e.chunk_hash) {
            return blame(Party::Buyer, "oracle: chunk consistent with claimed hash");
        }
        return blame(Party::Seller, "oracle: chunk inconsistent with claimed hash");
    }

    const auto& e = std::get<SignedChunkEvidence>(*in.submission);
    Bytes pair = e.chunk_hash.bytes;
    pair.insert(pair.end(), e.ciphertext.begin(), e.ciphertext.end());
    if (!scheme.verify(in.seller_public_key, scheme.hash(pair).bytes, e.signature)) {
        return blame(Party::Buyer, "oracle: seller signature invalid");
    }
    if (scheme.hash(scheme.decrypt(key, e.chunk_index, e.ciphertext)) == e.chunk_hash) {
        return blame(Party::Buyer, "oracle: chunk consistent with claimed hash");
    }
    return blame(Party::Seller, "oracle: chunk inconsistent with claimed hash");
}

OracleInputs oracle_inputs_from(const TradeOutcome& outcome, Variant variant) {
    OracleInputs in;
    in.variant = variant;
    in.payload_received = outcome.payload_received;
    in.revealed_key = outcome.revealed_key;
    in.certificate = outcome.certificate;
    in.committed_value = outcome.committed_value;
    in.seller_public_key = outcome.seller_public_key;
    in.submission = outcome.submission;
    return in;
}

std::vector<SweepRow> sweep(const Scenario& base, const std::vector<std::uint64_t>& data_bits) {
    std::vector<SweepRow> rows;
    rows.reserve(data_bits.size());
    for (std::uint64_t bits : data_bits) {
        if (bits == 0 || bits % 8 != 0) {
            throw std::invalid_argument("sweep: sizes must be whole bytes");
        }
        Scenario happy = base;
        happy.data_bytes = bits / 8;
        happy.fixed_data.reset();
        happy.seller = {SellerBehavior::Honest, 0};
        happy.buyer = {BuyerBehavior::Honest, 0};

        Scenario disputed = happy;
        disputed.seller = {SellerBehavior::CorruptChunk, 0};

        const TradeOutcome happy_out = run(happy);
        const TradeOutcome disputed_out = run(disputed);

        SweepRow row;
        row.data_bits = bits;
        row.variant = base.variant;
        row.happy_phase = happy_out.terminal_phase;
        row.dispute_phase = disputed_out.terminal_phase;
        row.onchain_happy_bits = 8 * happy_out.cost.onchain_bytes;
        row.onchain_dispute_bits = 8 * disputed_out.cost.onchain_bytes;
        row.dispute_submission_bits = 8 * disputed_out.cost.dispute_submission_bytes;
        row.formula_bits = disputed_out.formula_dispute_bits;
        row.offchain_bits = 8 * disputed_out.cost.offchain_bytes;
        row.dispute_ops = disputed_out.cost.adjudication;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const SchemeDescriptor& scheme, const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "# scheme=" << scheme.to_string() << '\n';
    os << "data_bits,variant,happy_phase,dispute_phase,onchain_happy_bits,"
          "onchain_dispute_bits,dispute_submission_bits,formula_dispute_bits,offchain_bits,"
          "adj_hashes,adj_decrypt_bits,adj_sig_verifies,adj_fold_steps\n";
    for (const SweepRow& r : rows) {
        os << r.data_bits << ',' << variant_name(r.variant) << ',' << phase_name(r.happy_phase)
           << ',' << phase_name(r.dispute_phase) << ',' << r.onchain_happy_bits << ','
           << r.onchain_dispute_bits << ',' << r.dispute_submission_bits << ','
           << r.formula_bits << ',' << r.offchain_bits << ',' << r.dispute_ops.hashes << ','
           << r.dispute_ops.decrypt_bits << ',' << r.dispute_ops.signature_verifies << ','
           << r.dispute_ops.merkle_fold_steps << '\n';
    }
    return os.str();
}

}  // namespace blockmark::sim
