// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef BLOCKMARK_SIM_HPP
#define BLOCKMARK_SIM_HPP

#include "blockmark/contract.hpp"

#include <optional>
#include <string>
#include <vector>

namespace blockmark::sim {

/// Scripted misbehavior. A strategy pins every message the party emits for a
/// given seed and clock, so runs replay bit-exactly.
enum class SellerBehavior {
    Honest,
    CorruptChunk,        // element w: true chunk hash, ciphertext of a corrupted chunk
    CorruptAllChunks,
    WrongKey,            // honest payload, reveals a different key on-chain
    WrongCommitment,     // honest payload, garbage on-chain commitment
                         // (O(1): signs with a key other than the registered one)
    SilentAfterFunding,  // deposits, then nothing
    ReplaySignedChunk,   // element w lifted from a prior trade under another key
};

enum class BuyerBehavior {
    Honest,
    FalseDisputeFabricated,    // disputes with fabricated evidence
    FalseDisputeGenuineChunk,  // disputes with a genuine, consistent element
    NoThenAbort,               // answers "No" at the ack step
    SilentAfterPayload,        // receives the payload, never acks
};

std::string seller_behavior_name(SellerBehavior b);
std::string buyer_behavior_name(BuyerBehavior b);
std::optional<SellerBehavior> parse_seller_behavior(const std::string& name);
std::optional<BuyerBehavior> parse_buyer_behavior(const std::string& name);

struct SellerStrategy {
    SellerBehavior kind = SellerBehavior::Honest;
    std::uint32_t chunk_index = 0;  // target of CorruptChunk / ReplaySignedChunk
};

struct BuyerStrategy {
    BuyerBehavior kind = BuyerBehavior::Honest;
    std::uint32_t chunk_index = 0;  // element used by the false-dispute behaviors
};

struct NetworkEvents {
    std::optional<std::uint64_t> disconnect_at_tick;  // party actions at tick >= T drop
    bool drop_offchain_payload = false;
};

struct Scenario {
    Variant variant = Variant::OLogN;
    std::uint64_t data_bytes = 4096;
    std::optional<Bytes> fixed_data;  // overrides data_bytes when present
    std::uint64_t seed = 1;
    std::uint32_t chunk_bits = 256;
    SchemeDescriptor scheme;
    std::int64_t c_target = 1000;
    std::int64_t c_dep_a = 500;
    std::int64_t c_dep_b = 300;
    std::uint64_t funding_window = 86'400;
    std::uint64_t grace_window = 172'800;
    SellerStrategy seller;
    BuyerStrategy buyer;
    NetworkEvents network;

    Scenario() { scheme = default_descriptor(); }

    std::string to_json() const;
    static Scenario from_json(const std::string& text);
};

struct PrivacyReport {
    std::uint64_t plaintext_chunks_onchain = 0;
    std::vector<std::uint32_t> plaintext_indices;
    std::uint64_t ciphertext_chunks_onchain = 0;
    std::uint64_t chunk_hashes_onchain = 0;
};

/// Substring scan of every accepted on-chain payload for chunk plaintexts,
/// their sent ciphertexts, and their hashes.
PrivacyReport scan_privacy(const std::vector<ActionRecord>& log,
                           const std::vector<Bytes>& plain_chunks,
                           const std::vector<Bytes>& cipher_chunks,
                           const std::vector<Bytes>& chunk_hashes);

struct TradeOutcome {
    Phase terminal_phase = Phase::Created;
    std::optional<Verdict> verdict;
    std::int64_t seller_delta = 0;
    std::int64_t buyer_delta = 0;
    bool buyer_received_valid_data = false;
    CostReport cost;
    PrivacyReport privacy;
    SchemeDescriptor scheme;  // echoed so every emitted report is self-describing
    std::vector<ActionRecord> log;
    std::string transcript;  // header line + one JSON line per record

    // Run artifacts, kept for oracle cross-checks and report tooling.
    std::optional<OffchainPayload> payload_received;
    std::optional<DisputeSubmission> submission;
    std::optional<SymmetricKey> revealed_key;
    Certificate certificate;
    std::optional<Digest> committed_value;
    Bytes seller_public_key;
    std::uint32_t chunk_count = 0;
    std::uint64_t formula_dispute_bits = 0;

    std::string summary_json() const;
};

/// Runs one full trade. Deterministic: identical scenarios produce
/// byte-identical transcripts. Throws std::invalid_argument on bad config
/// before anything executes.
TradeOutcome run(const Scenario& scenario);

/// Everything a correct arbiter would need, gathered from both sides of the
/// trade, to re-derive the verdict independently of the contract.
struct OracleInputs {
    Variant variant = Variant::OLogN;
    std::optional<OffchainPayload> payload_received;
    std::optional<SymmetricKey> revealed_key;
    Certificate certificate;
    std::optional<Digest> committed_value;
    Bytes seller_public_key;
    std::optional<DisputeSubmission> submission;
};

/// Straight-line transcription of the three disputation procedures, built on
/// the raw primitives only (its Merkle fold is hand-rolled here, not the
/// library one). Returns the party a correct arbiter must blame, or nullopt
/// when no dispute happened.
std::optional<Verdict> oracle_adjudicate(const Scheme& scheme, const OracleInputs& inputs);

OracleInputs oracle_inputs_from(const TradeOutcome& outcome, Variant variant);

struct SweepRow {
    std::uint64_t data_bits = 0;
    Variant variant = Variant::OLogN;
    Phase happy_phase = Phase::Created;
    Phase dispute_phase = Phase::Created;
    std::uint64_t onchain_happy_bits = 0;
    std::uint64_t onchain_dispute_bits = 0;
    std::uint64_t dispute_submission_bits = 0;
    std::uint64_t formula_bits = 0;
    std::uint64_t offchain_bits = 0;
    OpCounters dispute_ops;
};

/// One happy and one single-chunk-corruption run per size.
std::vector<SweepRow> sweep(const Scenario& base, const std::vector<std::uint64_t>& data_bits);

std::string sweep_csv(const SchemeDescriptor& scheme, const std::vector<SweepRow>& rows);

}  // namespace blockmark::sim

#endif  // BLOCKMARK_SIM_HPP
