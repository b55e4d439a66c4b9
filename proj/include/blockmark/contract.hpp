// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef BLOCKMARK_CONTRACT_HPP
#define BLOCKMARK_CONTRACT_HPP

#include "blockmark/bytes.hpp"
#include "blockmark/chunk.hpp"
#include "blockmark/crypto.hpp"
#include "blockmark/merkle.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace blockmark {

enum class Party { Seller, Buyer };

std::string party_name(Party p);

enum class Phase {
    Created,
    BuyerFunded,
    SellerFunded,
    Committed,
    Acked,
    KeyRevealed,
    Settled,
    Refunded,
    DisputeResolved,
};

std::string phase_name(Phase p);

inline bool is_terminal(Phase p) {
    return p == Phase::Settled || p == Phase::Refunded || p == Phase::DisputeResolved;
}

struct EscrowSlot {
    std::int64_t amount = 0;
    Party owner = Party::Buyer;
    std::uint64_t refundable_after = 0;
};

/// Coin state. Conservation (balances + escrow constant, nothing negative)
/// holds across every transition and is property-tested.
struct Ledger {
    std::int64_t seller = 0;
    std::int64_t buyer = 0;
    EscrowSlot target;     // the price, funded by the buyer
    EscrowSlot deposit_a;  // seller deposit
    EscrowSlot deposit_b;  // buyer deposit

    std::int64_t total() const {
        return seller + buyer + target.amount + deposit_a.amount + deposit_b.amount;
    }
};

struct Verdict {
    Party dishonest = Party::Seller;
    std::string reason;
    std::map<std::string, std::string> evidence;  // label -> digest hex, never data bodies

    bool operator==(const Verdict& o) const {
        return dishonest == o.dishonest && reason == o.reason;
    }
};

/// Buyer evidence for the three dispute algorithms.
struct FullCiphertextEvidence {
    Bytes ciphertext;
};
struct MerkleChunkEvidence {
    Digest chunk_hash;
    Bytes ciphertext;
    merkle::Proof proof;  // carries the leaf index
};
struct SignedChunkEvidence {
    std::uint32_t chunk_index = 0;
    Digest chunk_hash;
    Bytes ciphertext;
    Signature signature;
};
using DisputeSubmission =
    std::variant<FullCiphertextEvidence, MerkleChunkEvidence, SignedChunkEvidence>;

Variant submission_variant(const DisputeSubmission& sub);

/// Wire formats (billed as on-chain upload, exact):
///   O(N):      ct_len (4) | ciphertext
///   O(log N):  chunk hash (h/8) | ct_len (4) | ciphertext | proof
///   O(1):      chunk index (4) | chunk hash (h/8) | ct_len (4) | ciphertext
///              | signature (fixed width)
Bytes serialize_submission(const DisputeSubmission& sub);
DisputeSubmission parse_submission(const Scheme& scheme, Variant variant, ByteView data);

/// Serialization overhead on top of the formula bits: length prefixes,
/// indices and proof side bytes. `proof_depth` only matters for O(log N).
std::uint64_t dispute_framing_bytes(Variant variant, std::uint64_t proof_depth);

struct OpCounters {
    std::uint64_t hashes = 0;
    std::uint64_t decrypt_bits = 0;
    std::uint64_t signature_verifies = 0;
    std::uint64_t merkle_fold_steps = 0;

    bool operator==(const OpCounters&) const = default;
};

/// Everything the arbiter ever accepted, in bytes, plus the compute it spent
/// adjudicating. Off-chain traffic is accounted by the harness.
struct CostReport {
    std::uint64_t onchain_bytes = 0;
    std::uint64_t onchain_actions = 0;
    std::uint64_t dispute_submission_bytes = 0;
    OpCounters adjudication;
    std::uint64_t offchain_bytes = 0;
};

struct ActionRecord {
    enum class Kind { Action, Event };
    Kind kind = Kind::Action;
    std::uint64_t tick = 0;
    std::string actor;
    std::string name;
    Bytes payload;  // wire bytes, exactly what was billed
    OpCounters ops;
    std::string note;

    std::string to_json_line() const;
    static ActionRecord from_json_line(const std::string& line);
};

struct ActionResult {
    bool accepted = false;
    std::string reason;  // empty on success

    explicit operator bool() const { return accepted; }
};

/// The simulated arbiter: one deterministic state machine per trade. Every
/// accepted input is billed by serialized size; adjudication compute is
/// metered through OpCounters. Single-threaded by construction; distinct
/// instances are independent.
class Contract {
  public:
    struct Config {
        Variant variant = Variant::OLogN;
        std::uint64_t funding_window = 86'400;
        std::uint64_t grace_window = 172'800;
        std::int64_t seller_balance = 10'000;
        std::int64_t buyer_balance = 10'000;
    };

    Contract(std::shared_ptr<const Scheme> scheme, Config config);

    ActionResult register_certificate(const Certificate& cert, std::uint64_t now);
    ActionResult buyer_intent_and_fund(const Digest& target_root, std::int64_t c_target,
                                       std::int64_t c_dep_b, std::uint64_t now);
    ActionResult seller_fund(std::int64_t c_dep_a, const Bytes& seller_public_key,
                             std::uint64_t now);
    ActionResult commit(const Digest& committed_value, std::uint64_t now);
    ActionResult buyer_ack(bool yes, std::uint64_t now);
    ActionResult reveal_key(const SymmetricKey& key, std::uint64_t now);
    ActionResult dispute(const DisputeSubmission& submission, std::uint64_t now);
    /// Advances the logical clock, firing any due timeout settlement.
    ActionResult tick(std::uint64_t now);

    const Config& config() const { return config_; }
    const Scheme& scheme() const { return *scheme_; }
    Phase phase() const { return phase_; }
    bool registered() const { return registered_; }
    const Certificate& certificate() const { return certificate_; }
    const std::optional<Digest>& committed_value() const { return committed_value_; }
    const std::optional<SymmetricKey>& revealed_key() const { return revealed_key_; }
    const Bytes& seller_public_key() const { return seller_public_key_; }
    const std::optional<Verdict>& verdict() const { return verdict_; }
    const Ledger& ledger() const { return ledger_; }
    std::uint64_t funding_deadline() const { return funding_deadline_; }
    std::uint64_t grace_deadline() const { return grace_deadline_; }

    const CostReport& onchain_footprint() const { return cost_; }
    const std::vector<ActionRecord>& log() const { return log_; }

    /// Canonical state dump; replaying a log must reproduce it byte for byte.
    std::string state_json() const;

  private:
    ActionResult reject(const std::string& reason) { return {false, reason}; }
    ActionResult accept_action(std::uint64_t now, const std::string& actor,
                               const std::string& name, Bytes payload,
                               const OpCounters& ops = {}, const std::string& note = {});
    void event(std::uint64_t now, const std::string& name, const std::string& note);

    /// Fires due timeouts; only tick() settles on time.
    void touch(std::uint64_t now);
    bool deadline_passed(std::uint64_t now) const;
    /// Monotonicity and deadline gate shared by every party action; returns a
    /// rejection reason or empty.
    std::string clock_guard(std::uint64_t now);
    bool clock_ok(std::uint64_t now) const { return now >= last_now_; }

    void settle_refund(std::uint64_t now);
    void settle_happy(std::uint64_t now);
    void settle_dispute(std::uint64_t now, const Verdict& verdict);
    void release_escrow_to(Party target_to, Party dep_a_to, Party dep_b_to);
    void credit(Party p, std::int64_t amount);

    Verdict adjudicate(const DisputeSubmission& submission, OpCounters& ops) const;

    std::shared_ptr<const Scheme> scheme_;
    Config config_;
    Phase phase_ = Phase::Created;
    bool registered_ = false;
    Certificate certificate_;
    std::optional<Digest> committed_value_;
    std::optional<SymmetricKey> revealed_key_;
    Bytes seller_public_key_;
    std::optional<Verdict> verdict_;
    Ledger ledger_;
    std::uint64_t funding_deadline_ = 0;
    std::uint64_t grace_deadline_ = 0;
    std::uint64_t last_now_ = 0;
    CostReport cost_;
    std::vector<ActionRecord> log_;
};

/// Rebuilds a contract by feeding the action records of `log` back through a
/// fresh instance. Event records are skipped (they are re-derived).
Contract replay_log(std::shared_ptr<const Scheme> scheme, Contract::Config config,
                    const std::vector<ActionRecord>& log);

}  // namespace blockmark

#endif  // BLOCKMARK_CONTRACT_HPP
