// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/contract.hpp"

#include <json.hpp>

namespace blockmark {

namespace {

using nlohmann::json;

json ops_to_json(const OpCounters& ops) {
    return json{{"decrypt_bits", ops.decrypt_bits},
                {"fold_steps", ops.merkle_fold_steps},
                {"hashes", ops.hashes},
                {"sig_verifies", ops.signature_verifies}};
}

OpCounters ops_from_json(const json& j) {
    OpCounters ops;
    ops.decrypt_bits = j.at("decrypt_bits").get<std::uint64_t>();
    ops.merkle_fold_steps = j.at("fold_steps").get<std::uint64_t>();
    ops.hashes = j.at("hashes").get<std::uint64_t>();
    ops.signature_verifies = j.at("sig_verifies").get<std::uint64_t>();
    return ops;
}

}  // namespace

std::string party_name(Party p) {
    return p == Party::Seller ? "seller" : "buyer";
}

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::Created: return "created";
        case Phase::BuyerFunded: return "buyer_funded";
        case Phase::SellerFunded: return "seller_funded";
        case Phase::Committed: return "committed";
        case Phase::Acked: return "acked";
        case Phase::KeyRevealed: return "key_revealed";
        case Phase::Settled: return "settled";
        case Phase::Refunded: return "refunded";
        case Phase::DisputeResolved: return "dispute_resolved";
    }
    return "?";
}

Variant submission_variant(const DisputeSubmission& sub) {
    if (std::holds_alternative<FullCiphertextEvidence>(sub)) return Variant::ON;
    if (std::holds_alternative<MerkleChunkEvidence>(sub)) return Variant::OLogN;
    return Variant::O1;
}

Bytes serialize_submission(const DisputeSubmission& sub) {
    ByteWriter w;
    if (const auto* on = std::get_if<FullCiphertextEvidence>(&sub)) {
        w.field(on->ciphertext);
    } else if (const auto* log = std::get_if<MerkleChunkEvidence>(&sub)) {
        w.raw(log->chunk_hash.bytes);
        w.field(log->ciphertext);
        w.raw(merkle::serialize_proof(log->proof));
    } else {
        const auto& o1 = std::get<SignedChunkEvidence>(sub);
        w.u32(o1.chunk_index);
        w.raw(o1.chunk_hash.bytes);
        w.field(o1.ciphertext);
        w.raw(o1.signature.bytes);
    }
    return w.take();
}

DisputeSubmission parse_submission(const Scheme& scheme, Variant variant, ByteView data) {
    ByteReader r(data);
    const std::uint32_t hash_bytes = scheme.descriptor().hash_bytes();
    DisputeSubmission sub;
    switch (variant) {
        case Variant::ON: {
            FullCiphertextEvidence e;
            e.ciphertext = r.field();
            sub = std::move(e);
            break;
        }
        case Variant::OLogN: {
            MerkleChunkEvidence e;
            e.chunk_hash = Digest{r.raw(hash_bytes)};
            e.ciphertext = r.field();
            e.proof = merkle::parse_proof(scheme, r);
            sub = std::move(e);
            break;
        }
        case Variant::O1: {
            SignedChunkEvidence e;
            e.chunk_index = r.u32();
            e.chunk_hash = Digest{r.raw(hash_bytes)};
            e.ciphertext = r.field();
            e.signature = Signature{r.raw(scheme.descriptor().signature_bytes)};
            sub = std::move(e);
            break;
        }
    }
    if (!r.done()) {
        throw std::runtime_error("submission: trailing bytes");
    }
    return sub;
}

std::uint64_t dispute_framing_bytes(Variant variant, std::uint64_t proof_depth) {
    switch (variant) {
        case Variant::ON: return 4;                       // ct length prefix
        case Variant::OLogN: return 9 + proof_depth;      // ct len + leaf index + count + sides
        case Variant::O1: return 8;                       // chunk index + ct length prefix
    }
    return 0;
}

std::string ActionRecord::to_json_line() const {
    json j{{"actor", actor},
           {"bytes", payload.size()},
           {"kind", kind == Kind::Action ? "action" : "event"},
           {"name", name},
           {"note", note},
           {"ops", ops_to_json(ops)},
           {"payload", to_hex(payload)},
           {"tick", tick}};
    return j.dump();
}

ActionRecord ActionRecord::from_json_line(const std::string& line) {
    const json j = json::parse(line);
    ActionRecord rec;
    rec.kind = j.at("kind").get<std::string>() == "action" ? Kind::Action : Kind::Event;
    rec.tick = j.at("tick").get<std::uint64_t>();
    rec.actor = j.at("actor").get<std::string>();
    rec.name = j.at("name").get<std::string>();
    rec.payload = from_hex(j.at("payload").get<std::string>());
    rec.ops = ops_from_json(j.at("ops"));
    rec.note = j.at("note").get<std::string>();
    return rec;
}

Contract::Contract(std::shared_ptr<const Scheme> scheme, Config config)
    : scheme_(std::move(scheme)), config_(config) {
    ledger_.seller = config.seller_balance;
    ledger_.buyer = config.buyer_balance;
}

ActionResult Contract::accept_action(std::uint64_t now, const std::string& actor,
                                     const std::string& name, Bytes payload,
                                     const OpCounters& ops, const std::string& note) {
    cost_.onchain_bytes += payload.size();
    cost_.onchain_actions += 1;
    ActionRecord rec;
    rec.kind = ActionRecord::Kind::Action;
    rec.tick = now;
    rec.actor = actor;
    rec.name = name;
    rec.payload = std::move(payload);
    rec.ops = ops;
    rec.note = note;
    log_.push_back(std::move(rec));
    return {true, {}};
}

void Contract::event(std::uint64_t now, const std::string& name, const std::string& note) {
    ActionRecord rec;
    rec.kind = ActionRecord::Kind::Event;
    rec.tick = now;
    rec.actor = "contract";
    rec.name = name;
    rec.note = note;
    log_.push_back(std::move(rec));
}

void Contract::touch(std::uint64_t now) {
    if (now > last_now_) {
        last_now_ = now;
    }
    if (is_terminal(phase_) || phase_ == Phase::Created) {
        return;
    }
    if (phase_ == Phase::KeyRevealed) {
        if (now > grace_deadline_) {
            settle_happy(now);
        }
        return;
    }
    // BuyerFunded, SellerFunded, Committed, Acked all sit under the funding
    // deadline: the key must land on-chain within the window.
    if (now > funding_deadline_) {
        settle_refund(now);
    }
}

bool Contract::deadline_passed(std::uint64_t now) const {
    if (is_terminal(phase_) || phase_ == Phase::Created) {
        return false;
    }
    if (phase_ == Phase::KeyRevealed) {
        return now > grace_deadline_;
    }
    return now > funding_deadline_;
}

std::string Contract::clock_guard(std::uint64_t now) {
    if (!clock_ok(now)) {
        return "clock went backwards";
    }
    if (now > last_now_) {
        last_now_ = now;
    }
    // Late inputs are rejected outright; the due settlement fires on a tick.
    if (deadline_passed(now)) {
        return "deadline passed";
    }
    return {};
}

void Contract::credit(Party p, std::int64_t amount) {
    (p == Party::Seller ? ledger_.seller : ledger_.buyer) += amount;
}

void Contract::release_escrow_to(Party target_to, Party dep_a_to, Party dep_b_to) {
    credit(target_to, ledger_.target.amount);
    credit(dep_a_to, ledger_.deposit_a.amount);
    credit(dep_b_to, ledger_.deposit_b.amount);
    ledger_.target.amount = 0;
    ledger_.deposit_a.amount = 0;
    ledger_.deposit_b.amount = 0;
}

void Contract::settle_refund(std::uint64_t now) {
    release_escrow_to(Party::Buyer, Party::Seller, Party::Buyer);
    event(now, "timeout-refund", "expired in " + phase_name(phase_));
    phase_ = Phase::Refunded;
}

void Contract::settle_happy(std::uint64_t now) {
    release_escrow_to(Party::Seller, Party::Seller, Party::Buyer);
    event(now, "timeout-settle", "grace period passed without objection");
    phase_ = Phase::Settled;
}

void Contract::settle_dispute(std::uint64_t now, const Verdict& verdict) {
    const Party honest = verdict.dishonest == Party::Seller ? Party::Buyer : Party::Seller;
    release_escrow_to(honest, honest, honest);
    verdict_ = verdict;
    event(now, "dispute-settled",
          party_name(verdict.dishonest) + " dishonest: " + verdict.reason);
    phase_ = Phase::DisputeResolved;
}

ActionResult Contract::register_certificate(const Certificate& cert, std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    if (registered_) return reject("certificate already registered");
    if (phase_ != Phase::Created) return reject("wrong phase");
    if (cert.root.bytes.size() != scheme_->descriptor().hash_bytes()) {
        return reject("root width does not match scheme");
    }
    if (!certificate_valid(*scheme_, cert)) {
        return reject("certifier signature invalid");
    }
    certificate_ = cert;
    registered_ = true;
    ByteWriter w;
    w.raw(cert.root.bytes);
    w.raw(cert.certifier_signature.bytes);
    w.u32(cert.chunk_bits);
    w.u32(cert.chunk_count);
    w.u64(cert.original_len);
    w.raw(cert.certifier_public_key);
    return accept_action(now, "carol", "register_certificate", w.take());
}

ActionResult Contract::buyer_intent_and_fund(const Digest& target_root, std::int64_t c_target,
                                             std::int64_t c_dep_b, std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    if (!registered_) return reject("no certificate registered");
    if (phase_ != Phase::Created) return reject("wrong phase");
    if (target_root != certificate_.root) return reject("target root mismatch");
    if (c_target < 0 || c_dep_b < 0) return reject("negative amount");
    if (ledger_.buyer < c_target + c_dep_b) return reject("insufficient buyer balance");

    ledger_.buyer -= c_target + c_dep_b;
    ledger_.target = {c_target, Party::Buyer, now + config_.funding_window};
    ledger_.deposit_b = {c_dep_b, Party::Buyer, now + config_.funding_window};
    funding_deadline_ = now + config_.funding_window;
    phase_ = Phase::BuyerFunded;

    ByteWriter w;
    w.raw(target_root.bytes);
    w.u64(static_cast<std::uint64_t>(c_target));
    w.u64(static_cast<std::uint64_t>(c_dep_b));
    return accept_action(now, "buyer", "buyer_intent_and_fund", w.take());
}

ActionResult Contract::seller_fund(std::int64_t c_dep_a, const Bytes& seller_public_key,
                                   std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    if (phase_ != Phase::BuyerFunded) return reject("wrong phase");
    if (c_dep_a <= 0) return reject("seller deposit must be positive");
    if (ledger_.seller < c_dep_a) return reject("insufficient seller balance");
    if (seller_public_key.size() != scheme_->descriptor().public_key_bytes) {
        return reject("bad seller public key length");
    }

    ledger_.seller -= c_dep_a;
    ledger_.deposit_a = {c_dep_a, Party::Seller, funding_deadline_};
    seller_public_key_ = seller_public_key;
    phase_ = Phase::SellerFunded;

    ByteWriter w;
    w.u64(static_cast<std::uint64_t>(c_dep_a));
    w.raw(seller_public_key);
    return accept_action(now, "seller", "seller_fund", w.take());
}

ActionResult Contract::commit(const Digest& committed_value, std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    if (config_.variant == Variant::O1) return reject("no commitment step in this variant");
    if (phase_ != Phase::SellerFunded) return reject("wrong phase");
    if (committed_value.bytes.size() != scheme_->descriptor().hash_bytes()) {
        return reject("commitment width does not match scheme");
    }
    committed_value_ = committed_value;
    phase_ = Phase::Committed;

    ByteWriter w;
    w.raw(committed_value.bytes);
    return accept_action(now, "seller", "commit", w.take());
}

ActionResult Contract::buyer_ack(bool yes, std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    const Phase expected = config_.variant == Variant::O1 ? Phase::SellerFunded : Phase::Committed;
    if (phase_ != expected) return reject("wrong phase");

    ByteWriter w;
    w.u8(yes ? 1 : 0);
    auto res = accept_action(now, "buyer", "buyer_ack", w.take());
    if (yes) {
        phase_ = Phase::Acked;
    } else {
        release_escrow_to(Party::Buyer, Party::Seller, Party::Buyer);
        event(now, "refund", "buyer declined");
        phase_ = Phase::Refunded;
    }
    return res;
}

ActionResult Contract::reveal_key(const SymmetricKey& key, std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    if (phase_ != Phase::Acked) return reject("wrong phase");
    if (key.bytes.size() != scheme_->descriptor().symmetric_key_bytes) {
        return reject("bad key length");
    }
    revealed_key_ = key;  // stored verbatim; the contract cannot judge it yet
    grace_deadline_ = now + config_.grace_window;
    phase_ = Phase::KeyRevealed;

    ByteWriter w;
    w.raw(key.bytes);
    return accept_action(now, "seller", "reveal_key", w.take());
}

Verdict Contract::adjudicate(const DisputeSubmission& submission, OpCounters& ops) const {
    const SymmetricKey& key = *revealed_key_;
    Verdict v;

    if (const auto* on = std::get_if<FullCiphertextEvidence>(&submission)) {
        const Digest submitted_hash = scheme_->hash(on->ciphertext);
        ops.hashes += 1;
        v.evidence["submitted_ciphertext_hash"] = submitted_hash.hex();
        v.evidence["committed_value"] = committed_value_->hex();
        if (submitted_hash != *committed_value_) {
            v.dishonest = Party::Buyer;
            v.reason = "submission does not match commitment";
            return v;
        }
        const Bytes plaintext = scheme_->decrypt(key, 0, on->ciphertext);
        ops.decrypt_bits += 8 * on->ciphertext.size();
        const Digest plain_hash = scheme_->hash(plaintext);
        ops.hashes += 1;
        v.evidence["decrypted_hash"] = plain_hash.hex();
        v.evidence["certificate_root"] = certificate_.root.hex();
        if (plain_hash == certificate_.root) {
            v.dishonest = Party::Buyer;
            v.reason = "key decrypts submission to the certified data";
        } else {
            v.dishonest = Party::Seller;
            v.reason = "key does not decrypt committed ciphertext to certified data";
        }
        return v;
    }

    if (const auto* lg = std::get_if<MerkleChunkEvidence>(&submission)) {
        const Bytes leaf = [&] {
            Bytes b = lg->chunk_hash.bytes;
            b.insert(b.end(), lg->ciphertext.begin(), lg->ciphertext.end());
            return b;
        }();
        const auto vr = merkle::verify_counting(*scheme_, *committed_value_, leaf, lg->proof);
        ops.merkle_fold_steps += vr.fold_steps;
        ops.hashes += vr.hashes;
        v.evidence["committed_root"] = committed_value_->hex();
        v.evidence["claimed_chunk_hash"] = lg->chunk_hash.hex();
        if (!vr.ok) {
            v.dishonest = Party::Buyer;
            v.reason = "merkle proof does not reach committed root";
            return v;
        }
        const Bytes plaintext = scheme_->decrypt(key, lg->proof.leaf_index, lg->ciphertext);
        ops.decrypt_bits += 8 * lg->ciphertext.size();
        const Digest plain_hash = scheme_->hash(plaintext);
        ops.hashes += 1;
        v.evidence["decrypted_hash"] = plain_hash.hex();
        if (plain_hash == lg->chunk_hash) {
            v.dishonest = Party::Buyer;
            v.reason = "chunk decrypts consistently with its claimed hash";
        } else {
            v.dishonest = Party::Seller;
            v.reason = "committed chunk does not decrypt to its claimed hash";
        }
        return v;
    }

    const auto& o1 = std::get<SignedChunkEvidence>(submission);
    Bytes pair = o1.chunk_hash.bytes;
    pair.insert(pair.end(), o1.ciphertext.begin(), o1.ciphertext.end());
    const Digest message = scheme_->hash(pair);
    ops.hashes += 1;
    const bool sig_ok = scheme_->verify(seller_public_key_, message.bytes, o1.signature);
    ops.signature_verifies += 1;
    v.evidence["signed_message_hash"] = message.hex();
    v.evidence["claimed_chunk_hash"] = o1.chunk_hash.hex();
    if (!sig_ok) {
        v.dishonest = Party::Buyer;
        v.reason = "seller signature does not verify";
        return v;
    }
    const Bytes plaintext = scheme_->decrypt(key, o1.chunk_index, o1.ciphertext);
    ops.decrypt_bits += 8 * o1.ciphertext.size();
    const Digest plain_hash = scheme_->hash(plaintext);
    ops.hashes += 1;
    v.evidence["decrypted_hash"] = plain_hash.hex();
    if (plain_hash == o1.chunk_hash) {
        v.dishonest = Party::Buyer;
        v.reason = "chunk decrypts consistently with its claimed hash";
    } else {
        v.dishonest = Party::Seller;
        v.reason = "signed chunk does not decrypt to its claimed hash";
    }
    return v;
}

ActionResult Contract::dispute(const DisputeSubmission& submission, std::uint64_t now) {
    if (const auto err = clock_guard(now); !err.empty()) return reject(err);
    if (phase_ != Phase::KeyRevealed) return reject("wrong phase");
    if (submission_variant(submission) != config_.variant) {
        return reject("submission variant mismatch");
    }

    const std::uint32_t hash_bytes = scheme_->descriptor().hash_bytes();
    try {
        if (const auto* on = std::get_if<FullCiphertextEvidence>(&submission)) {
            if (on->ciphertext.empty()) return reject("empty ciphertext");
            scheme_->plaintext_bytes(on->ciphertext.size());
        } else if (const auto* lg = std::get_if<MerkleChunkEvidence>(&submission)) {
            if (lg->chunk_hash.bytes.size() != hash_bytes) return reject("bad chunk hash width");
            scheme_->plaintext_bytes(lg->ciphertext.size());
            if (lg->proof.steps.size() > 32) return reject("oversized proof");
            for (const auto& step : lg->proof.steps) {
                if (step.sibling.bytes.size() != hash_bytes) return reject("bad sibling width");
            }
        } else {
            const auto& o1 = std::get<SignedChunkEvidence>(submission);
            if (o1.chunk_hash.bytes.size() != hash_bytes) return reject("bad chunk hash width");
            scheme_->plaintext_bytes(o1.ciphertext.size());
            if (o1.signature.bytes.size() != scheme_->descriptor().signature_bytes) {
                return reject("bad signature width");
            }
        }
    } catch (const std::invalid_argument& e) {
        return reject(e.what());
    }

    OpCounters ops;
    const Verdict verdict = adjudicate(submission, ops);
    cost_.adjudication.hashes += ops.hashes;
    cost_.adjudication.decrypt_bits += ops.decrypt_bits;
    cost_.adjudication.signature_verifies += ops.signature_verifies;
    cost_.adjudication.merkle_fold_steps += ops.merkle_fold_steps;

    Bytes wire = serialize_submission(submission);
    cost_.dispute_submission_bytes = wire.size();
    auto res = accept_action(now, "buyer", "dispute", std::move(wire), ops,
                             party_name(verdict.dishonest) + " dishonest");
    settle_dispute(now, verdict);
    return res;
}

ActionResult Contract::tick(std::uint64_t now) {
    if (!clock_ok(now)) return reject("clock went backwards");
    touch(now);
    return {true, {}};
}

std::string Contract::state_json() const {
    json j;
    j["phase"] = phase_name(phase_);
    j["registered"] = registered_;
    j["certificate_root"] = registered_ ? certificate_.root.hex() : "";
    j["committed_value"] = committed_value_ ? committed_value_->hex() : "";
    j["revealed_key"] = revealed_key_ ? to_hex(revealed_key_->bytes) : "";
    j["seller_public_key"] = to_hex(seller_public_key_);
    j["funding_deadline"] = funding_deadline_;
    j["grace_deadline"] = grace_deadline_;
    j["balances"] = {{"buyer", ledger_.buyer}, {"seller", ledger_.seller}};
    j["escrow"] = {{"deposit_a", ledger_.deposit_a.amount},
                   {"deposit_b", ledger_.deposit_b.amount},
                   {"target", ledger_.target.amount}};
    if (verdict_) {
        j["verdict"] = {{"dishonest", party_name(verdict_->dishonest)},
                        {"evidence", verdict_->evidence},
                        {"reason", verdict_->reason}};
    } else {
        j["verdict"] = nullptr;
    }
    j["cost"] = {{"onchain_bytes", cost_.onchain_bytes},
                 {"onchain_actions", cost_.onchain_actions},
                 {"dispute_submission_bytes", cost_.dispute_submission_bytes},
                 {"ops", ops_to_json(cost_.adjudication)}};
    return j.dump();
}

Contract replay_log(std::shared_ptr<const Scheme> scheme, Contract::Config config,
                    const std::vector<ActionRecord>& log) {
    Contract contract(scheme, config);
    const auto& desc = scheme->descriptor();
    for (const ActionRecord& rec : log) {
        if (rec.kind == ActionRecord::Kind::Event) {
            if (rec.name.rfind("timeout", 0) == 0) {
                contract.tick(rec.tick);
            }
            continue;
        }
        ByteReader r(rec.payload);
        if (rec.name == "register_certificate") {
            Certificate cert;
            cert.root = Digest{r.raw(desc.hash_bytes())};
            cert.certifier_signature = Signature{r.raw(desc.signature_bytes)};
            cert.chunk_bits = r.u32();
            cert.chunk_count = r.u32();
            cert.original_len = r.u64();
            cert.certifier_public_key = r.raw(desc.public_key_bytes);
            contract.register_certificate(cert, rec.tick);
        } else if (rec.name == "buyer_intent_and_fund") {
            Digest root{r.raw(desc.hash_bytes())};
            const auto c_target = static_cast<std::int64_t>(r.u64());
            const auto c_dep_b = static_cast<std::int64_t>(r.u64());
            contract.buyer_intent_and_fund(root, c_target, c_dep_b, rec.tick);
        } else if (rec.name == "seller_fund") {
            const auto c_dep_a = static_cast<std::int64_t>(r.u64());
            Bytes pk = r.raw(desc.public_key_bytes);
            contract.seller_fund(c_dep_a, pk, rec.tick);
        } else if (rec.name == "commit") {
            contract.commit(Digest{r.raw(desc.hash_bytes())}, rec.tick);
        } else if (rec.name == "buyer_ack") {
            contract.buyer_ack(r.u8() != 0, rec.tick);
        } else if (rec.name == "reveal_key") {
            SymmetricKey key{r.raw(desc.symmetric_key_bytes), {}};
            contract.reveal_key(key, rec.tick);
        } else if (rec.name == "dispute") {
            contract.dispute(parse_submission(*scheme, config.variant, rec.payload), rec.tick);
        } else {
            throw std::runtime_error("replay: unknown action " + rec.name);
        }
    }
    return contract;
}

}  // namespace blockmark
