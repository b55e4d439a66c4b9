// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "blockmark/merkle.hpp"

namespace blockmark::merkle {

Digest leaf_hash(const Scheme& scheme, ByteView leaf) {
    ByteWriter w;
    w.u8(0x00);
    w.raw(leaf);
    return scheme.hash(w.bytes());
}

Digest node_hash(const Scheme& scheme, const Digest& left, const Digest& right) {
    ByteWriter w;
    w.u8(0x01);
    w.raw(left.bytes);
    w.raw(right.bytes);
    return scheme.hash(w.bytes());
}

Tree::Tree(const Scheme& scheme, const std::vector<Bytes>& leaves)
    : leaf_count_(leaves.size()) {
    if (leaves.empty()) {
        throw std::invalid_argument("merkle: empty leaf list");
    }
    std::vector<Digest> level;
    level.reserve(leaves.size());
    for (const Bytes& leaf : leaves) {
        level.push_back(leaf_hash(scheme, leaf));
    }
    levels_.push_back(std::move(level));
    while (levels_.back().size() > 1) {
        const auto& below = levels_.back();
        std::vector<Digest> above;
        above.reserve((below.size() + 1) / 2);
        for (std::size_t i = 0; i < below.size(); i += 2) {
            const Digest& left = below[i];
            const Digest& right = (i + 1 < below.size()) ? below[i + 1] : below[i];
            above.push_back(node_hash(scheme, left, right));
        }
        levels_.push_back(std::move(above));
    }
}

Proof Tree::prove(std::uint32_t index) const {
    if (index >= leaf_count_) {
        throw std::out_of_range("merkle: leaf index out of range");
    }
    Proof proof;
    proof.leaf_index = index;
    std::size_t pos = index;
    for (std::size_t lvl = 0; lvl + 1 < levels_.size(); ++lvl) {
        const auto& level = levels_[lvl];
        ProofStep step;
        if (pos % 2 == 0) {
            step.side = ProofStep::Side::Right;
            step.sibling = (pos + 1 < level.size()) ? level[pos + 1] : level[pos];
        } else {
            step.side = ProofStep::Side::Left;
            step.sibling = level[pos - 1];
        }
        proof.steps.push_back(std::move(step));
        pos /= 2;
    }
    return proof;
}

VerifyResult verify_counting(const Scheme& scheme, const Digest& root, ByteView leaf,
                             const Proof& proof) {
    VerifyResult res;
    // The index must be expressible within the proof's depth.
    if (proof.steps.size() < 32 &&
        (proof.leaf_index >> proof.steps.size()) != 0) {
        return res;
    }
    Digest cur = leaf_hash(scheme, leaf);
    res.hashes += 1;
    for (std::size_t lvl = 0; lvl < proof.steps.size(); ++lvl) {
        const ProofStep& step = proof.steps[lvl];
        const bool node_is_right = ((proof.leaf_index >> lvl) & 1) != 0;
        const auto expected = node_is_right ? ProofStep::Side::Left : ProofStep::Side::Right;
        if (step.side != expected) {
            return res;
        }
        cur = (step.side == ProofStep::Side::Left) ? node_hash(scheme, step.sibling, cur)
                                                   : node_hash(scheme, cur, step.sibling);
        res.fold_steps += 1;
        res.hashes += 1;
    }
    res.ok = (cur == root);
    return res;
}

Bytes serialize_proof(const Proof& proof) {
    ByteWriter w;
    w.u32(proof.leaf_index);
    w.u8(static_cast<std::uint8_t>(proof.steps.size()));
    for (const ProofStep& step : proof.steps) {
        w.u8(static_cast<std::uint8_t>(step.side));
        w.raw(step.sibling.bytes);
    }
    return w.take();
}

Proof parse_proof(const Scheme& scheme, ByteReader& reader) {
    Proof proof;
    proof.leaf_index = reader.u32();
    const std::uint8_t count = reader.u8();
    proof.steps.reserve(count);
    for (std::uint8_t i = 0; i < count; ++i) {
        ProofStep step;
        const std::uint8_t side = reader.u8();
        if (side > 1) {
            throw std::runtime_error("merkle: bad side byte");
        }
        step.side = static_cast<ProofStep::Side>(side);
        step.sibling = Digest{reader.raw(scheme.descriptor().hash_bytes())};
        proof.steps.push_back(std::move(step));
    }
    return proof;
}

}  // namespace blockmark::merkle
