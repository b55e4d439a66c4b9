// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef BLOCKMARK_MERKLE_HPP
#define BLOCKMARK_MERKLE_HPP

#include "blockmark/bytes.hpp"
#include "blockmark/crypto.hpp"

#include <vector>

namespace blockmark::merkle {

/// Leaf hashes are tagged 0x00 and internal nodes 0x01 so an internal node
/// can never masquerade as a leaf in a dispute proof.
Digest leaf_hash(const Scheme& scheme, ByteView leaf);
Digest node_hash(const Scheme& scheme, const Digest& left, const Digest& right);

struct ProofStep {
    enum class Side : std::uint8_t { Left = 0, Right = 1 };
    Side side;  // where the sibling sits relative to the running node
    Digest sibling;

    bool operator==(const ProofStep&) const = default;
};

struct Proof {
    std::uint32_t leaf_index = 0;
    std::vector<ProofStep> steps;

    bool operator==(const Proof&) const = default;
};

class Tree {
  public:
    /// Builds the binary tree over `leaves`. Odd levels duplicate their last
    /// node. Throws std::invalid_argument on an empty leaf list.
    Tree(const Scheme& scheme, const std::vector<Bytes>& leaves);

    const Digest& root() const { return levels_.back().front(); }
    std::size_t leaf_count() const { return leaf_count_; }
    /// Proof length in siblings: ceil(log2(padded leaf count)).
    std::size_t depth() const { return levels_.size() - 1; }

    /// Throws std::out_of_range for index >= leaf_count().
    Proof prove(std::uint32_t index) const;

  private:
    std::size_t leaf_count_;
    std::vector<std::vector<Digest>> levels_;
};

struct VerifyResult {
    bool ok = false;
    std::uint64_t fold_steps = 0;  // node-hash folds performed
    std::uint64_t hashes = 0;      // total hash invocations (leaf + folds)
};

/// Pure fold of `leaf` up through `proof` against `root`. The proof's side
/// bytes must agree with the bits of leaf_index and the index must fit in
/// the proof's depth; any tampered field fails verification.
VerifyResult verify_counting(const Scheme& scheme, const Digest& root, ByteView leaf,
                             const Proof& proof);

inline bool verify(const Scheme& scheme, const Digest& root, ByteView leaf,
                   const Proof& proof) {
    return verify_counting(scheme, root, leaf, proof).ok;
}

/// Wire format: leaf_index (4-byte BE) | sibling count (1 byte) |
/// per sibling: side byte | digest. Billed verbatim as on-chain upload.
Bytes serialize_proof(const Proof& proof);
Proof parse_proof(const Scheme& scheme, ByteReader& reader);

}  // namespace blockmark::merkle

#endif  // BLOCKMARK_MERKLE_HPP
