// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef BLOCKMARK_CHUNK_HPP
#define BLOCKMARK_CHUNK_HPP

#include "blockmark/bytes.hpp"
#include "blockmark/crypto.hpp"
#include "blockmark/merkle.hpp"

#include <optional>
#include <vector>

namespace blockmark {

/// Protocol variants, named after their dispute upload cost.
enum class Variant { ON, OLogN, O1 };

std::string variant_name(Variant v);
std::optional<Variant> parse_variant(const std::string& name);

/// Data split into M chunks of chunk_bits each; the last chunk is
/// zero-padded. join() reverses the split exactly.
struct ChunkedData {
    std::vector<Bytes> chunks;
    std::uint64_t original_len = 0;  // bytes before padding
    std::uint32_t chunk_bits = 0;    // L
    std::uint32_t chunk_count() const { return static_cast<std::uint32_t>(chunks.size()); }
};

/// Throws std::invalid_argument on empty data or L not a positive multiple
/// of 8.
ChunkedData split(ByteView data, std::uint32_t chunk_bits);
Bytes join(const ChunkedData& chunked);

/// One element of what the seller ships off-chain. The O(N) variant uses a
/// single element holding the whole ciphertext; chunked variants use one per
/// chunk. `signature`, present only for O(1), covers
/// hash(chunk_hash || ciphertext).
struct PayloadElement {
    Digest chunk_hash;  // hash of the plaintext chunk (empty for O(N))
    Bytes ciphertext;
    std::optional<Signature> signature;
};

struct OffchainPayload {
    Variant variant = Variant::ON;
    std::vector<PayloadElement> elements;
};

/// Composite dispute-tree leaf for the O(log N) variant:
/// hash(chunk) || ciphertext.
Bytes payload_leaf(const PayloadElement& element);
std::vector<Bytes> payload_leaves(const OffchainPayload& payload);

/// The trusted certifier's anchor: a root over the plaintext (plain hash of
/// the whole data for O(N), Merkle root over chunk hashes otherwise), signed
/// by the certifier.
struct Certificate {
    Digest root;
    Signature certifier_signature;
    std::uint32_t chunk_bits = 0;
    std::uint32_t chunk_count = 0;
    std::uint64_t original_len = 0;
    Bytes certifier_public_key;
};

Digest certificate_root(const Scheme& scheme, Variant variant, const ChunkedData& chunked);
Certificate make_certificate(const Scheme& scheme, Variant variant, const ChunkedData& chunked,
                             const SignatureKeyPair& certifier);
bool certificate_valid(const Scheme& scheme, const Certificate& cert);

/// Builds the off-chain payload for a variant. Chunk m is encrypted under
/// ordinal m (the O(N) whole-data ciphertext uses ordinal 0). Throws when the
/// O(1) variant is requested without a seller signing key.
OffchainPayload make_payload(const Scheme& scheme, Variant variant, const ChunkedData& chunked,
                             const SymmetricKey& key, const Bytes* seller_secret_key = nullptr);

/// Wire format: variant byte | element count (4-byte BE) | per element:
/// length-prefixed chunk hash, length-prefixed ciphertext and, for O(1), a
/// length-prefixed signature. Billed verbatim as off-chain transfer.
Bytes serialize_payload(const OffchainPayload& payload);
OffchainPayload parse_payload(ByteView data);

/// Fixed framing of serialize_payload for M elements: header plus the
/// per-element length prefixes.
std::uint64_t payload_framing_bytes(Variant variant, std::uint32_t element_count);

/// Stationary point of the continuous dispute-cost curve: h / (alpha ln 2).
/// Independent of the data size.
double optimal_chunk_bits(std::uint32_t hash_bits, double alpha);

/// Continuous dispute-cost model (log2 taken over the reals):
/// (log2(N/L) + 1) h + alpha L. Used by the chunk-size optimizer.
double dispute_cost_bits_continuous(std::uint64_t data_bits, double chunk_bits,
                                    std::uint32_t hash_bits, double alpha);

/// Exact dispute payload size in bits, as actually uploadable:
///   O(N):      alpha N              (whole ciphertext)
///   O(log N):  (ceil(log2 Mp)+1) h + alpha L   (proof path + claimed leaf)
///   O(1):      h + alpha L + sig    (claimed pair + seller signature)
/// Rational alpha rounds ciphertexts up to whole bytes. Data and chunk sizes
/// must be byte-aligned.
std::uint64_t dispute_payload_bits(Variant variant, std::uint64_t data_bits,
                                   std::uint32_t chunk_bits, std::uint32_t hash_bits,
                                   std::uint32_t alpha_num, std::uint32_t alpha_den,
                                   std::uint32_t signature_bits);

}  // namespace blockmark

#endif  // BLOCKMARK_CHUNK_HPP
