// Copyright (c) 2026 The blockmark developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#ifndef BLOCKMARK_CRYPTO_HPP
#define BLOCKMARK_CRYPTO_HPP

#include "blockmark/bytes.hpp"

#include <memory>
#include <string>

namespace blockmark {

/// Sizes of every primitive, serialized into transcript headers so reports
/// and the cost meter are self-describing. alpha = alpha_num/alpha_den is the
/// ciphertext expansion factor.
struct SchemeDescriptor {
    std::string name;
    std::uint32_t hash_bits = 256;
    std::uint32_t alpha_num = 1;
    std::uint32_t alpha_den = 1;
    std::uint32_t signature_bytes = 65;
    std::uint32_t symmetric_key_bytes = 32;
    std::uint32_t public_key_bytes = 32;

    std::uint32_t hash_bytes() const { return hash_bits / 8; }
    /// |ciphertext| for a plaintext of `n` bytes.
    std::uint64_t ciphertext_bytes(std::uint64_t n) const {
        return ceil_mul_div(n, alpha_num, alpha_den);
    }
    std::string to_string() const;
};

struct Digest {
    Bytes bytes;

    bool operator==(const Digest&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

struct SymmetricKey {
    Bytes bytes;
    std::string key_id;  // opaque transcript label, not key material

    bool operator==(const SymmetricKey& o) const { return bytes == o.bytes; }
};

struct Signature {
    Bytes bytes;

    bool operator==(const Signature&) const = default;
};

struct SignatureKeyPair {
    Bytes public_key;
    Bytes secret_key;
};

/// Deterministic, swappable primitives. All operations are pure functions of
/// their inputs; values are immutable and safe to share across threads.
class Scheme {
  public:
    virtual ~Scheme() = default;

    const SchemeDescriptor& descriptor() const { return desc_; }

    virtual Digest hash(ByteView data) const = 0;

    /// Deterministic given (key, chunk ordinal, plaintext). The ordinal is
    /// bound into the keystream so equal chunks never share ciphertext.
    virtual Bytes encrypt(const SymmetricKey& key, std::uint64_t chunk_index,
                          ByteView plaintext) const = 0;

    /// Inverse of encrypt. Throws std::invalid_argument if the ciphertext
    /// length is not ceil(alpha * n) for any plaintext length n.
    virtual Bytes decrypt(const SymmetricKey& key, std::uint64_t chunk_index,
                          ByteView ciphertext) const = 0;

    virtual SignatureKeyPair keypair_from_seed(ByteView seed) const = 0;
    virtual Signature sign(ByteView secret_key, ByteView message) const = 0;
    /// Never throws: malformed signatures are simply invalid.
    virtual bool verify(ByteView public_key, ByteView message,
                        const Signature& sig) const = 0;

    SymmetricKey symmetric_key_from_seed(ByteView seed) const;

    /// Plaintext length recovered from a ciphertext length, or throws when no
    /// length n satisfies ceil(alpha*n) == ct_len.
    std::uint64_t plaintext_bytes(std::uint64_t ciphertext_len) const;

  protected:
    explicit Scheme(SchemeDescriptor desc) : desc_(std::move(desc)) {}

    SchemeDescriptor desc_;
};

/// Production default: SHA-256 (truncated to hash_bits), hash-keystream CTR
/// cipher, Ed25519 signatures padded with one format byte to the 65-byte
/// on-chain signature layout.
std::shared_ptr<const Scheme> make_standard_scheme(SchemeDescriptor desc);

/// Tiny non-cryptographic scheme for oracle tests: splitmix-based mixing in
/// place of a real hash and a recomputable tag in place of a real signature.
/// Not secure; keys are forgeable by anyone holding the public half.
std::shared_ptr<const Scheme> make_toy_scheme(SchemeDescriptor desc);

/// Dispatch by descriptor name: "sha256-ed25519" or "toy".
std::shared_ptr<const Scheme> make_scheme(const SchemeDescriptor& desc);

SchemeDescriptor default_descriptor();

}  // namespace blockmark

#endif  // BLOCKMARK_CRYPTO_HPP
