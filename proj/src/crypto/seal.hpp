// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "core/config.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"
#include "crypto/prf.hpp"

namespace partoram::crypto {

// Fresh per level construction; the permutation and MAC keys derive from `master`.
struct LevelKey {
    Key128 master{};
    // Subkeys of `master` for the sealer's cipher mode, when precomputed.
    bool derived = false;
    std::array<std::uint8_t, 32> aead{};
    Key128 mac[2]{};
};

using CipherBlock = std::vector<std::uint8_t>;

inline constexpr std::size_t kNonceBytes = 12;
inline constexpr std::size_t kTagBytes = 16;
inline constexpr std::size_t kIdBytes = 8;
inline constexpr std::int64_t kMetaIndex = -1;

// Wire size of a sealed block: nonce || E(id || payload) || tag.
constexpr std::size_t sealed_block_size(std::size_t payload_bytes) {
    return kNonceBytes + kIdBytes + payload_bytes + kTagBytes;
}

// Metadata is one (id, read-flag) pair per slot, sealed as a single message.
inline constexpr std::size_t kMetaEntryBytes = 9;
constexpr std::size_t sealed_meta_size(std::size_t slots) {
    return kNonceBytes + kMetaEntryBytes * slots + kTagBytes;
}

// Authenticated encryption keyed per level. The tag covers the intra-level
// index, so a block moved to another index or replayed from an older epoch
// (whose key is gone) fails to open.
class Sealer {
public:
    Sealer(CipherMode mode, std::uint64_t seed);

    CipherMode mode() const { return mode_; }

    // `subkeys` precomputes the cipher subkeys for sealing under this key.
    LevelKey fresh_key(bool subkeys = true);

    CipherBlock seal(const LevelKey& key, std::int64_t index,
                     std::span<const std::uint8_t> plaintext);
    // Throws IntegrityViolation on any mismatch.
    std::vector<std::uint8_t> open(const LevelKey& key, std::int64_t index,
                                   std::span<const std::uint8_t> sealed) const;

    CipherBlock seal_block(const LevelKey& key, std::int64_t index, BlockId id,
                           std::span<const std::uint8_t> payload);
    Block open_block(const LevelKey& key, std::int64_t index,
                     std::span<const std::uint8_t> sealed) const;

private:
    void fill_random(std::uint8_t* out, std::size_t n);

    CipherMode mode_;
    Rng rng_;
};

}  // namespace partoram::crypto
