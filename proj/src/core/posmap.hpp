// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "core/types.hpp"
#include "crypto/prf.hpp"

namespace partoram {

// Position map over ids [0, n).
//
// Plain entries are one little-endian u64 each:
//   bits  0..1   kind (0 zeroed, 1 server, 2 cache slot, 3 pending)
//   bits  2..25  partition or slot
//   bits 26..31  level
//   bits 32..63  intra-level index
//
// CounterCompressed keeps a 32-bit access counter j per id plus a u32
// holding kind (2 bits), level (5 bits) and index (25 bits). The partition
// or slot is never stored: it is PRF(id, j) mod P.
//
// In both modes a never-accessed id lives in partition PRF(id, 0) mod P.
class PositionMap {
public:
    static constexpr std::size_t kPlainEntryBytes = 8;
    static constexpr double kCompressedModelBytes = 0.255;

    PositionMap(PosMapMode mode, std::uint64_t n, std::uint32_t partitions,
                const crypto::Key128& prf_key);

    Position get(BlockId id) const;
    void set(BlockId id, const Position& pos);

    // Slot PRF(id, j+1) mod P used by the next access of `id`.
    std::uint32_t next_slot(BlockId id) const;
    std::uint32_t counter(BlockId id) const;

    // Slot chosen by the counter PRF; shared so plain-mode runs can use the same choice.
    std::uint32_t prf_slot(BlockId id, std::uint32_t j) const;

    // Enables the intra-level index bound check for Server positions.
    void set_level_sizes(std::vector<std::uint32_t> sizes) { level_sizes_ = std::move(sizes); }

    std::uint64_t size() const { return n_; }
    PosMapMode mode() const { return mode_; }
    std::uint32_t partitions() const { return partitions_; }

    struct MemoryEstimate {
        double model_bytes = 0;
        std::uint64_t actual_bytes = 0;
    };
    MemoryEstimate memory_estimate() const;
    static MemoryEstimate model_estimate(PosMapMode mode, std::uint64_t n);

    static std::uint64_t encode_plain(const Position& pos);
    static Position decode_plain(std::uint64_t raw);

private:
    void check_id(BlockId id) const;
    void check_pos(const Position& pos) const;

    PosMapMode mode_;
    std::uint64_t n_;
    std::uint32_t partitions_;
    crypto::Key128 key_;
    std::vector<std::uint64_t> plain_;
    std::vector<std::uint32_t> counters_;
    std::vector<std::uint32_t> fine_;
    std::vector<std::uint32_t> level_sizes_;
};

}  // namespace partoram
