// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crypto/seal.hpp"

namespace partoram::store {

using crypto::CipherBlock;
using Bytes = std::vector<std::uint8_t>;

struct LevelRef {
    std::uint32_t p = 0;
    std::uint8_t level = 0;
    std::uint32_t epoch = 0;
};

struct FetchRequest {
    LevelRef ref;
    std::uint32_t offset = 0;
};

struct StoreSetup {
    std::uint32_t partitions = 0;
    std::vector<std::uint32_t> level_sizes;
    std::uint32_t sealed_bytes = 0;      // accounted size of one block
    std::uint32_t stored_bytes = 0;      // bytes actually held per slot (0 in metadata-only runs)
    std::uint32_t compressed_elems = 0;  // field elements per compressed upload vector
    bool delete_on_read = false;
    // Bit l of initial_fill[p] marks level l of partition p as an initial virtual all-zero level.
    std::vector<std::uint64_t> initial_fill;
};

// One chunk of a level construction. `first == 0` starts a new epoch; the
// chunk that reaches `total` items completes the level. Compressed uploads
// carry total = level_size / 2 field-element vectors.
struct LevelUpload {
    LevelRef ref;  // ref.epoch is the epoch being created
    std::uint32_t level_size = 0;
    std::uint32_t first = 0;
    std::uint32_t total = 0;
    bool compressed = false;
    std::vector<Bytes> items;
    std::optional<Bytes> meta;
};

struct TransferStats {
    std::uint64_t blocks_up = 0;
    std::uint64_t blocks_down = 0;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    std::uint64_t meta_bytes = 0;
    std::uint64_t peak_server_blocks = 0;
    std::uint64_t resident_blocks = 0;
    std::uint64_t fetch_batches = 0;
    // Filled by the client side: shuffle work per amortizer time step.
    std::vector<std::uint32_t> per_step_work;

    bool same_counters(const TransferStats& o) const {
        return blocks_up == o.blocks_up && blocks_down == o.blocks_down &&
               bytes_up == o.bytes_up && bytes_down == o.bytes_down &&
               meta_bytes == o.meta_bytes && peak_server_blocks == o.peak_server_blocks &&
               resident_blocks == o.resident_blocks && fetch_batches == o.fetch_batches;
    }
};

// What an untrusted storage server exposes. Implementations throw ProtocolError
// on contract violations.
class BlockStore {
public:
    virtual ~BlockStore() = default;

    virtual void setup(const StoreSetup& setup) = 0;
    // One logical round trip; replies in request order.
    virtual std::vector<CipherBlock> fetch_blocks(const std::vector<FetchRequest>& requests) = 0;
    virtual void store_level(const LevelUpload& upload) = 0;
    virtual Bytes fetch_meta(const LevelRef& ref) = 0;
    virtual void mark_unfilled(const LevelRef& ref) = 0;
    virtual TransferStats stats() = 0;
};

}  // namespace partoram::store
