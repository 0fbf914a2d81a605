// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "blockstore/contract.hpp"
#include "core/config.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"
#include "crypto/prp.hpp"
#include "crypto/seal.hpp"

namespace partoram::partition {

// Engine-side view of the position map. `gen` identifies one construction of
// one level across the whole engine, so it alone pins down (p, level, epoch).
class Locator {
public:
    virtual ~Locator() = default;
    virtual bool holds(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
                       std::uint32_t gen) const = 0;
    virtual void place(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
                       std::uint32_t gen) = 0;
    virtual void place_pending(BlockId id, std::uint32_t p) = 0;
};

struct EngineParams {
    Geometry geo;
    PayloadMode payload_mode = PayloadMode::Full;
    std::uint32_t payload_bytes = 0;     // plaintext payload carried per block
    std::uint32_t accounted_payload = 0;  // B used for byte accounting
    CipherMode cipher = CipherMode::Aead;
    bool compression = false;
    bool delete_on_read = false;
    bool fetch_metadata = true;  // false in concurrent mode (client bit arrays)
    // Rebuild right after a read leaves a level without spare unread slots.
    // Needed only when reads are not paired with piggybacked writes.
    bool eager_exhaustion_check = false;
    std::uint64_t seed = 1;
};

struct LevelState {
    bool filled = false;
    bool virtual_zero = false;
    std::uint32_t size = 0;
    std::uint32_t half = 0;
    std::uint32_t k = 0;    // reals occupy buffer indices [0, k)
    std::uint32_t cnt = 0;  // next dummy buffer index
    std::uint32_t reads = 0;
    std::uint32_t epoch = 0;
    std::uint32_t gen = 0;
    bool compressed = false;  // only indices < half are authenticated rows
    crypto::LevelKey key;
    crypto::Prp prp;
    std::vector<std::uint32_t> perm;  // prp over the whole level when tabulated
    std::vector<BlockId> ids;
    std::vector<std::uint64_t> read_bits;  // over buffer indices
    // Concurrent mode: chosen-unread indices not yet fetched (S').
    bool frozen = false;
    std::vector<std::uint32_t> pool;

    bool is_read(std::uint32_t i) const { return (read_bits[i >> 6] >> (i & 63)) & 1; }
    std::uint32_t offset(std::uint32_t i) const {
        return perm.empty() ? static_cast<std::uint32_t>(prp.apply(i)) : perm[i];
    }
};

struct PartitionState {
    std::vector<LevelState> levels;
    std::uint64_t writes = 0;  // C_p
    std::uint32_t load = 0;    // real blocks logically in the partition
};

struct Entry {
    BlockId id = kDummy;
    Payload payload;
};

struct ReadTarget {
    BlockId id = kDummy;
    std::uint8_t level = 0;
    std::uint32_t index = 0;
};

// A level built client-side, uploaded in one or more chunks, then installed.
struct PreparedLevel {
    std::uint8_t level = 0;
    LevelState state;
    std::vector<store::Bytes> items;
    store::Bytes meta;
    std::uint32_t sent = 0;
    bool uploaded() const { return sent == items.size(); }
};

struct EngineCounters {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint64_t dummy_writes = 0;
    std::uint64_t forced_reshuffles = 0;
    std::uint64_t levels_built = 0;
    std::uint64_t max_load = 0;
    std::uint64_t shuffle_buffer_peak = 0;
};

class Engine {
public:
    Engine(EngineParams params, store::BlockStore& store, Locator& locator);

    // Random initial fill per partition (top always filled); no block upload.
    void setup(Rng& rng);

    // p_read: one fetch per filled level in a single batch. `target` names the
    // real block to return, or is null for a dummy read.
    Payload read(std::uint32_t p, ReadTarget* target);
    // p_write: reshuffle levels 0..l0 plus the incoming block into the first
    // unfilled level (top if none).
    void write(std::uint32_t p, Entry incoming);

    // ---- building blocks shared with the amortizer ----
    const EngineParams& params() const { return params_; }
    const Geometry& geo() const { return params_.geo; }
    PartitionState& part(std::uint32_t p) { return parts_[p]; }
    const PartitionState& part(std::uint32_t p) const { return parts_[p]; }
    store::BlockStore& store() { return store_; }
    Locator& locator() { return locator_; }
    EngineCounters& counters() { return counters_; }
    const EngineCounters& counters() const { return counters_; }

    // Marks index i read and returns its fetch request.
    store::FetchRequest take(std::uint32_t p, std::uint8_t level, std::uint32_t i);
    std::uint32_t next_dummy(std::uint32_t p, std::uint8_t level);
    // Half the level's slots: every unread real plus unread dummies (and, if
    // needed, unread stale slots). `protect` counts as real.
    std::vector<std::uint32_t> choose_unread(std::uint32_t p, std::uint8_t level,
                                             const ReadTarget* protect) const;
    bool is_live_real(std::uint32_t p, std::uint8_t level, std::uint32_t i) const;
    // Checks and decrypts a fetched block. Returns the payload for reals.
    Block open_fetched(std::uint32_t p, std::uint8_t level, std::uint32_t i,
                       const crypto::CipherBlock& cb) const;
    // Cross-checks server metadata against the client copy (full payload mode).
    void verify_meta(std::uint32_t p, std::uint8_t level, const store::Bytes& sealed) const;
    void retire(std::uint32_t p, std::uint8_t level);

    // Splits entries across output levels, largest first, within real capacity.
    std::vector<std::vector<Entry>> distribute(const std::vector<std::uint8_t>& outputs,
                                               std::vector<Entry> entries) const;
    PreparedLevel prepare(std::uint32_t p, std::uint8_t level, std::vector<Entry> entries);
    // Sends up to `max_items` items; returns how many were sent.
    std::uint32_t upload(std::uint32_t p, PreparedLevel& lvl, std::uint32_t max_items);
    // Installs a fully uploaded level. `keep(id)` false skips placing that id.
    void install(std::uint32_t p, PreparedLevel&& lvl,
                 const std::function<bool(BlockId)>& keep = {});

    std::uint32_t fill_pattern(std::uint32_t p) const;
    std::uint32_t last_consecutive(std::uint32_t p) const;  // l0 + 1
    void note_load(std::uint32_t p, int delta);

    // Synchronous shuffle of `inputs` plus `extra` into `outputs`.
    void shuffle_sync(std::uint32_t p, const std::vector<std::uint8_t>& inputs,
                      const std::vector<std::uint8_t>& outputs, std::vector<Entry> extra,
                      ReadTarget* protect);
    // Rebuilds the partition when a level ran out of unread slots; keeps the
    // write counter consistent with the new fill pattern.
    void force_reshuffle(std::uint32_t p, std::uint8_t exhausted, ReadTarget* protect);
    // Runs force_reshuffle when any filled level has no spare unread slots.
    bool ensure_readable(std::uint32_t p, ReadTarget* protect);

    std::uint32_t sealed_bytes() const;
    std::uint32_t stored_bytes() const;
    std::uint32_t compressed_elems() const;

private:
    store::LevelRef ref(std::uint32_t p, std::uint8_t level) const;

    EngineParams params_;
    store::BlockStore& store_;
    Locator& locator_;
    crypto::Sealer sealer_;
    std::vector<PartitionState> parts_;
    std::uint32_t gen_counter_ = 0;
    EngineCounters counters_;
};

}  // namespace partoram::partition
