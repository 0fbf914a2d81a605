// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "core/posmap.hpp"
#include "core/rng.hpp"
#include "partition/engine.hpp"

namespace partoram::framework {

// Position bookkeeping as seen by the access algorithm.
class Directory : public partition::Locator {
public:
    // Cache slot for the next access of `id`.
    virtual std::uint32_t choose_slot(BlockId id, Rng& rng) = 0;
    // Returns the old position and records CacheSlot(slot).
    virtual Position exchange(BlockId id, std::uint32_t slot) = 0;
    virtual std::uint64_t resident_bytes() const = 0;
    virtual double model_bytes() const = 0;
    virtual std::uint64_t entries() const = 0;
};

class LocalDirectory final : public Directory {
public:
    // `prf_slots` makes plain mode pick slots with the counter PRF as well.
    LocalDirectory(PosMapMode mode, std::uint64_t n, std::uint32_t partitions,
                   const crypto::Key128& prf_key, bool prf_slots = false);

    std::uint32_t choose_slot(BlockId id, Rng& rng) override;
    Position exchange(BlockId id, std::uint32_t slot) override;
    bool holds(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
               std::uint32_t gen) const override;
    void place(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
               std::uint32_t gen) override;
    void place_pending(BlockId id, std::uint32_t p) override;
    std::uint64_t resident_bytes() const override;
    double model_bytes() const override;
    std::uint64_t entries() const override { return map_.size(); }

    const PositionMap& map() const { return map_; }
    PositionMap& map() { return map_; }
    // Test hook: the next exchange leaves the map untouched.
    void skip_next_update() { skip_next_ = true; }

private:
    PositionMap map_;
    bool prf_slots_ = false;
    std::vector<std::uint32_t> counters_;
    bool skip_next_ = false;
};

}  // namespace partoram::framework
