// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "framework/directory.hpp"

namespace partoram::framework {

LocalDirectory::LocalDirectory(PosMapMode mode, std::uint64_t n, std::uint32_t partitions,
                               const crypto::Key128& prf_key, bool prf_slots)
    : map_(mode, n, partitions, prf_key), prf_slots_(prf_slots && mode == PosMapMode::Plain) {
    if (prf_slots_) counters_.assign(n, 0);
}

std::uint32_t LocalDirectory::choose_slot(BlockId id, Rng& rng) {
    if (map_.mode() == PosMapMode::CounterCompressed) return map_.next_slot(id);
    if (prf_slots_) return map_.prf_slot(id, counters_.at(id) + 1);
    return static_cast<std::uint32_t>(uniform_below(rng, map_.partitions()));
}

Position LocalDirectory::exchange(BlockId id, std::uint32_t slot) {
    Position old = map_.get(id);
    if (skip_next_) {
        skip_next_ = false;
        return old;
    }
    map_.set(id, Position::cache_slot(slot));
    if (prf_slots_) ++counters_[id];
    return old;
}

bool LocalDirectory::holds(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
                           std::uint32_t) const {
    return map_.get(id) == Position::server(p, level, index);
}

void LocalDirectory::place(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
                           std::uint32_t) {
    map_.set(id, Position::server(p, level, index));
}

void LocalDirectory::place_pending(BlockId id, std::uint32_t p) {
    map_.set(id, Position::pending(p));
}

std::uint64_t LocalDirectory::resident_bytes() const {
    return map_.memory_estimate().actual_bytes + counters_.size() * sizeof(std::uint32_t);
}

double LocalDirectory::model_bytes() const { return map_.memory_estimate().model_bytes; }

}  // namespace partoram::framework
