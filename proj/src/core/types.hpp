// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace partoram {

using BlockId = std::uint64_t;
inline constexpr BlockId kDummy = std::numeric_limits<BlockId>::max();

using Payload = std::vector<std::uint8_t>;

inline bool is_dummy(BlockId id) { return id == kDummy; }

struct Block {
    BlockId id = kDummy;
    Payload payload;
};

enum class Op { Read, Write };

enum class PositionKind : std::uint8_t {
    Zeroed = 0,
    Server = 1,
    CacheSlot = 2,
    // Waiting in a shuffle job of partition `part` (concurrent mode only).
    Pending = 3,
};

// `part` is the partition for Server/Pending/Zeroed and the slot for CacheSlot.
// A Zeroed id still has a partition: the one its mandatory dummy read goes to.
struct Position {
    PositionKind kind = PositionKind::Zeroed;
    std::uint32_t part = 0;
    std::uint8_t level = 0;
    std::uint32_t index = 0;

    static Position zeroed(std::uint32_t p = 0) { return {PositionKind::Zeroed, p, 0, 0}; }
    static Position server(std::uint32_t p, std::uint8_t l, std::uint32_t i) {
        return {PositionKind::Server, p, l, i};
    }
    static Position cache_slot(std::uint32_t s) { return {PositionKind::CacheSlot, s, 0, 0}; }
    static Position pending(std::uint32_t p) { return {PositionKind::Pending, p, 0, 0}; }

    bool operator==(const Position& o) const {
        if (kind != o.kind) return false;
        switch (kind) {
            case PositionKind::Zeroed: return true;
            case PositionKind::Server: return part == o.part && level == o.level && index == o.index;
            default: return part == o.part;
        }
    }
};

}  // namespace partoram
