// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/posmap.hpp"

#include "core/error.hpp"

namespace partoram {

namespace {

constexpr std::uint32_t kMaxPart = (1u << 24) - 1;
constexpr std::uint32_t kMaxLevel = 63;
constexpr std::uint32_t kFineLevelMax = 31;
constexpr std::uint32_t kFineIndexMax = (1u << 25) - 1;

std::uint32_t encode_fine(const Position& p) {
    return static_cast<std::uint32_t>(p.kind) | (std::uint32_t{p.level} << 2) | (p.index << 7);
}

}  // namespace

PositionMap::PositionMap(PosMapMode mode, std::uint64_t n, std::uint32_t partitions,
                         const crypto::Key128& prf_key)
    : mode_(mode), n_(n), partitions_(partitions), key_(prf_key) {
    if (partitions == 0 && n > 0) throw DomainError("position map needs at least one partition");
    if (partitions > kMaxPart + 1) throw DomainError("too many partitions for entry encoding");
    if (mode_ == PosMapMode::Plain) {
        plain_.assign(n, 0);
    } else {
        counters_.assign(n, 0);
        fine_.assign(n, 0);
    }
}

void PositionMap::check_id(BlockId id) const {
    if (is_dummy(id) || id >= n_) throw DomainError("block id out of range: " + std::to_string(id));
}

void PositionMap::check_pos(const Position& pos) const {
    switch (pos.kind) {
        case PositionKind::Server:
            if (pos.level > kMaxLevel) throw DomainError("level out of range");
            if (!level_sizes_.empty() && (pos.level >= level_sizes_.size() ||
                                          pos.index >= level_sizes_[pos.level]))
                throw DomainError("position outside the level layout");
            if (mode_ == PosMapMode::CounterCompressed &&
                (pos.level > kFineLevelMax || pos.index > kFineIndexMax))
                throw DomainError("position too large for the counter encoding");
            [[fallthrough]];
        case PositionKind::CacheSlot:
        case PositionKind::Pending:
            if (pos.part >= partitions_) throw DomainError("partition/slot out of range");
            break;
        case PositionKind::Zeroed:
            break;
        default:
            throw DomainError("malformed position kind");
    }
}

std::uint32_t PositionMap::prf_slot(BlockId id, std::uint32_t j) const {
    return static_cast<std::uint32_t>(crypto::prf(key_, "slot", {id, j}) % partitions_);
}

std::uint32_t PositionMap::counter(BlockId id) const {
    check_id(id);
    return mode_ == PosMapMode::CounterCompressed ? counters_[id] : 0;
}

std::uint32_t PositionMap::next_slot(BlockId id) const {
    check_id(id);
    std::uint32_t j = mode_ == PosMapMode::CounterCompressed ? counters_[id] : 0;
    return prf_slot(id, j + 1);
}

std::uint64_t PositionMap::encode_plain(const Position& pos) {
    return static_cast<std::uint64_t>(pos.kind) | (std::uint64_t{pos.part & kMaxPart} << 2) |
           (std::uint64_t{pos.level & kMaxLevel} << 26) | (std::uint64_t{pos.index} << 32);
}

Position PositionMap::decode_plain(std::uint64_t raw) {
    Position p;
    p.kind = static_cast<PositionKind>(raw & 3);
    p.part = static_cast<std::uint32_t>((raw >> 2) & kMaxPart);
    p.level = static_cast<std::uint8_t>((raw >> 26) & kMaxLevel);
    p.index = static_cast<std::uint32_t>(raw >> 32);
    return p;
}

Position PositionMap::get(BlockId id) const {
    check_id(id);
    if (mode_ == PosMapMode::Plain) {
        auto raw = plain_[id];
        if ((raw & 3) == 0) return Position::zeroed(prf_slot(id, 0));
        return decode_plain(raw);
    }
    std::uint32_t f = fine_[id];
    Position p;
    p.kind = static_cast<PositionKind>(f & 3);
    p.level = static_cast<std::uint8_t>((f >> 2) & kFineLevelMax);
    p.index = f >> 7;
    p.part = prf_slot(id, counters_[id]);
    return p;
}

void PositionMap::set(BlockId id, const Position& pos) {
    check_id(id);
    check_pos(pos);
    if (mode_ == PosMapMode::Plain) {
        if (pos.kind == PositionKind::Zeroed) {
            if (pos.part != prf_slot(id, 0))
                throw DomainError("zeroed position must keep the initial partition");
            plain_[id] = 0;
        } else {
            plain_[id] = encode_plain(pos);
        }
        return;
    }
    std::uint32_t j = counters_[id];
    if (pos.kind == PositionKind::Zeroed) {
        if (j != 0 || pos.part != prf_slot(id, 0))
            throw DomainError("zeroed position must keep the initial partition");
    } else if (pos.kind == PositionKind::CacheSlot && pos.part == prf_slot(id, j + 1)) {
        counters_[id] = j + 1;
    } else if (pos.part != prf_slot(id, j)) {
        throw DomainError("partition does not match the access counter PRF");
    }
    fine_[id] = encode_fine(pos);
}

PositionMap::MemoryEstimate PositionMap::model_estimate(PosMapMode mode, std::uint64_t n) {
    MemoryEstimate m;
    if (mode == PosMapMode::Plain) {
        m.actual_bytes = n * kPlainEntryBytes;
        m.model_bytes = static_cast<double>(m.actual_bytes);
    } else {
        m.actual_bytes = n * (sizeof(std::uint32_t) * 2);
        m.model_bytes = static_cast<double>(n) * kCompressedModelBytes;
    }
    return m;
}

PositionMap::MemoryEstimate PositionMap::memory_estimate() const {
    return model_estimate(mode_, n_);
}

}  // namespace partoram
