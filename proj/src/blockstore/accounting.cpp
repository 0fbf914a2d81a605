// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockstore/accounting.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace partoram::store {

void LevelBook::setup(const StoreSetup& s) {
    if (s.partitions == 0 || s.level_sizes.empty())
        throw ProtocolError(ProtocolError::Malformed, "setup needs partitions and levels");
    if (s.level_sizes.size() > 64) throw ProtocolError(ProtocolError::Malformed, "too many levels");
    if (!s.initial_fill.empty() && s.initial_fill.size() != s.partitions)
        throw ProtocolError(ProtocolError::Malformed, "initial fill size mismatch");
    setup_ = s;
    parts_.assign(s.partitions, std::vector<Level>(s.level_sizes.size()));
    stats_ = TransferStats{};
    for (std::uint32_t p = 0; p < s.partitions; ++p) {
        for (std::uint32_t l = 0; l < s.level_sizes.size(); ++l) {
            auto& lv = parts_[p][l];
            lv.size = s.level_sizes[l];
            bool filled = !s.initial_fill.empty() && ((s.initial_fill[p] >> l) & 1);
            if (filled) {
                lv.filled = true;
                lv.virtual_zero = true;
                lv.fetched.assign((lv.size + 63) / 64, 0);
                add_resident(lv.size);
            }
        }
    }
    set_up_ = true;
}

LevelBook::Level& LevelBook::lookup(std::uint32_t p, std::uint32_t l) {
    if (!set_up_) throw ProtocolError(ProtocolError::NotSetUp, "store is not set up");
    if (p >= parts_.size() || l >= parts_[p].size())
        throw ProtocolError(ProtocolError::Malformed, "level reference out of range");
    return parts_[p][l];
}

LevelBook::Level& LevelBook::level(const LevelRef& ref) { return lookup(ref.p, ref.level); }

void LevelBook::add_resident(std::uint64_t n) {
    stats_.resident_blocks += n;
    stats_.peak_server_blocks = std::max(stats_.peak_server_blocks, stats_.resident_blocks);
}

void LevelBook::sub_resident(std::uint64_t n) {
    PARTORAM_CHECK(stats_.resident_blocks >= n, "resident block count underflow");
    stats_.resident_blocks -= n;
}

std::size_t LevelBook::meta_size(std::uint32_t level) const {
    return crypto::sealed_meta_size(setup_.level_sizes.at(level));
}

bool LevelBook::on_fetch(const FetchRequest& req) {
    auto& lv = level(req.ref);
    if (!lv.filled) throw ProtocolError(ProtocolError::UnfilledLevel, "fetch from unfilled level");
    if (lv.epoch != req.ref.epoch) throw ProtocolError(ProtocolError::EpochMismatch, "stale epoch");
    if (req.offset >= lv.size) throw ProtocolError(ProtocolError::BadOffset, "offset out of range");
    bool seen = (lv.fetched[req.offset / 64] >> (req.offset % 64)) & 1;
    if (seen && setup_.delete_on_read)
        throw ProtocolError(ProtocolError::BadOffset, "slot already deleted");
    lv.fetched[req.offset / 64] |= std::uint64_t{1} << (req.offset % 64);
    stats_.blocks_down += 1;
    stats_.bytes_down += setup_.sealed_bytes;
    if (setup_.delete_on_read) {
        lv.freed += 1;
        sub_resident(1);
        return true;
    }
    return false;
}

void LevelBook::on_fetch_batch(std::size_t n) {
    if (n > 0) stats_.fetch_batches += 1;
}

bool LevelBook::on_store(const LevelUpload& up) {
    auto& lv = level(up.ref);
    bool top = std::size_t{up.ref.level} + 1 == setup_.level_sizes.size();
    if (up.level_size != lv.size)
        throw ProtocolError(ProtocolError::Malformed, "level size mismatch");
    std::uint32_t expect_total = up.compressed ? lv.size / 2 : lv.size;
    if (up.total != expect_total)
        throw ProtocolError(ProtocolError::Malformed, "upload total mismatch");
    if (up.first == 0) {
        if (lv.filled && !top)
            throw ProtocolError(ProtocolError::FilledLevel, "store over a filled level");
        if (lv.filled) on_mark_unfilled(LevelRef{up.ref.p, up.ref.level, lv.epoch});
        if (lv.building) throw ProtocolError(ProtocolError::Malformed, "level already being built");
        if (up.ref.epoch != lv.epoch + 1)
            throw ProtocolError(ProtocolError::EpochMismatch, "new epoch must follow the old one");
        lv.epoch = up.ref.epoch;
        lv.building = true;
        lv.received = 0;
        lv.virtual_zero = false;
    } else {
        if (!lv.building || up.first != lv.received || up.ref.epoch != lv.epoch)
            throw ProtocolError(ProtocolError::Malformed, "out-of-order upload chunk");
    }
    if (up.items.size() > up.total - lv.received)
        throw ProtocolError(ProtocolError::Malformed, "upload chunk overruns level");
    lv.received += static_cast<std::uint32_t>(up.items.size());
    stats_.blocks_up += up.items.size();
    std::uint64_t item_bytes =
        up.compressed ? std::uint64_t{setup_.compressed_elems} * 8 : setup_.sealed_bytes;
    stats_.bytes_up += item_bytes * up.items.size();
    add_resident(up.items.size());
    bool done = lv.received == up.total;
    if (done) {
        if (!up.meta) throw ProtocolError(ProtocolError::Malformed, "final chunk without metadata");
        stats_.meta_bytes += meta_size(up.ref.level);
        if (up.compressed) add_resident(lv.size - up.total);
        lv.building = false;
        lv.filled = true;
        lv.freed = 0;
        lv.fetched.assign((lv.size + 63) / 64, 0);
    } else if (up.meta) {
        throw ProtocolError(ProtocolError::Malformed, "metadata before the final chunk");
    }
    return done;
}

void LevelBook::on_meta_fetch(const LevelRef& ref) {
    auto& lv = level(ref);
    if (!lv.filled) throw ProtocolError(ProtocolError::UnfilledLevel, "meta of unfilled level");
    if (lv.epoch != ref.epoch) throw ProtocolError(ProtocolError::EpochMismatch, "stale epoch");
    stats_.meta_bytes += meta_size(ref.level);
}

void LevelBook::on_mark_unfilled(const LevelRef& ref) {
    auto& lv = level(ref);
    if (!lv.filled) throw ProtocolError(ProtocolError::UnfilledLevel, "level already unfilled");
    if (lv.epoch != ref.epoch) throw ProtocolError(ProtocolError::EpochMismatch, "stale epoch");
    sub_resident(lv.size - lv.freed);
    lv.filled = false;
    lv.virtual_zero = false;
    lv.freed = 0;
    lv.fetched.clear();
}

}  // namespace partoram::store
