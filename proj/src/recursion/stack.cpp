// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "recursion/stack.hpp"

#include <algorithm>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"

namespace partoram::recursion {

namespace {

std::uint32_t get_le32(const Payload& b, std::size_t at) {
    return std::uint32_t{b[at]} | (std::uint32_t{b[at + 1]} << 8) |
           (std::uint32_t{b[at + 2]} << 16) | (std::uint32_t{b[at + 3]} << 24);
}

void put_le32(Payload& b, std::size_t at, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

std::uint32_t derive_alpha(std::uint64_t n, std::uint32_t block_size, std::uint32_t override_alpha) {
    if (override_alpha) return override_alpha;
    std::uint32_t lg = std::max<std::uint32_t>(1, ceil_log2(n));
    return std::max<std::uint32_t>(2, block_size / (2 * lg));
}

std::vector<std::string> config_warnings(const OramConfig& cfg) {
    std::vector<std::string> out;
    if (!cfg.recursive || cfg.alpha != 0 || cfg.n <= cfg.recursion_threshold) return out;
    std::uint32_t lg = std::max<std::uint32_t>(1, ceil_log2(cfg.n));
    if (cfg.block_size / (2 * lg) < 2)
        out.push_back("block size " + std::to_string(cfg.block_size) + " is below 4 log2(N) = " +
                      std::to_string(4 * lg) +
                      " bytes; the map compression rate is clamped to 2 and the stack grows "
                      "to about log2(N) levels");
    return out;
}

std::vector<std::uint64_t> stack_capacities(std::uint64_t n, std::uint32_t alpha,
                                            std::uint64_t threshold) {
    if (alpha < 2) throw ConfigError("alpha must be >= 2");
    std::vector<std::uint64_t> caps{n};
    while (caps.back() > threshold) caps.push_back((caps.back() + alpha - 1) / alpha);
    return caps;
}

RecursiveDirectory::RecursiveDirectory(std::uint64_t n, std::uint32_t partitions,
                                       std::uint32_t alpha, framework::OramClient& map,
                                       const crypto::Key128& prf_key)
    : n_(n), partitions_(partitions), alpha_(alpha), map_(map), key_(prf_key), fine_(n) {
    if (map_.payload_bytes() < alpha_ * kMapEntryBytes)
        throw ConfigError("map ORAM blocks cannot hold alpha entries");
    if (map_.config().n * alpha_ < n_) throw ConfigError("map ORAM too small for the id range");
}

std::uint32_t RecursiveDirectory::choose_slot(BlockId, Rng& rng) {
    return static_cast<std::uint32_t>(uniform_below(rng, partitions_));
}

Position RecursiveDirectory::exchange(BlockId id, std::uint32_t slot) {
    if (id >= n_) throw DomainError("block id out of range");
    const std::size_t at = (id % alpha_) * kMapEntryBytes;
    std::uint32_t stored = 0;
    map_.update(id / alpha_, [&](Payload& b) {
        stored = get_le32(b, at);
        put_le32(b, at, slot + 1);
    });
    Fine& f = fine_[id];
    Position old;
    if (stored == 0) {
        if (f.kind != PositionKind::Zeroed) throw InternalError("map ORAM lost a position entry");
        old = Position::zeroed(
            static_cast<std::uint32_t>(crypto::prf(key_, "slot", {id, 0}) % partitions_));
    } else {
        const std::uint32_t p = stored - 1;
        switch (f.kind) {
            case PositionKind::Server: old = Position::server(p, f.level, f.index); break;
            case PositionKind::CacheSlot: old = Position::cache_slot(p); break;
            case PositionKind::Pending: old = Position::pending(p); break;
            case PositionKind::Zeroed: throw InternalError("map ORAM entry for an unwritten id");
        }
    }
    f = Fine{0, 0, 0, PositionKind::CacheSlot};
    return old;
}

bool RecursiveDirectory::holds(BlockId id, std::uint32_t, std::uint8_t level, std::uint32_t index,
                               std::uint32_t gen) const {
    const Fine& f = fine_[id];
    return f.kind == PositionKind::Server && f.gen == gen && f.level == level && f.index == index;
}

void RecursiveDirectory::place(BlockId id, std::uint32_t, std::uint8_t level, std::uint32_t index,
                               std::uint32_t gen) {
    fine_[id] = Fine{gen, index, level, PositionKind::Server};
}

void RecursiveDirectory::place_pending(BlockId id, std::uint32_t) {
    fine_[id] = Fine{0, 0, 0, PositionKind::Pending};
}

std::uint64_t RecursiveDirectory::resident_bytes() const { return fine_.size() * sizeof(Fine); }

double RecursiveDirectory::model_bytes() const { return static_cast<double>(resident_bytes()); }

RecursionStack::RecursionStack(const OramConfig& cfg, const StoreFactory& make_store,
                               bool record_steps) {
    cfg.validate();
    const std::uint64_t threshold = cfg.recursive ? cfg.recursion_threshold : cfg.n;
    alpha_ = derive_alpha(cfg.n, cfg.block_size, cfg.alpha);
    const auto caps = stack_capacities(cfg.n, alpha_, threshold);
    const std::size_t levels = caps.size();
    std::vector<std::unique_ptr<framework::OramClient>> built(levels);
    for (std::size_t i = levels; i-- > 0;) {
        OramConfig c = cfg;
        c.n = caps[i];
        c.recursive = false;
        framework::ClientOptions opts;
        opts.record_steps = record_steps && i == 0;
        if (i > 0) {
            c.partitions = 0;
            c.capacity = 0;
            c.payload_mode = PayloadMode::Full;
            c.posmap = PosMapMode::Plain;
            c.seed = cfg.seed + 0x9e3779b97f4a7c15ull * i;
            opts.stored_payload = alpha_ * static_cast<std::uint32_t>(kMapEntryBytes);
        }
        if (i + 1 < levels) {
            Geometry g = Geometry::derive(c);
            opts.directory = std::make_unique<RecursiveDirectory>(
                c.n, g.partitions, alpha_, *built[i + 1],
                framework::derive_key(c.seed, streams::kPrfKeys));
        }
        std::shared_ptr<store::BlockStore> st =
            make_store ? make_store(static_cast<std::uint32_t>(i)) : store::make_memory_store();
        built[i] = std::make_unique<framework::OramClient>(c, std::move(st), std::move(opts));
    }
    orams_ = std::move(built);
}

void RecursionStack::drain() {
    for (auto& o : orams_) o->drain();
}

StackReport RecursionStack::report() {
    StackReport r;
    r.depth = depth();
    r.alpha = alpha_;
    r.resident_entries = orams_.back()->directory().entries();
    for (auto& o : orams_) {
        auto s = o->stats();
        LevelReport lr;
        lr.capacity = o->config().n;
        lr.partitions = o->geometry().partitions;
        lr.cache_peak = s.cache_peak;
        lr.server_peak_blocks = s.transfer.peak_server_blocks;
        lr.blocks_transferred = s.transfer.blocks_up + s.transfer.blocks_down;
        lr.ops = s.ops;
        r.cache_peak_sum += lr.cache_peak;
        r.server_peak_sum += lr.server_peak_blocks;
        r.shuffle_buffer_peak = std::max(r.shuffle_buffer_peak, s.engine.shuffle_buffer_peak);
        r.levels.push_back(lr);
    }
    return r;
}

}  // namespace partoram::recursion
