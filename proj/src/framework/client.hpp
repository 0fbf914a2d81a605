// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "amortizer/amortizer.hpp"
#include "blockstore/contract.hpp"
#include "core/config.hpp"
#include "framework/directory.hpp"
#include "framework/eviction.hpp"
#include "partition/engine.hpp"

namespace partoram::framework {

// P client-side slots; slot s holds blocks waiting to be evicted to partition s.
class CacheSlots {
public:
    explicit CacheSlots(std::uint32_t slots);

    void push(std::uint32_t s, Block b);
    std::optional<Payload> take(std::uint32_t s, BlockId id);
    std::optional<Block> pop(std::uint32_t s);
    bool contains(std::uint32_t s, BlockId id) const;

    std::uint32_t slots() const { return static_cast<std::uint32_t>(slots_.size()); }
    std::size_t size(std::uint32_t s) const { return slots_[s].size(); }
    std::uint64_t total() const { return total_; }
    std::uint64_t peak() const { return peak_; }

private:
    std::vector<std::deque<Block>> slots_;
    std::uint64_t total_ = 0;
    std::uint64_t peak_ = 0;
};

struct TraceEvent {
    enum class Kind : std::uint8_t { Read, Write };
    Kind kind;
    std::uint32_t p;
};

struct ClientStats {
    std::uint64_t ops = 0;
    std::uint64_t cache_blocks = 0;
    std::uint64_t cache_peak = 0;
    std::uint64_t pending_blocks = 0;
    std::uint64_t client_blocks_peak = 0;  // cache plus pending job buffers
    std::uint64_t posmap_bytes = 0;
    double posmap_model_bytes = 0;
    partition::EngineCounters engine;
    std::optional<amortizer::AmortizerStats> amortizer;
    store::TransferStats transfer;
};

struct ClientOptions {
    std::uint32_t stored_payload = 0;  // payload bytes carried per block; 0 uses block_size
    std::unique_ptr<Directory> directory;
    bool record_steps = false;
};

class OramClient {
public:
    OramClient(const OramConfig& cfg, std::shared_ptr<store::BlockStore> store,
               ClientOptions opts = {});
    ~OramClient();

    // Returns the payload held before this access.
    Payload access(Op op, BlockId id, const Payload* data = nullptr);
    Payload read(BlockId id) { return access(Op::Read, id); }
    void write(BlockId id, const Payload& data) { access(Op::Write, id, &data); }
    // Read-modify-write within a single access. Returns the old payload.
    Payload update(BlockId id, const std::function<void(Payload&)>& fn);

    // Finishes all queued shuffle jobs (concurrent mode); no-op otherwise.
    void drain();
    ClientStats stats();
    void set_trace(std::vector<TraceEvent>* sink) { trace_ = sink; }

    const OramConfig& config() const { return cfg_; }
    const Geometry& geometry() const { return geo_; }
    std::uint32_t payload_bytes() const { return payload_bytes_; }
    Directory& directory() { return *dir_; }
    partition::Engine& engine() { return *engine_; }
    amortizer::Amortizer* amortizer() { return amort_.get(); }
    CacheSlots& cache() { return cache_; }
    store::BlockStore& store() { return *store_; }

private:
    Payload run(Op op, BlockId id, const Payload* data, const std::function<void(Payload&)>* fn);
    Payload read_partition(std::uint32_t p, const Position& old, BlockId id);
    void write_partition(std::uint32_t p, partition::Entry e);
    void evict(std::uint32_t p);
    void note_client_blocks();

    OramConfig cfg_;
    Geometry geo_;
    std::uint32_t payload_bytes_ = 0;
    std::shared_ptr<store::BlockStore> store_;
    std::unique_ptr<Directory> dir_;
    std::unique_ptr<partition::Engine> engine_;
    std::unique_ptr<amortizer::Amortizer> amort_;
    CacheSlots cache_;
    Evictor evictor_;
    Rng slot_rng_;
    std::vector<std::uint32_t> evict_targets_;
    std::vector<TraceEvent>* trace_ = nullptr;
    std::uint64_t ops_ = 0;
    std::uint64_t client_peak_ = 0;
};

crypto::Key128 derive_key(std::uint64_t seed, std::uint64_t stream);

}  // namespace partoram::framework
