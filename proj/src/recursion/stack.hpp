// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "framework/client.hpp"

namespace partoram::recursion {

// Entries per map block: max(2, floor(B / (2 log2 N))) unless overridden.
std::uint32_t derive_alpha(std::uint64_t n, std::uint32_t block_size, std::uint32_t override_alpha);

// Non-fatal configuration issues worth reporting before a run.
std::vector<std::string> config_warnings(const OramConfig& cfg);

// Capacities N, ceil(N / alpha), ... down to the first one <= threshold.
std::vector<std::uint64_t> stack_capacities(std::uint64_t n, std::uint32_t alpha,
                                            std::uint64_t threshold);

inline constexpr std::size_t kMapEntryBytes = 4;

// Keeps the partition of each id inside a smaller ORAM: entry id % alpha of
// block id / alpha holds (slot + 1), 0 meaning never accessed. The level and
// index inside the partition stay client-side.
class RecursiveDirectory final : public framework::Directory {
public:
    RecursiveDirectory(std::uint64_t n, std::uint32_t partitions, std::uint32_t alpha,
                       framework::OramClient& map, const crypto::Key128& prf_key);

    std::uint32_t choose_slot(BlockId id, Rng& rng) override;
    Position exchange(BlockId id, std::uint32_t slot) override;
    bool holds(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
               std::uint32_t gen) const override;
    void place(BlockId id, std::uint32_t p, std::uint8_t level, std::uint32_t index,
               std::uint32_t gen) override;
    void place_pending(BlockId id, std::uint32_t p) override;
    std::uint64_t resident_bytes() const override;
    double model_bytes() const override;
    std::uint64_t entries() const override { return n_; }

private:
    struct Fine {
        std::uint32_t gen = 0;
        std::uint32_t index = 0;
        std::uint8_t level = 0;
        PositionKind kind = PositionKind::Zeroed;
    };

    std::uint64_t n_;
    std::uint32_t partitions_;
    std::uint32_t alpha_;
    framework::OramClient& map_;
    crypto::Key128 key_;
    std::vector<Fine> fine_;
};

struct LevelReport {
    std::uint64_t capacity = 0;
    std::uint32_t partitions = 0;
    std::uint64_t cache_peak = 0;
    std::uint64_t server_peak_blocks = 0;
    std::uint64_t blocks_transferred = 0;
    std::uint64_t ops = 0;
};

struct StackReport {
    std::uint32_t depth = 0;
    std::uint32_t alpha = 0;
    std::uint64_t resident_entries = 0;
    std::uint64_t shuffle_buffer_peak = 0;  // one buffer shared by every level
    std::uint64_t cache_peak_sum = 0;
    std::uint64_t server_peak_sum = 0;
    std::vector<LevelReport> levels;  // [0] is the data ORAM
};

using StoreFactory = std::function<std::shared_ptr<store::BlockStore>(std::uint32_t level)>;

// Data ORAM plus its chain of position-map ORAMs. Depth 0 is the plain
// construction with a resident position map.
class RecursionStack {
public:
    RecursionStack(const OramConfig& cfg, const StoreFactory& make_store,
                   bool record_steps = false);

    framework::OramClient& top() { return *orams_.front(); }
    framework::OramClient& level(std::size_t i) { return *orams_.at(i); }
    std::uint32_t depth() const { return static_cast<std::uint32_t>(orams_.size() - 1); }
    std::uint32_t alpha() const { return alpha_; }

    Payload access(Op op, BlockId id, const Payload* data = nullptr) {
        return top().access(op, id, data);
    }
    void drain();
    StackReport report();

private:
    std::uint32_t alpha_ = 0;
    std::vector<std::unique_ptr<framework::OramClient>> orams_;
};

}  // namespace partoram::recursion
