// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "blockstore/contract.hpp"

namespace partoram::store {

// Level bookkeeping and transfer accounting shared by every backend, so that
// identical request streams give identical stats regardless of where bytes live.
class LevelBook {
public:
    struct Level {
        bool filled = false;
        bool virtual_zero = false;
        bool building = false;
        std::uint32_t epoch = 0;
        std::uint32_t size = 0;
        std::uint32_t received = 0;  // items received for the level being built
        std::uint32_t freed = 0;
        std::vector<std::uint64_t> fetched;  // bitmap over offsets, current epoch
    };

    void setup(const StoreSetup& s);
    bool is_setup() const { return set_up_; }
    const StoreSetup& layout() const { return setup_; }

    Level& level(const LevelRef& ref);
    // Validates a fetch against fill state, epoch and bounds, then accounts it.
    // Returns true when the slot must be freed (delete-on-read).
    bool on_fetch(const FetchRequest& req);
    void on_fetch_batch(std::size_t n);
    // Returns true when this chunk completes the level.
    bool on_store(const LevelUpload& up);
    void on_meta_fetch(const LevelRef& ref);
    void on_mark_unfilled(const LevelRef& ref);

    TransferStats stats() const { return stats_; }
    std::size_t meta_size(std::uint32_t level) const;

private:
    Level& lookup(std::uint32_t p, std::uint32_t l);
    void add_resident(std::uint64_t n);
    void sub_resident(std::uint64_t n);

    bool set_up_ = false;
    StoreSetup setup_;
    std::vector<std::vector<Level>> parts_;
    TransferStats stats_;
};

std::unique_ptr<BlockStore> make_memory_store();
std::unique_ptr<BlockStore> make_file_store(const std::string& dir);

}  // namespace partoram::store
