// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "blockstore/accounting.hpp"

namespace partoram {

// Forwards to a memory store and records every request.
class RecordingStore final : public store::BlockStore {
public:
    RecordingStore() : inner_(store::make_memory_store()) {}
    void setup(const store::StoreSetup& s) override { inner_->setup(s); }
    std::vector<store::CipherBlock> fetch_blocks(
        const std::vector<store::FetchRequest>& reqs) override {
        fetches.push_back(reqs);
        return inner_->fetch_blocks(reqs);
    }
    void store_level(const store::LevelUpload& up) override {
        uploads.push_back({up.ref.p, up.ref.level, up.ref.epoch, up.level_size, up.total,
                           up.compressed, up.items.size(), up.meta.has_value()});
        inner_->store_level(up);
    }
    store::Bytes fetch_meta(const store::LevelRef& r) override {
        ++meta_fetches;
        return inner_->fetch_meta(r);
    }
    void mark_unfilled(const store::LevelRef& r) override {
        ++marks;
        inner_->mark_unfilled(r);
    }
    store::TransferStats stats() override { return inner_->stats(); }

    struct Upload {
        std::uint32_t p;
        std::uint8_t level;
        std::uint32_t epoch;
        std::uint32_t level_size;
        std::uint32_t total;
        bool compressed;
        std::size_t items;
        bool meta;
    };
    std::vector<std::vector<store::FetchRequest>> fetches;
    std::vector<Upload> uploads;
    std::size_t meta_fetches = 0;
    std::size_t marks = 0;

private:
    std::unique_ptr<store::BlockStore> inner_;
};

}  // namespace partoram
