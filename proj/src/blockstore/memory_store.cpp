// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <mutex>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"
#include "partition/codec.hpp"

namespace partoram::store {

namespace {

class MemoryStore final : public BlockStore {
public:
    void setup(const StoreSetup& s) override {
        std::lock_guard lock(mu_);
        book_.setup(s);
        data_.assign(s.partitions, std::vector<LevelData>(s.level_sizes.size()));
    }

    std::vector<CipherBlock> fetch_blocks(const std::vector<FetchRequest>& reqs) override {
        std::lock_guard lock(mu_);
        std::vector<CipherBlock> out;
        out.reserve(reqs.size());
        const auto stored = book_.layout().stored_bytes;
        for (const auto& r : reqs) {
            auto& lv = book_.level(r.ref);
            bool virt = lv.virtual_zero;
            bool freed = book_.on_fetch(r);
            auto& d = data_[r.ref.p][r.ref.level];
            if (virt || stored == 0) {
                out.emplace_back(stored, 0);
            } else {
                auto* src = d.blocks.data() + std::size_t{r.offset} * stored;
                out.emplace_back(src, src + stored);
                if (freed) std::memset(src, 0, stored);
            }
        }
        book_.on_fetch_batch(reqs.size());
        return out;
    }

    void store_level(const LevelUpload& up) override {
        std::lock_guard lock(mu_);
        bool done = book_.on_store(up);
        auto& d = data_[up.ref.p][up.ref.level];
        const auto stored = book_.layout().stored_bytes;
        if (up.first == 0) d.staging.clear();
        if (stored > 0)
            for (const auto& it : up.items) d.staging.push_back(it);
        if (!done) return;
        d.blocks.assign(std::size_t{up.level_size} * stored, 0);
        if (stored > 0) {
            std::vector<Bytes> rows;
            if (up.compressed) {
                std::vector<partition::codec::Vec> x;
                x.reserve(d.staging.size());
                for (const auto& it : d.staging) x.push_back(partition::codec::decode_vec(it));
                rows = partition::codec::decompress_upload(x, stored);
            } else {
                rows = std::move(d.staging);
            }
            for (std::size_t i = 0; i < rows.size() && i < up.level_size; ++i) {
                if (rows[i].size() != stored)
                    throw ProtocolError(ProtocolError::Malformed, "block size mismatch");
                std::memcpy(d.blocks.data() + i * stored, rows[i].data(), stored);
            }
        }
        d.staging.clear();
        d.meta = *up.meta;
    }

    Bytes fetch_meta(const LevelRef& ref) override {
        std::lock_guard lock(mu_);
        bool virt = book_.level(ref).virtual_zero;
        book_.on_meta_fetch(ref);
        if (virt) return {};
        return data_[ref.p][ref.level].meta;
    }

    void mark_unfilled(const LevelRef& ref) override {
        std::lock_guard lock(mu_);
        book_.on_mark_unfilled(ref);
        auto& d = data_[ref.p][ref.level];
        d.blocks.clear();
        d.blocks.shrink_to_fit();
        d.meta.clear();
    }

    TransferStats stats() override {
        std::lock_guard lock(mu_);
        return book_.stats();
    }

private:
    struct LevelData {
        std::vector<std::uint8_t> blocks;
        Bytes meta;
        std::vector<Bytes> staging;
    };

    std::mutex mu_;
    LevelBook book_;
    std::vector<std::vector<LevelData>> data_;
};

}  // namespace

std::unique_ptr<BlockStore> make_memory_store() { return std::make_unique<MemoryStore>(); }

}  // namespace partoram::store
