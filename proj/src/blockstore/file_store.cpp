// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <mutex>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"
#include "partition/codec.hpp"

namespace partoram::store {

namespace {

constexpr char kMagic[8] = {'P', 'O', 'R', 'A', 'M', 'P', 'F', '1'};
constexpr std::size_t kHeaderEntry = 6;  // filled u8, virtual u8, epoch u32 LE

// One file per partition:
//   [magic 8][level entries L x 6] [level 0 blocks][level 1 blocks]... [meta 0][meta 1]...
// Each meta region is a u32 LE length followed by room for the largest sealed list.
class FileStore final : public BlockStore {
public:
    explicit FileStore(std::string dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create store directory " + dir_ + ": " + ec.message());
    }

    ~FileStore() override { close_all(); }

    void setup(const StoreSetup& s) override {
        std::lock_guard lock(mu_);
        close_all();
        book_.setup(s);
        const std::size_t L = s.level_sizes.size();
        block_off_.assign(L, 0);
        meta_off_.assign(L, 0);
        std::size_t off = sizeof(kMagic) + L * kHeaderEntry;
        for (std::size_t l = 0; l < L; ++l) {
            block_off_[l] = off;
            off += std::size_t{s.level_sizes[l]} * s.stored_bytes;
        }
        for (std::size_t l = 0; l < L; ++l) {
            meta_off_[l] = off;
            off += 4 + crypto::sealed_meta_size(s.level_sizes[l]);
        }
        file_size_ = off;
        staging_.assign(s.partitions, std::vector<std::vector<Bytes>>(L));
        for (std::uint32_t p = 0; p < s.partitions; ++p) {
            auto path = dir_ + "/partition_" + std::to_string(p) + ".bin";
            int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0600);
            if (fd < 0) throw IoError("cannot open " + path + ": " + std::strerror(errno));
            fds_.push_back(fd);
            if (::ftruncate(fd, static_cast<off_t>(file_size_)) != 0)
                throw IoError("cannot size " + path + ": " + std::strerror(errno));
            write_at(fd, 0, kMagic, sizeof(kMagic));
            for (std::size_t l = 0; l < L; ++l) write_header(p, static_cast<std::uint32_t>(l));
        }
    }

    std::vector<CipherBlock> fetch_blocks(const std::vector<FetchRequest>& reqs) override {
        std::lock_guard lock(mu_);
        std::vector<CipherBlock> out;
        out.reserve(reqs.size());
        const auto stored = book_.layout().stored_bytes;
        for (const auto& r : reqs) {
            bool virt = book_.level(r.ref).virtual_zero;
            bool freed = book_.on_fetch(r);
            CipherBlock b(stored, 0);
            if (!virt && stored > 0) {
                auto off = block_off_[r.ref.level] + std::size_t{r.offset} * stored;
                read_at(fds_[r.ref.p], off, b.data(), stored);
                if (freed) {
                    Bytes zero(stored, 0);
                    write_at(fds_[r.ref.p], off, zero.data(), stored);
                }
            }
            out.push_back(std::move(b));
        }
        book_.on_fetch_batch(reqs.size());
        return out;
    }

    void store_level(const LevelUpload& up) override {
        std::lock_guard lock(mu_);
        bool done = book_.on_store(up);
        const auto stored = book_.layout().stored_bytes;
        auto& staging = staging_[up.ref.p][up.ref.level];
        if (up.first == 0) staging.clear();
        if (stored > 0)
            for (const auto& it : up.items) staging.push_back(it);
        if (!done) return;
        int fd = fds_[up.ref.p];
        if (stored > 0) {
            std::vector<Bytes> rows;
            if (up.compressed) {
                std::vector<partition::codec::Vec> x;
                for (const auto& it : staging) x.push_back(partition::codec::decode_vec(it));
                rows = partition::codec::decompress_upload(x, stored);
            } else {
                rows = std::move(staging);
            }
            Bytes level(std::size_t{up.level_size} * stored, 0);
            for (std::size_t i = 0; i < rows.size() && i < up.level_size; ++i) {
                if (rows[i].size() != stored)
                    throw ProtocolError(ProtocolError::Malformed, "block size mismatch");
                std::memcpy(level.data() + i * stored, rows[i].data(), stored);
            }
            write_at(fd, block_off_[up.ref.level], level.data(), level.size());
        }
        staging.clear();
        const auto& meta = *up.meta;
        if (meta.size() > crypto::sealed_meta_size(up.level_size))
            throw ProtocolError(ProtocolError::Malformed, "metadata too large");
        std::uint8_t len[4];
        for (int i = 0; i < 4; ++i) len[i] = static_cast<std::uint8_t>(meta.size() >> (8 * i));
        write_at(fd, meta_off_[up.ref.level], len, 4);
        if (!meta.empty()) write_at(fd, meta_off_[up.ref.level] + 4, meta.data(), meta.size());
        write_header(up.ref.p, up.ref.level);
    }

    Bytes fetch_meta(const LevelRef& ref) override {
        std::lock_guard lock(mu_);
        bool virt = book_.level(ref).virtual_zero;
        book_.on_meta_fetch(ref);
        if (virt) return {};
        int fd = fds_[ref.p];
        std::uint8_t len[4];
        read_at(fd, meta_off_[ref.level], len, 4);
        std::uint32_t n = 0;
        for (int i = 0; i < 4; ++i) n |= std::uint32_t{len[i]} << (8 * i);
        Bytes meta(n);
        if (n) read_at(fd, meta_off_[ref.level] + 4, meta.data(), n);
        return meta;
    }

    void mark_unfilled(const LevelRef& ref) override {
        std::lock_guard lock(mu_);
        book_.on_mark_unfilled(ref);
        write_header(ref.p, ref.level);
    }

    TransferStats stats() override {
        std::lock_guard lock(mu_);
        return book_.stats();
    }

private:
    void write_header(std::uint32_t p, std::uint32_t l) {
        auto& lv = book_.level(LevelRef{p, static_cast<std::uint8_t>(l), 0});
        std::uint8_t e[kHeaderEntry];
        e[0] = lv.filled ? 1 : 0;
        e[1] = lv.virtual_zero ? 1 : 0;
        for (int i = 0; i < 4; ++i) e[2 + i] = static_cast<std::uint8_t>(lv.epoch >> (8 * i));
        write_at(fds_[p], sizeof(kMagic) + l * kHeaderEntry, e, sizeof(e));
    }

    static void write_at(int fd, std::size_t off, const void* buf, std::size_t n) {
        auto* p = static_cast<const std::uint8_t*>(buf);
        while (n > 0) {
            auto w = ::pwrite(fd, p, n, static_cast<off_t>(off));
            if (w < 0) {
                if (errno == EINTR) continue;
                throw IoError(std::string("write failed: ") + std::strerror(errno));
            }
            p += w;
            off += static_cast<std::size_t>(w);
            n -= static_cast<std::size_t>(w);
        }
    }

    static void read_at(int fd, std::size_t off, void* buf, std::size_t n) {
        auto* p = static_cast<std::uint8_t*>(buf);
        while (n > 0) {
            auto r = ::pread(fd, p, n, static_cast<off_t>(off));
            if (r < 0) {
                if (errno == EINTR) continue;
                throw IoError(std::string("read failed: ") + std::strerror(errno));
            }
            if (r == 0) throw IoError("unexpected end of partition file");
            p += r;
            off += static_cast<std::size_t>(r);
            n -= static_cast<std::size_t>(r);
        }
    }

    void close_all() {
        for (int fd : fds_) ::close(fd);
        fds_.clear();
    }

    std::mutex mu_;
    std::string dir_;
    LevelBook book_;
    std::vector<int> fds_;
    std::vector<std::size_t> block_off_, meta_off_;
    std::size_t file_size_ = 0;
    std::vector<std::vector<std::vector<Bytes>>> staging_;
};

}  // namespace

std::unique_ptr<BlockStore> make_file_store(const std::string& dir) {
    return std::make_unique<FileStore>(dir);
}

}  // namespace partoram::store
