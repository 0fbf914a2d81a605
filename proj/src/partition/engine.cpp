// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "partition/engine.hpp"

#include <algorithm>
#include <numeric>

#include "core/error.hpp"
#include "partition/codec.hpp"

namespace partoram::partition {

namespace {

void put_le64(std::uint8_t* out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out[b] = static_cast<std::uint8_t>(v >> (8 * b));
}

std::uint64_t get_le64(const std::uint8_t* in) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t{in[b]} << (8 * b);
    return v;
}

LevelState empty_level(std::uint32_t size) {
    LevelState lv;
    lv.size = size;
    lv.half = size / 2;
    return lv;
}

void reset_bits(LevelState& lv) { lv.read_bits.assign((lv.size + 63) / 64, 0); }

}  // namespace

Engine::Engine(EngineParams params, store::BlockStore& store, Locator& locator)
    : params_(std::move(params)),
      store_(store),
      locator_(locator),
      sealer_(params_.cipher, params_.seed) {}

std::uint32_t Engine::sealed_bytes() const {
    return static_cast<std::uint32_t>(crypto::sealed_block_size(params_.accounted_payload));
}

std::uint32_t Engine::stored_bytes() const {
    if (params_.payload_mode == PayloadMode::MetadataOnly) return 0;
    return static_cast<std::uint32_t>(crypto::sealed_block_size(params_.payload_bytes));
}

std::uint32_t Engine::compressed_elems() const {
    return static_cast<std::uint32_t>(codec::elems_for(sealed_bytes()));
}

store::LevelRef Engine::ref(std::uint32_t p, std::uint8_t level) const {
    return store::LevelRef{p, level, parts_[p].levels[level].epoch};
}

void Engine::setup(Rng& rng) {
    const auto& g = geo();
    parts_.assign(g.partitions, PartitionState{});
    std::vector<std::uint64_t> fills(g.partitions, 0);
    for (std::uint32_t p = 0; p < g.partitions; ++p) {
        auto& ps = parts_[p];
        ps.levels.reserve(g.levels);
        std::uint64_t mask = std::uint64_t{1} << g.top();
        for (std::uint32_t l = 0; l < g.top(); ++l)
            if (rng() & 1) mask |= std::uint64_t{1} << l;
        for (std::uint32_t l = 0; l < g.levels; ++l) {
            auto lv = empty_level(g.size(l));
            if ((mask >> l) & 1) {
                lv.filled = true;
                lv.virtual_zero = true;
                lv.gen = ++gen_counter_;
                lv.key = sealer_.fresh_key(params_.payload_mode == PayloadMode::Full);
                lv.prp = crypto::Prp(lv.key.master, lv.size);
                reset_bits(lv);
            }
            ps.levels.push_back(std::move(lv));
        }
        fills[p] = mask;
        ps.writes = fill_pattern(p);
    }
    store::StoreSetup s;
    s.partitions = g.partitions;
    s.level_sizes = g.level_sizes;
    s.sealed_bytes = sealed_bytes();
    s.stored_bytes = stored_bytes();
    s.compressed_elems = compressed_elems();
    s.delete_on_read = params_.delete_on_read;
    s.initial_fill = std::move(fills);
    store_.setup(s);
}

std::uint32_t Engine::fill_pattern(std::uint32_t p) const {
    std::uint32_t v = 0;
    const auto& ls = parts_[p].levels;
    for (std::uint32_t l = 0; l + 1 < ls.size(); ++l)
        if (ls[l].filled) v |= 1u << l;
    return v;
}

std::uint32_t Engine::last_consecutive(std::uint32_t p) const {
    const auto& ls = parts_[p].levels;
    std::uint32_t c = 0;
    while (c < ls.size() && ls[c].filled) ++c;
    return c;
}

void Engine::note_load(std::uint32_t p, int delta) {
    auto& ps = parts_[p];
    PARTORAM_CHECK(delta >= 0 || ps.load >= static_cast<std::uint32_t>(-delta),
                   "partition load underflow");
    ps.load = static_cast<std::uint32_t>(static_cast<std::int64_t>(ps.load) + delta);
    counters_.max_load = std::max<std::uint64_t>(counters_.max_load, ps.load);
}

store::FetchRequest Engine::take(std::uint32_t p, std::uint8_t level, std::uint32_t i) {
    auto& lv = parts_[p].levels[level];
    PARTORAM_CHECK(lv.filled, "read from an unfilled level");
    PARTORAM_CHECK(i < lv.size, "buffer index out of range");
    if (lv.is_read(i)) throw InternalError("slot read twice within one level epoch");
    lv.read_bits[i >> 6] |= std::uint64_t{1} << (i & 63);
    ++lv.reads;
    return store::FetchRequest{ref(p, level), lv.offset(i)};
}

std::uint32_t Engine::next_dummy(std::uint32_t p, std::uint8_t level) {
    auto& lv = parts_[p].levels[level];
    while (lv.cnt < lv.size && lv.is_read(lv.cnt)) ++lv.cnt;
    if (lv.cnt >= lv.size) throw InternalError("level ran out of dummy slots");
    return lv.cnt++;
}

bool Engine::is_live_real(std::uint32_t p, std::uint8_t level, std::uint32_t i) const {
    const auto& lv = parts_[p].levels[level];
    return i < lv.k && locator_.holds(lv.ids[i], p, level, i, lv.gen);
}

std::vector<std::uint32_t> Engine::choose_unread(std::uint32_t p, std::uint8_t level,
                                                 const ReadTarget* protect) const {
    const auto& lv = parts_[p].levels[level];
    const std::uint32_t need = lv.half;
    std::vector<std::uint32_t> out;
    out.reserve(need);
    std::vector<std::uint32_t> stale;
    for (std::uint32_t i = 0; i < lv.k; ++i) {
        if (lv.is_read(i)) continue;
        bool prot = protect && protect->level == level && protect->index == i;
        if (prot || locator_.holds(lv.ids[i], p, level, i, lv.gen))
            out.push_back(i);
        else
            stale.push_back(i);
    }
    if (out.size() > need) throw InternalError("more live reals than half a level");
    for (std::uint32_t j = std::max(lv.cnt, lv.k); j < lv.size && out.size() < need; ++j)
        if (!lv.is_read(j)) out.push_back(j);
    for (std::size_t s = 0; s < stale.size() && out.size() < need; ++s) out.push_back(stale[s]);
    if (out.size() != need) throw InternalError("level has fewer unread slots than half");
    return out;
}

Block Engine::open_fetched(std::uint32_t p, std::uint8_t level, std::uint32_t i,
                           const crypto::CipherBlock& cb) const {
    const auto& lv = parts_[p].levels[level];
    BlockId expect = i < lv.k ? lv.ids[i] : kDummy;
    if (params_.payload_mode == PayloadMode::MetadataOnly) return Block{expect, {}};
    if (lv.virtual_zero) {
        bool zero = cb.size() == stored_bytes() &&
                    std::all_of(cb.begin(), cb.end(), [](std::uint8_t b) { return b == 0; });
        if (!zero) throw IntegrityViolation("virtual level slot is not all-zero");
        return Block{kDummy, {}};
    }
    // Free rows of a compressed upload are never authenticated and never hold reals.
    if (lv.compressed && i >= lv.half) return Block{kDummy, {}};
    Block b = sealer_.open_block(lv.key, lv.offset(i), cb);
    if (b.id != expect) throw IntegrityViolation("block identity does not match the level");
    return b;
}

void Engine::verify_meta(std::uint32_t p, std::uint8_t level, const store::Bytes& sealed) const {
    const auto& lv = parts_[p].levels[level];
    if (lv.virtual_zero) {
        if (!sealed.empty()) throw IntegrityViolation("virtual level carries metadata");
        return;
    }
    auto plain = sealer_.open(lv.key, crypto::kMetaIndex, sealed);
    if (plain.size() != std::size_t{lv.size} * crypto::kMetaEntryBytes)
        throw IntegrityViolation("metadata size mismatch");
    for (std::uint32_t i = 0; i < lv.k; ++i) {
        std::size_t at = std::size_t{lv.offset(i)} * crypto::kMetaEntryBytes;
        if (get_le64(plain.data() + at) != lv.ids[i])
            throw InternalError("server metadata disagrees with the client level copy");
    }
}

void Engine::retire(std::uint32_t p, std::uint8_t level) {
    auto& lv = parts_[p].levels[level];
    store_.mark_unfilled(ref(p, level));
    lv.filled = false;
    lv.virtual_zero = false;
    lv.frozen = false;
    lv.k = lv.cnt = lv.reads = 0;
    lv.ids = {};
    lv.read_bits = {};
    lv.pool = {};
}

std::vector<std::vector<Entry>> Engine::distribute(const std::vector<std::uint8_t>& outputs,
                                                   std::vector<Entry> entries) const {
    std::vector<std::size_t> order(outputs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return outputs[a] > outputs[b]; });
    std::vector<std::vector<Entry>> parts(outputs.size());
    std::size_t at = 0;
    for (auto o : order) {
        std::size_t take = std::min<std::size_t>(geo().real_cap(outputs[o]), entries.size() - at);
        parts[o].reserve(take);
        for (std::size_t j = 0; j < take; ++j) parts[o].push_back(std::move(entries[at + j]));
        at += take;
    }
    if (at != entries.size())
        throw CapacityViolation("shuffle output exceeds level capacity (" +
                                std::to_string(entries.size()) + " reals)");
    return parts;
}

PreparedLevel Engine::prepare(std::uint32_t p, std::uint8_t level, std::vector<Entry> entries) {
    PreparedLevel out;
    out.level = level;
    auto& st = out.state;
    st = empty_level(geo().size(level));
    if (entries.size() > st.half)
        throw CapacityViolation("level " + std::to_string(level) + " over real capacity");
    st.filled = true;
    st.k = static_cast<std::uint32_t>(entries.size());
    st.cnt = st.k;
    st.epoch = parts_[p].levels[level].epoch + 1;
    st.gen = ++gen_counter_;
    st.compressed = params_.compression;
    st.key = sealer_.fresh_key(params_.payload_mode == PayloadMode::Full);
    st.prp = crypto::Prp(st.key.master, st.size);
    reset_bits(st);
    st.ids.reserve(st.k);
    for (const auto& e : entries) st.ids.push_back(e.id);

    const std::uint32_t items = st.compressed ? st.half : st.size;
    if (params_.payload_mode == PayloadMode::MetadataOnly) {
        out.items.resize(items);
    } else {
        st.perm.resize(st.size);
        for (std::uint32_t i = 0; i < st.size; ++i) st.perm[i] = static_cast<std::uint32_t>(st.prp.apply(i));
        const std::uint32_t pb = params_.payload_bytes;
        Payload zeros(pb, 0);
        std::vector<store::Bytes> rows(st.size);
        std::vector<std::uint8_t> meta(std::size_t{st.size} * crypto::kMetaEntryBytes, 0);
        for (std::uint32_t o = 0; o < st.size; ++o)
            put_le64(meta.data() + std::size_t{o} * crypto::kMetaEntryBytes, kDummy);
        std::vector<std::uint32_t> positions;
        const std::uint32_t sealed_rows = st.compressed ? st.half : st.size;
        positions.reserve(sealed_rows);
        for (std::uint32_t i = 0; i < sealed_rows; ++i) {
            std::uint32_t o = st.offset(i);
            if (i < st.k) {
                auto& pl = entries[i].payload;
                pl.resize(pb, 0);
                rows[o] = sealer_.seal_block(st.key, o, entries[i].id, pl);
                put_le64(meta.data() + std::size_t{o} * crypto::kMetaEntryBytes, entries[i].id);
            } else {
                rows[o] = sealer_.seal_block(st.key, o, kDummy, zeros);
            }
            positions.push_back(o);
        }
        if (st.compressed) {
            auto x = codec::compress_upload(rows, positions);
            out.items.reserve(x.size());
            for (const auto& v : x) out.items.push_back(codec::encode_vec(v));
        } else {
            out.items = std::move(rows);
        }
        out.meta = sealer_.seal(st.key, crypto::kMetaIndex, meta);
    }
    ++counters_.levels_built;
    return out;
}

std::uint32_t Engine::upload(std::uint32_t p, PreparedLevel& lvl, std::uint32_t max_items) {
    const auto total = static_cast<std::uint32_t>(lvl.items.size());
    std::uint32_t n = std::min(max_items, total - lvl.sent);
    if (n == 0 && lvl.sent > 0) return 0;
    store::LevelUpload up;
    up.ref = store::LevelRef{p, lvl.level, lvl.state.epoch};
    up.level_size = lvl.state.size;
    up.first = lvl.sent;
    up.total = total;
    up.compressed = lvl.state.compressed;
    up.items.reserve(n);
    for (std::uint32_t j = 0; j < n; ++j) up.items.push_back(std::move(lvl.items[lvl.sent + j]));
    if (lvl.sent + n == total) up.meta = std::move(lvl.meta);
    store_.store_level(up);
    lvl.sent += n;
    return n;
}

void Engine::install(std::uint32_t p, PreparedLevel&& lvl, const std::function<bool(BlockId)>& keep) {
    PARTORAM_CHECK(lvl.uploaded(), "installing a level before its upload finished");
    auto& slot = parts_[p].levels[lvl.level];
    PARTORAM_CHECK(!slot.filled || lvl.level == geo().top(), "installing over a filled level");
    slot = std::move(lvl.state);
    for (std::uint32_t i = 0; i < slot.k; ++i)
        if (!keep || keep(slot.ids[i])) locator_.place(slot.ids[i], p, lvl.level, i, slot.gen);
}

void Engine::shuffle_sync(std::uint32_t p, const std::vector<std::uint8_t>& inputs,
                          const std::vector<std::uint8_t>& outputs, std::vector<Entry> extra,
                          ReadTarget* protect) {
    struct Src {
        std::uint8_t level;
        std::uint32_t index;
        bool real;
    };
    std::vector<store::FetchRequest> reqs;
    std::vector<Src> srcs;
    for (auto l : inputs) {
        if (params_.fetch_metadata) {
            auto meta = store_.fetch_meta(ref(p, l));
            if (params_.payload_mode == PayloadMode::Full) verify_meta(p, l, meta);
        }
        for (auto i : choose_unread(p, l, protect)) {
            bool prot = protect && protect->level == l && protect->index == i;
            srcs.push_back(Src{l, i, prot || is_live_real(p, l, i)});
            reqs.push_back(take(p, l, i));
        }
    }
    std::vector<std::size_t> order(reqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (srcs[a].level != srcs[b].level) return srcs[a].level < srcs[b].level;
        return reqs[a].offset < reqs[b].offset;
    });
    std::vector<store::FetchRequest> sorted;
    sorted.reserve(reqs.size());
    for (auto o : order) sorted.push_back(reqs[o]);
    std::vector<crypto::CipherBlock> blocks;
    if (!sorted.empty()) blocks = store_.fetch_blocks(sorted);

    std::vector<Entry> entries;
    const bool full = params_.payload_mode == PayloadMode::Full;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& s = srcs[order[j]];
        if (!s.real && !full) continue;
        Block b = open_fetched(p, s.level, s.index, blocks[j]);
        if (s.real) entries.push_back(Entry{b.id, std::move(b.payload)});
    }
    for (auto l : inputs) retire(p, l);
    for (auto& e : extra) entries.push_back(std::move(e));
    counters_.shuffle_buffer_peak =
        std::max<std::uint64_t>(counters_.shuffle_buffer_peak, entries.size());

    auto split = distribute(outputs, std::move(entries));
    const BlockId prot_id = protect ? protect->id : kDummy;
    for (std::size_t o = 0; o < outputs.size(); ++o) {
        auto prepared = prepare(p, outputs[o], std::move(split[o]));
        upload(p, prepared, static_cast<std::uint32_t>(prepared.items.size()));
        if (protect) {
            const auto& ids = prepared.state.ids;
            auto it = std::find(ids.begin(), ids.end(), prot_id);
            if (it != ids.end()) {
                protect->level = outputs[o];
                protect->index = static_cast<std::uint32_t>(it - ids.begin());
            }
        }
        install(p, std::move(prepared), [prot_id](BlockId id) { return id != prot_id; });
    }
}

void Engine::force_reshuffle(std::uint32_t p, std::uint8_t exhausted, ReadTarget* protect) {
    auto& ps = parts_[p];
    const std::uint32_t top = geo().top();
    std::uint32_t t = exhausted + 1u;
    while (t < top && ps.levels[t].filled) ++t;
    if (t > top) t = top;
    std::vector<std::uint8_t> inputs;
    for (std::uint32_t l = 0; l <= t; ++l)
        if (ps.levels[l].filled) inputs.push_back(static_cast<std::uint8_t>(l));
    shuffle_sync(p, inputs, {static_cast<std::uint8_t>(t)}, {}, protect);
    ++counters_.forced_reshuffles;
    const std::uint64_t period = geo().counter_period();
    if (t == top)
        ps.writes = (ps.writes / period + 1) * period;
    else
        ps.writes = (ps.writes / period) * period + fill_pattern(p);
}

bool Engine::ensure_readable(std::uint32_t p, ReadTarget* protect) {
    const auto& ls = parts_[p].levels;
    int worst = -1;
    for (std::uint32_t l = 0; l < ls.size(); ++l)
        if (ls[l].filled && ls[l].reads >= ls[l].half) worst = static_cast<int>(l);
    if (worst < 0) return false;
    force_reshuffle(p, static_cast<std::uint8_t>(worst), protect);
    return true;
}

Payload Engine::read(std::uint32_t p, ReadTarget* target) {
    ensure_readable(p, target);
    auto& ls = parts_[p].levels;
    std::vector<store::FetchRequest> reqs;
    std::vector<std::pair<std::uint8_t, std::uint32_t>> srcs;
    bool found = false;
    for (std::uint32_t l = 0; l < ls.size(); ++l) {
        if (!ls[l].filled) continue;
        auto lvl = static_cast<std::uint8_t>(l);
        std::uint32_t i;
        if (target && target->level == l) {
            i = target->index;
            if (i >= ls[l].k || ls[l].ids[i] != target->id)
                throw InternalError("position map points at a slot without the block");
            found = true;
        } else {
            i = next_dummy(p, lvl);
        }
        reqs.push_back(take(p, lvl, i));
        srcs.emplace_back(lvl, i);
    }
    if (target && !found) throw InternalError("read target level is not filled");
    auto blocks = store_.fetch_blocks(reqs);
    Payload out;
    const bool full = params_.payload_mode == PayloadMode::Full;
    for (std::size_t j = 0; j < srcs.size(); ++j) {
        bool is_target = target && srcs[j].first == target->level;
        if (!full) continue;
        Block b = open_fetched(p, srcs[j].first, srcs[j].second, blocks[j]);
        if (is_target) out = std::move(b.payload);
    }
    if (target) note_load(p, -1);
    ++counters_.reads;
    if (params_.eager_exhaustion_check) ensure_readable(p, nullptr);
    return out;
}

void Engine::write(std::uint32_t p, Entry incoming) {
    auto& ps = parts_[p];
    const std::uint32_t top = geo().top();
    const std::uint32_t t = std::min(last_consecutive(p), top);
    std::vector<std::uint8_t> inputs;
    for (std::uint32_t l = 0; l <= t; ++l)
        if (ps.levels[l].filled) inputs.push_back(static_cast<std::uint8_t>(l));
    std::vector<Entry> extra;
    if (is_dummy(incoming.id)) {
        ++counters_.dummy_writes;
    } else {
        note_load(p, +1);
        extra.push_back(std::move(incoming));
    }
    shuffle_sync(p, inputs, {static_cast<std::uint8_t>(t)}, std::move(extra), nullptr);
    ++ps.writes;
    ++counters_.writes;
    PARTORAM_CHECK(fill_pattern(p) == ps.writes % geo().counter_period(),
                   "level fill pattern diverged from the write counter");
}

}  // namespace partoram::partition
