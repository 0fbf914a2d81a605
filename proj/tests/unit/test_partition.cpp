// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"
#include "doctest.h"
#include "framework/client.hpp"
#include "framework/directory.hpp"
#include "partition/codec.hpp"
#include "partition/engine.hpp"
#include "support.hpp"

using namespace partoram;
using namespace partoram::partition;

namespace {

struct Rig {
    Geometry geo;
    RecordingStore store;
    framework::LocalDirectory dir;
    Engine engine;
    Rng rng;

    static EngineParams params(const Geometry& g, bool compression) {
        EngineParams ep;
        ep.geo = g;
        ep.payload_bytes = 16;
        ep.accounted_payload = 16;
        ep.compression = compression;
        ep.seed = 3;
        return ep;
    }

    explicit Rig(std::uint64_t n, bool compression = false, std::uint64_t seed = 1)
        : geo(Geometry::derive(n, 0, empirical_capacity(n))),
          dir(PosMapMode::Plain, n, geo.partitions, crypto::Key128{}),
          engine(params(geo, compression), store, dir),
          rng(seed) {
        dir.map().set_level_sizes(geo.level_sizes);
        engine.setup(rng);
    }

    std::uint32_t filled_levels(std::uint32_t p) const {
        std::uint32_t f = 0;
        for (const auto& l : engine.part(p).levels) f += l.filled;
        return f;
    }
};

Payload payload_of(BlockId id) { return Payload(16, static_cast<std::uint8_t>(id * 7 + 1)); }

}  // namespace

TEST_CASE("setup fills the top level and a uniform pattern below it") {
    const std::uint64_t n = 1u << 16;
    auto geo = Geometry::derive(n, 0, empirical_capacity(n));
    std::vector<std::uint64_t> filled(geo.levels, 0);
    std::uint64_t samples = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RecordingStore st;
        framework::LocalDirectory dir(PosMapMode::Plain, n, geo.partitions, crypto::Key128{});
        auto ep = Rig::params(geo, false);
        ep.payload_mode = PayloadMode::MetadataOnly;
        ep.payload_bytes = 0;
        Engine e(ep, st, dir);
        Rng rng(seed);
        e.setup(rng);
        CHECK(st.uploads.empty());
        for (std::uint32_t p = 0; p < geo.partitions; ++p, ++samples) {
            const auto& ps = e.part(p);
            CHECK(ps.writes == e.fill_pattern(p));
            for (std::uint32_t l = 0; l < geo.levels; ++l) filled[l] += ps.levels[l].filled;
        }
    }
    CHECK(samples >= 10000);
    CHECK(filled[geo.top()] == samples);
    for (std::uint32_t l = 0; l < geo.top(); ++l) {
        double f = static_cast<double>(filled[l]) / static_cast<double>(samples);
        CHECK(f == doctest::Approx(0.5).epsilon(0.04));
    }
}

TEST_CASE("dummy read fetches one block per filled level in one batch") {
    Rig rig(256);
    for (std::uint32_t p = 0; p < rig.geo.partitions; ++p) {
        auto before = rig.store.stats().blocks_down;
        std::vector<std::uint32_t> cnt;
        for (const auto& l : rig.engine.part(p).levels) cnt.push_back(l.cnt);
        auto batches = rig.store.fetches.size();
        rig.engine.read(p, nullptr);
        CHECK(rig.store.fetches.size() == batches + 1);
        CHECK(rig.store.stats().blocks_down - before == rig.filled_levels(p));
        const auto& ls = rig.engine.part(p).levels;
        for (std::size_t l = 0; l < ls.size(); ++l)
            if (ls[l].filled) CHECK(ls[l].cnt == cnt[l] + 1);
    }
}

TEST_CASE("consecutive dummy reads hit distinct offsets") {
    Rig rig(256);
    std::uint32_t p = 0;
    rig.engine.read(p, nullptr);
    rig.engine.read(p, nullptr);
    auto& a = rig.store.fetches[rig.store.fetches.size() - 2];
    auto& b = rig.store.fetches.back();
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        CHECK(a[j].ref.level == b[j].ref.level);
        CHECK(a[j].offset != b[j].offset);
    }
}

TEST_CASE("writes follow the binary counter") {
    Rig rig(256);
    const std::uint32_t p = 2;
    auto& eng = rig.engine;
    const auto period = rig.geo.counter_period();
    while (eng.fill_pattern(p) != 0) eng.write(p, Entry{});

    // Empty lower levels: the first real write lands in level 0.
    auto ups = rig.store.uploads.size();
    eng.write(p, Entry{10, payload_of(10)});
    const auto& ls = eng.part(p).levels;
    CHECK(ls[0].filled);
    CHECK(ls[0].size == 2);
    CHECK(ls[0].k == 1);
    REQUIRE(rig.store.uploads.size() == ups + 1);
    CHECK(rig.store.uploads.back().level == 0);
    CHECK(rig.store.uploads.back().total == 2);
    CHECK(rig.dir.map().get(10).kind == PositionKind::Server);
    CHECK(rig.dir.map().get(10).level == 0);

    // Second write merges level 0 into level 1.
    eng.write(p, Entry{11, payload_of(11)});
    CHECK_FALSE(ls[0].filled);
    CHECK(ls[1].filled);
    CHECK(ls[1].size == 4);
    CHECK(ls[1].k == 2);
    CHECK(rig.dir.map().get(10).level == 1);

    // Fill every lower level, then the next write rebuilds the top.
    while (eng.fill_pattern(p) != period - 1) eng.write(p, Entry{});
    auto epoch = ls[rig.geo.top()].epoch;
    eng.write(p, Entry{});
    CHECK(eng.fill_pattern(p) == 0);
    CHECK(ls[rig.geo.top()].epoch > epoch);
    for (std::uint32_t l = 0; l < rig.geo.top(); ++l) CHECK_FALSE(ls[l].filled);
    CHECK(rig.dir.map().get(10).level == rig.geo.top());
    CHECK(rig.dir.map().get(11).level == rig.geo.top());

    for (int i = 0; i < 3 * static_cast<int>(period); ++i) {
        eng.write(p, Entry{});
        CHECK(eng.fill_pattern(p) == eng.part(p).writes % period);
    }
}

TEST_CASE("reads return the block the position map names") {
    Rig rig(256);
    const std::uint32_t p = 1;
    for (BlockId id = 0; id < 20; ++id) {
        rig.engine.write(p, Entry{id, payload_of(id)});
        if (id % 3 == 0) rig.engine.read(p, nullptr);
    }
    for (BlockId id = 0; id < 20; ++id) {
        auto pos = rig.dir.map().get(id);
        REQUIRE(pos.kind == PositionKind::Server);
        CHECK(pos.part == p);
        ReadTarget t{id, pos.level, pos.index};
        CHECK(rig.engine.read(p, &t) == payload_of(id));
        rig.dir.map().set(id, Position::cache_slot(0));
    }
}

TEST_CASE("position map agrees with level contents after every shuffle") {
    Rig rig(1024);
    Rng rng(9);
    std::map<BlockId, std::uint32_t> home;
    for (int step = 0; step < 2000; ++step) {
        auto p = static_cast<std::uint32_t>(uniform_below(rng, rig.geo.partitions));
        auto id = static_cast<BlockId>(uniform_below(rng, 1024));
        auto pos = rig.dir.map().get(id);
        if (pos.kind == PositionKind::Server) {
            ReadTarget t{id, pos.level, pos.index};
            CHECK(rig.engine.read(pos.part, &t) == payload_of(id));
            rig.dir.map().set(id, Position::cache_slot(0));
            rig.engine.write(p, Entry{id, payload_of(id)});
        } else {
            rig.engine.read(p, nullptr);
            if (home.size() < 600) rig.engine.write(p, Entry{id, payload_of(id)});
            else rig.engine.write(p, Entry{});
        }
        home[id] = p;
    }
    std::uint64_t live = 0;
    for (std::uint32_t p = 0; p < rig.geo.partitions; ++p) {
        const auto& ls = rig.engine.part(p).levels;
        for (std::uint32_t l = 0; l < ls.size(); ++l) {
            if (!ls[l].filled) continue;
            CHECK(ls[l].k <= ls[l].half);
            for (std::uint32_t i = 0; i < ls[l].k; ++i) {
                if (ls[l].is_read(i)) continue;
                if (!rig.dir.holds(ls[l].ids[i], p, static_cast<std::uint8_t>(l), i, ls[l].gen))
                    continue;
                ++live;
                CHECK(rig.dir.map().get(ls[l].ids[i]) ==
                      Position::server(p, static_cast<std::uint8_t>(l), i));
            }
        }
    }
    std::uint64_t mapped = 0;
    for (BlockId id = 0; id < 1024; ++id)
        mapped += rig.dir.map().get(id).kind == PositionKind::Server;
    CHECK(live == mapped);
}

TEST_CASE("every upload has the full level size, halved when compressed") {
    for (bool compression : {false, true}) {
        CAPTURE(compression);
        Rig rig(256, compression);
        for (int i = 0; i < 200; ++i)
            rig.engine.write(static_cast<std::uint32_t>(i % 4),
                             i % 2 ? Entry{static_cast<BlockId>(i), payload_of(i)} : Entry{});
        REQUIRE_FALSE(rig.store.uploads.empty());
        for (const auto& u : rig.store.uploads) {
            CHECK(u.level_size == rig.geo.size(u.level));
            CHECK(u.total == (compression ? u.level_size / 2 : u.level_size));
            CHECK(u.items == u.total);
            CHECK(u.meta);
        }
    }
}

TEST_CASE("compressed and plain runs return the same payloads") {
    std::vector<Payload> out[2];
    for (int c = 0; c < 2; ++c) {
        OramConfig cfg;
        cfg.n = 512;
        cfg.block_size = 40;
        cfg.compression = c == 1;
        cfg.seed = 21;
        framework::OramClient client(cfg,
                                     std::shared_ptr<store::BlockStore>(store::make_memory_store()));
        Rng rng(4);
        for (int i = 0; i < 3000; ++i) {
            BlockId id = uniform_below(rng, cfg.n);
            if (i % 2) {
                client.write(id, Payload(40, static_cast<std::uint8_t>(i)));
            } else {
                out[c].push_back(client.read(id));
            }
        }
    }
    CHECK(out[0] == out[1]);
}

TEST_CASE("codec field arithmetic") {
    using namespace codec;
    CHECK(mul(kPrime - 1, kPrime - 1) == 1);
    CHECK(add(kPrime - 1, 1) == 0);
    CHECK(sub(0, 1) == kPrime - 1);
    for (std::uint64_t a : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{12345}, kPrime - 2}) CHECK(mul(a, inv(a)) == 1);
    Bytes row = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(elems_for(10) == 2);
    CHECK(unpack(pack(row, 2), 10) == row);
    Vec v = {0, 1, kPrime - 1};
    CHECK(decode_vec(encode_vec(v)) == v);
}

TEST_CASE("codec with no real rows uploads nothing") {
    auto x = codec::compress_upload({}, {});
    CHECK(x.empty());
    CHECK(codec::decompress_upload(x, 8).empty());
}

TEST_CASE("codec recovers two real rows of four") {
    Rng rng(12);
    std::vector<codec::Bytes> rows(4, codec::Bytes(20));
    for (auto& r : rows)
        for (auto& b : r) b = static_cast<std::uint8_t>(rng());
    auto x = codec::compress_upload(rows, {0, 3});
    REQUIRE(x.size() == 2);
    auto y = codec::decompress_upload(x, 20);
    REQUIRE(y.size() == 4);
    CHECK(y[0] == rows[0]);
    CHECK(y[3] == rows[3]);
}

TEST_CASE("codec round trips random real subsets") {
    Rng rng(13);
    bool ok = true;
    for (int t = 0; t < 200; ++t) {
        std::size_t k = 1 + uniform_below(rng, 64);
        std::size_t bytes = 1 + uniform_below(rng, 40);
        std::vector<codec::Bytes> rows(2 * k, codec::Bytes(bytes));
        for (auto& r : rows)
            for (auto& b : r) b = static_cast<std::uint8_t>(rng());
        std::vector<std::uint32_t> idx(2 * k);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(k);
        auto y = codec::decompress_upload(codec::compress_upload(rows, idx), bytes);
        for (auto i : idx) ok = ok && y[i] == rows[i];
    }
    CHECK(ok);
}

TEST_CASE("server output depends on x alone") {
    // y = M x: the server recomputes every row without knowing which were real.
    codec::Vec a = {5, 6}, b = {7, 8};
    auto y = codec::decompress_upload({a, b}, 14);
    REQUIRE(y.size() == 4);
    for (std::uint64_t r = 0; r < 4; ++r) {
        auto row = codec::pack(y[r], 2);
        for (std::size_t e = 0; e < 2; ++e) {
            std::uint64_t want = codec::add(a[e], codec::mul(r + 1, b[e]));
            CHECK(row[e] == want);
        }
    }
}
