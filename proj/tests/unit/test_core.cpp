// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "blockstore/accounting.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/posmap.hpp"
#include "doctest.h"
#include "framework/client.hpp"

using namespace partoram;

namespace {

crypto::Key128 test_key(std::uint8_t fill) {
    crypto::Key128 k{};
    k.fill(fill);
    return k;
}

}  // namespace

TEST_CASE("config parses sizes, flags and enums") {
    OramConfig c;
    c.set("n", "2^16");
    c.set("block_size", "64KB");
    c.set("nu", "2.5");
    c.set("evict", "rand");
    c.set("piggyback", "off");
    c.set("payload-mode", "metadata");
    CHECK(c.n == 65536);
    CHECK(c.block_size == 65536);
    CHECK(c.nu == doctest::Approx(2.5));
    CHECK(c.evict_algo == EvictAlgo::Random);
    CHECK_FALSE(c.piggyback);
    CHECK(c.payload_mode == PayloadMode::MetadataOnly);
    CHECK_THROWS_AS(c.set("bogus", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("n", "-4"), ConfigError);
    CHECK_THROWS_AS(c.set("piggyback", "maybe"), ConfigError);
}

TEST_CASE("config validation rejects inconsistent settings") {
    OramConfig c;
    c.nu = -1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.nu = 1.5;
    c.evict_algo = EvictAlgo::Random;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.nu = 2;
    CHECK_NOTHROW(c.validate());
    c.n = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config text round trips through to_map") {
    OramConfig a;
    a.n = 4096;
    a.nu = 0.5;
    a.compression = true;
    a.seed = 99;
    a.budget_w = 8;
    std::string text = "# comment\n";
    for (const auto& [k, v] : a.to_map()) text += k + " = " + v + "\n";
    OramConfig b;
    for (const auto& [k, v] : parse_kv_text(text)) b.set(k, v);
    CHECK(b.to_map() == a.to_map());
    CHECK_THROWS_AS(parse_kv_text("novalue\n"), ConfigError);
}

TEST_CASE("geometry follows the level layout") {
    CHECK(ceil_sqrt(1) == 1);
    CHECK(ceil_sqrt(1024) == 32);
    CHECK(ceil_sqrt(1025) == 33);
    CHECK(ceil_log2(1) == 0);
    CHECK(ceil_log2(1024) == 10);
    CHECK(ceil_log2(1025) == 11);

    auto g = Geometry::derive(1u << 20, 0, empirical_capacity(1u << 20));
    CHECK(g.partitions == 1024);
    CHECK(g.levels == 11);
    for (std::uint32_t l = 0; l + 1 < g.levels; ++l) CHECK(g.size(l) == (2u << l));
    CHECK(g.size(g.top()) == 2 * g.capacity);
    CHECK(g.capacity >= static_cast<std::uint32_t>(std::ceil(1.15 * 1024)));
    CHECK(g.counter_period() == 1024);

    CHECK(analytic_capacity(1u << 16, 1, 2) ==
          static_cast<std::uint32_t>(std::ceil(256 + 3 * std::log(65536.0))));
}

TEST_CASE("position map plain mode") {
    PositionMap m(PosMapMode::Plain, 1024, 32, test_key(1));
    CHECK(m.get(7).kind == PositionKind::Zeroed);
    m.set(7, Position::server(3, 2, 5));
    CHECK(m.get(7) == Position::server(3, 2, 5));
    m.set(0, Position::cache_slot(4));
    CHECK(m.get(0) == Position::cache_slot(4));
    m.set(0, Position::server(1, 0, 1));
    m.set(0, Position::server(2, 1, 3));
    CHECK(m.get(0) == Position::server(2, 1, 3));
    CHECK_THROWS_AS(m.get(1024), DomainError);
    CHECK_THROWS_AS(m.set(1, Position::server(32, 0, 0)), DomainError);
    m.set_level_sizes({2, 4, 8, 16, 32, 128});
    CHECK_THROWS_AS(m.set(1, Position::server(0, 0, 2)), DomainError);
    CHECK_THROWS_AS(m.set(1, Position::server(0, 6, 0)), DomainError);
    CHECK_NOTHROW(m.set(1, Position::server(0, 5, 127)));

    for (BlockId id = 0; id < 1024; ++id)
        m.set(id, Position::server(static_cast<std::uint32_t>(id % 32), 5,
                                   static_cast<std::uint32_t>(id / 32)));
    std::set<std::uint64_t> distinct;
    for (BlockId id = 0; id < 1024; ++id) distinct.insert(PositionMap::encode_plain(m.get(id)));
    CHECK(distinct.size() == 1024);
    auto est = m.memory_estimate();
    CHECK(est.actual_bytes == 8192);
    CHECK(est.actual_bytes <= 1024 * PositionMap::kPlainEntryBytes);
}

TEST_CASE("plain entry encoding round trips") {
    for (auto pos : {Position::zeroed(5), Position::server(1000, 10, 2047),
                     Position::cache_slot(31), Position::pending(7)}) {
        CHECK(PositionMap::decode_plain(PositionMap::encode_plain(pos)) == pos);
    }
}

TEST_CASE("counter-compressed map derives partitions from the counter") {
    PositionMap m(PosMapMode::CounterCompressed, 1000, 32, test_key(2));
    CHECK(m.counter(5) == 0);
    CHECK(m.get(5).kind == PositionKind::Zeroed);
    CHECK(m.get(5).part == m.prf_slot(5, 0));
    std::uint32_t slot = m.next_slot(5);
    m.set(5, Position::cache_slot(slot));
    CHECK(m.counter(5) == 1);
    CHECK(m.get(5) == Position::cache_slot(slot));
    m.set(5, Position::server(slot, 3, 9));
    CHECK(m.get(5) == Position::server(slot, 3, 9));
    CHECK(m.counter(5) == 1);
}

TEST_CASE("position map memory estimates") {
    auto big = PositionMap::model_estimate(PosMapMode::CounterCompressed, std::uint64_t{1} << 32);
    CHECK(big.model_bytes == doctest::Approx(0.255 * 4294967296.0));
    CHECK(big.model_bytes < 1.2e9);
    CHECK(big.model_bytes > 0.9e9);
    CHECK(PositionMap::model_estimate(PosMapMode::CounterCompressed, 0).model_bytes == 0);
    CHECK(PositionMap::model_estimate(PosMapMode::Plain, 0).actual_bytes == 0);
    CHECK(PositionMap::model_estimate(PosMapMode::Plain, 1024).actual_bytes == 8192);
}

TEST_CASE("plain and counter position maps yield the same partition trace") {
    OramConfig cfg;
    cfg.n = 256;
    cfg.block_size = 16;
    cfg.seed = 5;
    std::vector<std::vector<framework::TraceEvent>> traces(2);
    std::vector<Payload> reads[2];
    int idx = 0;
    for (auto mode : {PosMapMode::Plain, PosMapMode::CounterCompressed}) {
        cfg.posmap = mode;
        framework::ClientOptions opts;
        opts.directory = std::make_unique<framework::LocalDirectory>(
            mode, cfg.n, ceil_sqrt(cfg.n), framework::derive_key(cfg.seed, streams::kPrfKeys), true);
        framework::OramClient c(cfg, std::shared_ptr<store::BlockStore>(store::make_memory_store()),
                                std::move(opts));
        c.set_trace(&traces[idx]);
        Rng rng(11);
        for (int i = 0; i < 1000; ++i) {
            BlockId id = uniform_below(rng, cfg.n);
            if (i % 3 == 0) {
                Payload d(16, static_cast<std::uint8_t>(i));
                c.write(id, d);
            } else {
                reads[idx].push_back(c.read(id));
            }
        }
        ++idx;
    }
    REQUIRE(traces[0].size() == traces[1].size());
    bool same = true;
    for (std::size_t i = 0; i < traces[0].size(); ++i)
        same = same && traces[0][i].p == traces[1][i].p && traces[0][i].kind == traces[1][i].kind;
    CHECK(same);
    CHECK(reads[0] == reads[1]);
}
