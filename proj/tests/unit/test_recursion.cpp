// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"
#include "doctest.h"
#include "recursion/stack.hpp"

using namespace partoram;
using namespace partoram::recursion;

namespace {

OramConfig rec(std::uint64_t n, std::uint32_t b, std::uint64_t threshold) {
    OramConfig c;
    c.n = n;
    c.block_size = b;
    c.recursive = true;
    c.recursion_threshold = threshold;
    c.seed = 41;
    return c;
}

}  // namespace

TEST_CASE("compression rate and stack capacities") {
    CHECK(derive_alpha(1u << 16, 256, 0) == 8);
    CHECK(derive_alpha(1u << 16, 16, 0) == 2);
    CHECK(derive_alpha(1u << 16, 256, 5) == 5);
    CHECK(stack_capacities(1u << 16, 8, 1024) == std::vector<std::uint64_t>{65536, 8192, 1024});
    CHECK(stack_capacities(1000, 3, 5000) == std::vector<std::uint64_t>{1000});
    CHECK(stack_capacities(1000, 3, 100) == std::vector<std::uint64_t>{1000, 334, 112, 38});
    CHECK_THROWS_AS(stack_capacities(100, 1, 10), ConfigError);
}

TEST_CASE("stack depth for 2^16 blocks of 256 bytes") {
    auto cfg = rec(1u << 16, 256, 1024);
    cfg.payload_mode = PayloadMode::MetadataOnly;
    RecursionStack s(cfg, {});
    CHECK(s.depth() == 2);
    CHECK(s.alpha() == 8);
    CHECK(s.level(1).config().n == 8192);
    CHECK(s.level(2).config().n == 1024);
    CHECK(s.report().resident_entries == 1024);
}

TEST_CASE("threshold at or above n gives the plain construction") {
    auto a = rec(1024, 64, 1024);
    auto b = a;
    b.recursive = false;
    RecursionStack sa(a, {}), sb(b, {});
    CHECK(sa.depth() == 0);
    std::vector<framework::TraceEvent> ta, tb;
    sa.top().set_trace(&ta);
    sb.top().set_trace(&tb);
    for (BlockId i = 0; i < 2000; ++i) {
        Payload d(64, static_cast<std::uint8_t>(i));
        CHECK(sa.access(Op::Write, (i * 37) % 1024, &d) == sb.access(Op::Write, (i * 37) % 1024, &d));
    }
    REQUIRE(ta.size() == tb.size());
    bool same = true;
    for (std::size_t i = 0; i < ta.size(); ++i) same = same && ta[i].p == tb[i].p;
    CHECK(same);
    CHECK(sa.top().stats().transfer.same_counters(sb.top().stats().transfer));
}

TEST_CASE("recursive stack reads its writes") {
    for (bool concurrent : {false, true}) {
        CAPTURE(concurrent);
        auto cfg = rec(1024, 128, 64);
        cfg.concurrent = concurrent;
        RecursionStack s(cfg, {});
        CHECK(s.depth() >= 1);
        std::map<BlockId, Payload> ref;
        Rng rng(6);
        for (int i = 0; i < 10000; ++i) {
            BlockId id = uniform_below(rng, cfg.n);
            if (uniform_below(rng, 2)) {
                Payload d(128, static_cast<std::uint8_t>(rng()));
                s.access(Op::Write, id, &d);
                ref[id] = d;
            } else {
                auto it = ref.find(id);
                Payload want = it == ref.end() ? Payload(128, 0) : it->second;
                REQUIRE(s.access(Op::Read, id) == want);
            }
        }
    }
}

TEST_CASE("each access runs one operation per stack level") {
    auto cfg = rec(1u << 14, 256, 256);
    cfg.payload_mode = PayloadMode::MetadataOnly;
    RecursionStack s(cfg, {});
    const std::uint64_t ops = 20000;
    for (BlockId i = 0; i < ops; ++i) s.access(Op::Read, i % cfg.n);
    auto r = s.report();
    CHECK(r.depth == s.depth());
    REQUIRE(r.levels.size() == r.depth + 1);
    std::uint64_t cap_sum = 0, server_sum = 0, cache_sum = 0;
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        CHECK(r.levels[i].ops == ops);
        if (i > 0) CHECK(r.levels[i].capacity * s.alpha() >= r.levels[i - 1].capacity);
        cap_sum += r.levels[i].capacity;
        server_sum += r.levels[i].server_peak_blocks;
        cache_sum += r.levels[i].cache_peak;
    }
    CHECK(r.cache_peak_sum == cache_sum);
    CHECK(r.server_peak_sum == server_sum);
    CHECK(static_cast<double>(server_sum) <= 4.6 * static_cast<double>(cap_sum));
    CHECK(r.resident_entries <= cfg.recursion_threshold);
}

TEST_CASE("single-level report matches the client's own accounting") {
    auto cfg = rec(1024, 64, 4096);
    RecursionStack s(cfg, {});
    for (BlockId i = 0; i < 1000; ++i) s.access(Op::Read, i);
    auto r = s.report();
    auto st = s.top().stats();
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0].cache_peak == st.cache_peak);
    CHECK(r.levels[0].server_peak_blocks == st.transfer.peak_server_blocks);
    CHECK(r.levels[0].blocks_transferred == st.transfer.blocks_up + st.transfer.blocks_down);
    CHECK(r.resident_entries == 1024);
}

TEST_CASE("small blocks clamp the compression rate with a warning") {
    auto cfg = rec(1u << 16, 32, 1024);
    auto w = config_warnings(cfg);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("clamped to 2") != std::string::npos);
    cfg.block_size = 256;
    CHECK(config_warnings(cfg).empty());
    cfg.block_size = 32;
    cfg.alpha = 4;
    CHECK(config_warnings(cfg).empty());
    cfg.alpha = 0;
    cfg.recursive = false;
    CHECK(config_warnings(cfg).empty());
}
