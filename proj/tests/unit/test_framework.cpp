// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"
#include "doctest.h"
#include "framework/client.hpp"
#include "framework/eviction.hpp"
#include "simulator/stats_math.hpp"
#include "support.hpp"

using namespace partoram;
using namespace partoram::framework;

namespace {

std::shared_ptr<store::BlockStore> mem() {
    return std::shared_ptr<store::BlockStore>(store::make_memory_store());
}

OramConfig small(std::uint64_t n = 256) {
    OramConfig c;
    c.n = n;
    c.block_size = 16;
    c.seed = 17;
    return c;
}

std::size_t count(const std::vector<TraceEvent>& t, TraceEvent::Kind k) {
    std::size_t n = 0;
    for (const auto& e : t) n += e.kind == k;
    return n;
}

}  // namespace

TEST_CASE("cache slots pop in FIFO order") {
    CacheSlots c(4);
    c.push(1, Block{7, {1}});
    c.push(1, Block{8, {2}});
    c.push(3, Block{9, {3}});
    CHECK(c.total() == 3);
    CHECK(c.peak() == 3);
    CHECK(c.contains(1, 8));
    CHECK_FALSE(c.contains(0, 8));
    auto b = c.pop(1);
    REQUIRE(b);
    CHECK(b->id == 7);
    CHECK(c.size(1) == 1);
    CHECK(c.take(3, 9) == Payload{3});
    CHECK_FALSE(c.take(3, 9));
    CHECK_FALSE(c.pop(0));
    CHECK(c.total() == 1);
    CHECK(c.peak() == 3);
}

TEST_CASE("never-written ids read as zeros and still cost one partition read") {
    auto cfg = small();
    OramClient c(cfg, mem());
    std::vector<TraceEvent> trace;
    c.set_trace(&trace);
    CHECK(c.read(5) == Payload(16, 0));
    CHECK(count(trace, TraceEvent::Kind::Read) == 1);
    CHECK(trace.front().kind == TraceEvent::Kind::Read);
}

TEST_CASE("read your writes") {
    auto cfg = small();
    OramClient c(cfg, mem());
    Payload x(16, 0x5A);
    CHECK(c.access(Op::Write, 5, &x) == Payload(16, 0));
    CHECK(c.read(5) == x);
    Payload y(16, 0x11);
    CHECK(c.access(Op::Write, 5, &y) == x);
    CHECK(c.read(5) == y);
    auto old = c.update(5, [](Payload& p) { p[0] = 0x22; });
    CHECK(old == y);
    CHECK(c.read(5)[0] == 0x22);
    CHECK_THROWS_AS(c.read(cfg.n), DomainError);
    Payload short_payload(3, 0);
    CHECK_THROWS_AS(c.write(1, short_payload), DomainError);
}

TEST_CASE("accessed block moves to the chosen cache slot") {
    auto cfg = small();
    cfg.nu = 0;
    cfg.piggyback = false;
    auto key = derive_key(cfg.seed, streams::kPrfKeys);
    PositionMap probe(PosMapMode::Plain, cfg.n, 16, key);
    BlockId id = 0;
    while (probe.prf_slot(id, 1) != 3) ++id;
    ClientOptions opts;
    opts.directory = std::make_unique<LocalDirectory>(PosMapMode::Plain, cfg.n, 16, key, true);
    OramClient c(cfg, mem(), std::move(opts));
    c.read(id);
    auto& dir = dynamic_cast<LocalDirectory&>(c.directory());
    CHECK(dir.map().get(id) == Position::cache_slot(3));
    CHECK(c.cache().contains(3, id));
}

TEST_CASE("piggybacked eviction writes back to the partition that was read") {
    auto cfg = small();
    cfg.nu = 0;
    OramClient c(cfg, mem());
    std::vector<TraceEvent> trace;
    c.set_trace(&trace);
    for (BlockId id = 0; id < 200; ++id) {
        trace.clear();
        c.read(id % 50);
        REQUIRE(trace.size() == 2);
        CHECK(trace[0].kind == TraceEvent::Kind::Read);
        CHECK(trace[1].kind == TraceEvent::Kind::Write);
        CHECK(trace[0].p == trace[1].p);
    }
}

TEST_CASE("every access issues one read and at least one write with piggyback") {
    for (auto algo : {EvictAlgo::Sequential, EvictAlgo::Random}) {
        auto cfg = small();
        cfg.evict_algo = algo;
        cfg.nu = 2;
        OramClient c(cfg, mem());
        std::vector<TraceEvent> trace;
        c.set_trace(&trace);
        Rng rng(1);
        std::uint64_t writes = 0;
        for (int i = 0; i < 500; ++i) {
            trace.clear();
            c.read(uniform_below(rng, cfg.n));
            CHECK(count(trace, TraceEvent::Kind::Read) == 1);
            CHECK(count(trace, TraceEvent::Kind::Write) >= 1);
            writes += count(trace, TraceEvent::Kind::Write);
            if (algo == EvictAlgo::Random) CHECK(count(trace, TraceEvent::Kind::Write) == 3);
        }
        CHECK(static_cast<double>(writes) / 500 == doctest::Approx(3.0).epsilon(0.1));
    }
}

TEST_CASE("evicting an empty slot issues a dummy write") {
    auto cfg = small();
    cfg.nu = 0;
    OramClient c(cfg, mem());
    auto before = c.engine().counters().dummy_writes;
    std::vector<TraceEvent> trace;
    c.set_trace(&trace);
    c.read(3);
    // The slot of the partition read is empty unless the new slot is the same one.
    bool same = c.cache().contains(trace[0].p, 3) || c.cache().total() == 0;
    CHECK(c.engine().counters().writes >= 1);
    if (!same) CHECK(c.engine().counters().dummy_writes == before + 1);
}

TEST_CASE("dummy and real writes look the same to the server") {
    RecordingStore sa, sb;
    OramConfig cfg = small();
    auto geo = Geometry::derive(cfg);
    LocalDirectory da(PosMapMode::Plain, cfg.n, geo.partitions, crypto::Key128{});
    LocalDirectory db(PosMapMode::Plain, cfg.n, geo.partitions, crypto::Key128{});
    partition::EngineParams ep;
    ep.geo = geo;
    ep.payload_bytes = 16;
    ep.accounted_payload = 16;
    partition::Engine a(ep, sa, da), b(ep, sb, db);
    Rng ra(5), rb(5);
    a.setup(ra);
    b.setup(rb);
    for (int i = 0; i < 60; ++i) {
        a.write(1, partition::Entry{});
        if (i < 30)
            b.write(1, partition::Entry{static_cast<BlockId>(i), Payload(16, 1)});
        else
            b.write(1, partition::Entry{});
        if (i % 7 == 0) {
            a.write(1, partition::Entry{});
            b.write(1, partition::Entry{});
        }
    }
    REQUIRE(sa.uploads.size() == sb.uploads.size());
    for (std::size_t i = 0; i < sa.uploads.size(); ++i) {
        CHECK(sa.uploads[i].level == sb.uploads[i].level);
        CHECK(sa.uploads[i].total == sb.uploads[i].total);
    }
    REQUIRE(sa.fetches.size() == sb.fetches.size());
    for (std::size_t i = 0; i < sa.fetches.size(); ++i)
        CHECK(sa.fetches[i].size() == sb.fetches[i].size());
    CHECK(sa.stats().same_counters(sb.stats()));
    CHECK(sa.meta_fetches == sb.meta_fetches);
}

TEST_CASE("bounded geometric law") {
    Rng rng(2);
    BoundedGeometric zero(0);
    for (int i = 0; i < 1000; ++i) CHECK(zero.sample(rng) == 0);
    for (double nu : {0.5, 1.0, 2.0, 4.0}) {
        CAPTURE(nu);
        BoundedGeometric d(nu);
        CHECK(d.max_value() == std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(4 * nu))));
        CHECK(d.mean() == doctest::Approx(nu).epsilon(1e-9));
        const auto& pmf = d.pmf();
        for (std::size_t k = 1; k < pmf.size(); ++k)
            CHECK(pmf[k] / pmf[k - 1] == doctest::Approx(d.ratio()));
        double sum = 0;
        const int draws = 1000000;
        for (int i = 0; i < draws; ++i) sum += d.sample(rng);
        CHECK(sum / draws == doctest::Approx(nu).epsilon(0.01));
    }
}

TEST_CASE("sequential eviction wraps around the partitions") {
    Evictor e(EvictAlgo::Sequential, 1.0, 8, Rng(3));
    std::vector<std::uint32_t> out;
    std::uint64_t total = 0;
    for (int i = 0; i < 100; ++i) {
        auto before = out.size();
        e.next(out);
        total += out.size() - before;
    }
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i % 8);
    CHECK(e.ecnt() == total % 8);
    Evictor none(EvictAlgo::Sequential, 0.0, 8, Rng(3));
    std::vector<std::uint32_t> empty;
    for (int i = 0; i < 100; ++i) none.next(empty);
    CHECK(empty.empty());
}

TEST_CASE("random eviction draws nu uniform slots per access") {
    Evictor e(EvictAlgo::Random, 2.0, 16, Rng(4));
    std::vector<std::uint64_t> hist(16, 0);
    for (int i = 0; i < 500000; ++i) {
        std::vector<std::uint32_t> out;
        e.next(out);
        REQUIRE(out.size() == 2);
        for (auto s : out) ++hist[s];
    }
    CHECK(sim::chi_square_uniform(hist).p_value > 0.001);
}

TEST_CASE("partitions read by accesses are iid uniform") {
    auto cfg = small(256);
    cfg.payload_mode = PayloadMode::MetadataOnly;
    OramClient c(cfg, mem());
    std::vector<TraceEvent> trace;
    c.set_trace(&trace);
    for (int i = 0; i < 40000; ++i) c.read(static_cast<BlockId>(i % 256));
    std::vector<std::uint32_t> reads;
    for (const auto& e : trace)
        if (e.kind == TraceEvent::Kind::Read) reads.push_back(e.p);
    REQUIRE(reads.size() == 40000);
    const std::uint32_t P = c.geometry().partitions;
    std::vector<std::uint64_t> marg(P, 0), pairs(P * P, 0);
    for (std::size_t i = 0; i < reads.size(); ++i) {
        ++marg[reads[i]];
        if (i > 0) ++pairs[reads[i - 1] * P + reads[i]];
    }
    CHECK(sim::chi_square_uniform(marg).p_value > 0.001);
    CHECK(sim::chi_square_uniform(pairs).p_value > 0.001);
}
