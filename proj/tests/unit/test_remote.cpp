// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"
#include "doctest.h"
#include "framework/client.hpp"
#include "remote/frame.hpp"
#include "remote/server.hpp"
#include "support.hpp"

using namespace partoram;
using namespace partoram::remote;

namespace {

// Flips one byte of every fetched block once armed.
class TamperStore final : public store::BlockStore {
public:
    TamperStore() : inner_(store::make_memory_store()) {}
    void setup(const store::StoreSetup& s) override { inner_->setup(s); }
    std::vector<store::CipherBlock> fetch_blocks(
        const std::vector<store::FetchRequest>& reqs) override {
        auto out = inner_->fetch_blocks(reqs);
        if (armed)
            for (auto& b : out)
                if (!b.empty()) b[b.size() / 2] ^= 0x01;
        return out;
    }
    void store_level(const store::LevelUpload& up) override { inner_->store_level(up); }
    store::Bytes fetch_meta(const store::LevelRef& r) override { return inner_->fetch_meta(r); }
    void mark_unfilled(const store::LevelRef& r) override { inner_->mark_unfilled(r); }
    store::TransferStats stats() override { return inner_->stats(); }
    bool armed = false;

private:
    std::unique_ptr<store::BlockStore> inner_;
};

struct Running {
    explicit Running(std::shared_ptr<store::BlockStore> backend)
        : server(std::move(backend)) {
        server.bind("127.0.0.1:0");
        server.start();
        addr = "127.0.0.1:" + std::to_string(server.port());
    }
    ~Running() { server.stop(); }
    Server server;
    std::string addr;
};

store::StoreSetup small_setup() {
    store::StoreSetup s;
    s.partitions = 2;
    s.level_sizes = {2, 4, 8};
    s.sealed_bytes = 48;
    s.stored_bytes = 16;
    s.compressed_elems = 3;
    s.initial_fill = {0b010, 0b000};
    return s;
}

OramConfig small(std::uint64_t n) {
    OramConfig c;
    c.n = n;
    c.block_size = 32;
    c.seed = 5;
    return c;
}

}  // namespace

TEST_CASE("frame codecs round trip") {
    Frame f{kFetchBlocks, {1, 2, 3, 250}};
    auto wire = encode_frame(f);
    REQUIRE(wire.size() == kHeaderBytes + 4);
    CHECK(wire[0] == 0);
    CHECK(wire[3] == 4);
    CHECK(wire[4] == kFetchBlocks);

    auto s = small_setup();
    s.delete_on_read = true;
    auto s2 = decode_setup(encode_setup(s));
    CHECK(s2.partitions == s.partitions);
    CHECK(s2.level_sizes == s.level_sizes);
    CHECK(s2.sealed_bytes == s.sealed_bytes);
    CHECK(s2.stored_bytes == s.stored_bytes);
    CHECK(s2.compressed_elems == s.compressed_elems);
    CHECK(s2.delete_on_read);
    CHECK(s2.initial_fill == s.initial_fill);

    std::vector<store::FetchRequest> reqs{{{1, 2, 7}, 5}, {{0, 0, 1}, 0}};
    auto r2 = decode_fetch(encode_fetch(reqs));
    REQUIRE(r2.size() == 2);
    CHECK(r2[0].ref.p == 1);
    CHECK(r2[0].ref.level == 2);
    CHECK(r2[0].ref.epoch == 7);
    CHECK(r2[0].offset == 5);

    std::vector<store::CipherBlock> blocks{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
    CHECK(decode_blocks(encode_blocks(blocks)) == blocks);

    store::LevelUpload up;
    up.ref = {1, 1, 3};
    up.level_size = 4;
    up.first = 2;
    up.total = 4;
    up.compressed = true;
    up.items = {{1, 2}, {3, 4}};
    up.meta = store::Bytes{7, 7};
    auto up2 = decode_store(encode_store(up));
    CHECK(up2.ref.epoch == 3);
    CHECK(up2.first == 2);
    CHECK(up2.compressed);
    CHECK(up2.items == up.items);
    CHECK(up2.meta == up.meta);

    store::TransferStats t;
    t.blocks_up = 10;
    t.bytes_down = 1u << 20;
    t.peak_server_blocks = 99;
    t.fetch_batches = 4;
    CHECK(decode_stats(encode_stats(t)).same_counters(t));

    CHECK(decode_meta(encode_meta({4, 5, 6})) == store::Bytes{4, 5, 6});
}

TEST_CASE("malformed bodies and endpoints are rejected") {
    auto body = encode_fetch({{{1, 2, 7}, 5}});
    body.pop_back();
    CHECK_THROWS_AS(decode_fetch(body), ProtocolError);
    auto setup = encode_setup(small_setup());
    setup[0] = kProtocolVersion + 1;
    try {
        decode_setup(setup);
        FAIL("version mismatch accepted");
    } catch (const ProtocolError& e) {
        CHECK(e.reason() == ProtocolError::VersionMismatch);
    }
    CHECK(parse_endpoint("localhost:80").port == 80);
    CHECK_THROWS(parse_endpoint("nohost"));
    CHECK_THROWS(parse_endpoint("h:70000"));
}

TEST_CASE("server dispatches contract calls and reports errors in frames") {
    Server server(store::make_memory_store());
    auto reply = server.handle(Frame{kSetup, encode_setup(small_setup())});
    CHECK(reply.opcode == (kSetup | kReplyBit));

    reply = server.handle(Frame{kFetchBlocks, encode_fetch({})});
    CHECK(decode_blocks(reply.body).empty());

    reply = server.handle(Frame{kFetchBlocks, encode_fetch({{{0, 0, 0}, 0}})});
    REQUIRE(reply.opcode == kError);
    CHECK(reply.body.at(0) == ProtocolError::UnfilledLevel);
    try {
        raise_error_frame(reply);
        FAIL("error frame did not raise");
    } catch (const ProtocolError& e) {
        CHECK(e.reason() == ProtocolError::UnfilledLevel);
    }

    reply = server.handle(Frame{kFetchBlocks, encode_fetch({{{0, 1, 0}, 3}})});
    REQUIRE(reply.opcode == (kFetchBlocks | kReplyBit));
    CHECK(decode_blocks(reply.body) == std::vector<store::CipherBlock>{store::Bytes(16, 0)});

    reply = server.handle(Frame{0x33, {}});
    CHECK(reply.opcode == kError);
    CHECK(reply.body.at(0) == ProtocolError::Malformed);
}

TEST_CASE("remote store over loopback matches the memory store") {
    Running run(store::make_memory_store());
    auto remote = std::make_shared<RemoteStore>(run.addr);
    CHECK(remote->fetch_blocks({}).empty());
    try {
        remote->fetch_blocks({{{0, 0, 0}, 0}});
        FAIL("fetch before setup accepted");
    } catch (const ProtocolError& e) {
        CHECK(e.reason() == ProtocolError::NotSetUp);
    }

    auto cfg = small(256);
    framework::OramClient a(cfg, remote);
    framework::OramClient b(cfg, std::shared_ptr<store::BlockStore>(store::make_memory_store()));
    Rng rng(12);
    std::map<BlockId, Payload> ref;
    for (int i = 0; i < 2000; ++i) {
        BlockId id = uniform_below(rng, cfg.n);
        Payload d(32, static_cast<std::uint8_t>(i));
        bool write = uniform_below(rng, 2) == 1;
        auto ra = a.access(write ? Op::Write : Op::Read, id, write ? &d : nullptr);
        auto rb = b.access(write ? Op::Write : Op::Read, id, write ? &d : nullptr);
        REQUIRE(ra == rb);
    }
    CHECK(a.stats().transfer.same_counters(b.stats().transfer));
}

TEST_CASE("each fetch batch is one frame") {
    Running run(store::make_memory_store());
    auto remote = std::make_shared<RemoteStore>(run.addr);
    auto local = std::make_shared<RecordingStore>();
    auto cfg = small(1024);
    framework::OramClient a(cfg, remote), b(cfg, local);
    remote->clear_log();
    local->fetches.clear();
    const int ops = 500;
    for (int i = 0; i < ops; ++i) {
        a.access(Op::Read, static_cast<BlockId>(i * 7 % 1024));
        b.access(Op::Read, static_cast<BlockId>(i * 7 % 1024));
    }
    std::size_t fetch_frames = 0;
    for (const auto& f : remote->sent())
        if (f.opcode == kFetchBlocks) ++fetch_frames;
    CHECK(fetch_frames == local->fetches.size());
    CHECK(fetch_frames >= ops);
    CHECK(a.stats().engine.reads == ops);
}

TEST_CASE("tampered blocks from the server raise an integrity violation") {
    auto backend = std::make_shared<TamperStore>();
    Running run(backend);
    auto cfg = small(256);
    framework::OramClient c(cfg, std::make_shared<RemoteStore>(run.addr));
    Payload d(32, 0x5a);
    for (BlockId i = 0; i < 256; ++i) c.access(Op::Write, i, &d);
    backend->armed = true;
    bool raised = false;
    for (BlockId i = 0; i < 64 && !raised; ++i) {
        try {
            c.access(Op::Read, i);
        } catch (const IntegrityViolation&) {
            raised = true;
        }
    }
    CHECK(raised);
}

TEST_CASE("a lost connection surfaces as a transport error") {
    CHECK_THROWS_AS(RemoteStore("127.0.0.1:1"), TransportError);
    auto run = std::make_unique<Running>(store::make_memory_store());
    RemoteStore remote(run->addr);
    remote.setup(small_setup());
    run.reset();
    CHECK_THROWS_AS(remote.stats(), TransportError);
}
