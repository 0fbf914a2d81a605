// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <unordered_set>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "crypto/prf.hpp"
#include "crypto/prp.hpp"
#include "crypto/seal.hpp"
#include "doctest.h"
#include "simulator/stats_math.hpp"

using namespace partoram;
using namespace partoram::crypto;

namespace {

Key128 key_from(Rng& rng) {
    Key128 k{};
    for (auto& b : k) b = static_cast<std::uint8_t>(rng());
    return k;
}

bool is_bijection(const Prp& prp) {
    std::vector<char> seen(prp.domain(), 0);
    for (std::uint64_t i = 0; i < prp.domain(); ++i) {
        auto j = prp.apply(i);
        if (j >= prp.domain() || seen[j]) return false;
        seen[j] = 1;
        if (prp.invert(j) != i) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("prp on tiny domains") {
    Rng rng(1);
    auto k = key_from(rng);
    CHECK(prp_apply(k, 1, 0) == 0);
    CHECK(prp_invert(k, 1, 0) == 0);
    Prp p8(k, 8);
    std::vector<std::uint64_t> img;
    for (std::uint64_t i = 0; i < 8; ++i) img.push_back(p8.apply(i));
    std::sort(img.begin(), img.end());
    std::vector<std::uint64_t> want(8);
    std::iota(want.begin(), want.end(), 0);
    CHECK(img == want);
    CHECK_THROWS_AS(p8.apply(8), DomainError);
    CHECK_THROWS_AS(p8.invert(9), DomainError);
    CHECK_THROWS_AS(Prp(k, 0), DomainError);
}

TEST_CASE("prp is a bijection on every level size") {
    Rng rng(2);
    bool ok = true;
    for (unsigned l = 0; l <= 10; ++l)
        for (int t = 0; t < 100; ++t) ok = ok && is_bijection(Prp(key_from(rng), 2u << l));
    CHECK(ok);
}

TEST_CASE("prp is a bijection on non-power-of-two domains") {
    Rng rng(3);
    bool ok = true;
    for (std::uint64_t d : {3u, 5u, 7u, 100u, 257u, 1000u, 2432u, 4095u})
        for (int t = 0; t < 10; ++t) ok = ok && is_bijection(Prp(key_from(rng), d));
    CHECK(ok);
}

TEST_CASE("prp depends on the key") {
    Rng rng(4);
    Prp a(key_from(rng), 1024), b(key_from(rng), 1024);
    int same = 0;
    for (std::uint64_t i = 0; i < 1024; ++i) same += a.apply(i) == b.apply(i);
    CHECK(same < 20);
}

TEST_CASE("prf is deterministic and separates labels") {
    Rng rng(5);
    auto k = key_from(rng);
    CHECK(prf(k, "slot", {1, 2}) == prf(k, "slot", {1, 2}));
    CHECK(prf(k, "slot", {1, 2}) != prf(k, "other", {1, 2}));
    CHECK(prf(k, "slot", {1, 2}) != prf(k, "slot", {2, 1}));
}

TEST_CASE("prf outputs for one-bit input changes rarely collide") {
    Rng rng(6);
    auto k = key_from(rng);
    int collisions = 0;
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
        std::uint64_t x = rng();
        std::uint64_t y = x ^ (std::uint64_t{1} << (s % 64));
        collisions += prf(k, "t", {x}) == prf(k, "t", {y});
    }
    CHECK(static_cast<double>(collisions) / samples < 1e-3);
}

TEST_CASE("prf slot choice is uniform over 256 partitions") {
    Rng rng(7);
    auto k = key_from(rng);
    std::vector<std::uint64_t> bins(256, 0);
    for (std::uint64_t id = 0; id < 10000; ++id)
        for (std::uint64_t j = 0; j < 100; ++j) ++bins[prf(k, "slot", {id, j}) % 256];
    CHECK(sim::chi_square_uniform(bins).p_value > 0.001);
}

TEST_CASE("sealing round trips and rejects tampering") {
    for (auto mode : {CipherMode::Aead, CipherMode::Test}) {
        CAPTURE(to_string(mode));
        Sealer s(mode, 9);
        auto key = s.fresh_key();
        Payload payload(32);
        std::iota(payload.begin(), payload.end(), 1);
        auto cb = s.seal_block(key, 5, 42, payload);
        CHECK(cb.size() == sealed_block_size(32));
        auto b = s.open_block(key, 5, cb);
        CHECK(b.id == 42);
        CHECK(b.payload == payload);

        for (std::size_t bit = 0; bit < cb.size() * 8; bit += 7) {
            auto bad = cb;
            bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            CHECK_THROWS_AS(s.open_block(key, 5, bad), IntegrityViolation);
        }
        CHECK_THROWS_AS(s.open_block(key, 6, cb), IntegrityViolation);
        auto next_epoch = s.fresh_key();
        CHECK_THROWS_AS(s.open_block(next_epoch, 5, cb), IntegrityViolation);
        CHECK_THROWS_AS(s.open_block(key, 5, CipherBlock(cb.begin(), cb.begin() + 10)),
                        IntegrityViolation);

        auto again = s.seal_block(key, 5, 42, payload);
        CHECK(again != cb);
        CHECK(s.open_block(key, 5, again).payload == payload);

        LevelKey bare;
        bare.master = key.master;
        CHECK(s.open_block(bare, 5, cb).payload == payload);
        CHECK(s.open_block(key, 5, s.seal_block(bare, 5, 42, payload)).id == 42);
        auto plain = s.fresh_key(false);
        CHECK_FALSE(plain.derived);
        CHECK(s.open_block(plain, 1, s.seal_block(plain, 1, 7, payload)).id == 7);
    }
}

TEST_CASE("metadata seals at the reserved index") {
    Sealer s(CipherMode::Aead, 10);
    auto key = s.fresh_key();
    std::vector<std::uint8_t> meta(kMetaEntryBytes * 4, 0xAB);
    auto sealed = s.seal(key, kMetaIndex, meta);
    CHECK(sealed.size() == sealed_meta_size(4));
    CHECK(s.open(key, kMetaIndex, sealed) == meta);
    CHECK_THROWS_AS(s.open(key, 0, sealed), IntegrityViolation);
}

TEST_CASE("real and dummy ciphertexts have indistinguishable byte histograms") {
    Sealer s(CipherMode::Aead, 11);
    auto key = s.fresh_key();
    std::vector<std::uint64_t> real(256, 0), dummy(256, 0);
    Payload payload(64);
    Payload zeros(64, 0);
    for (int i = 0; i < 4000; ++i) {
        for (auto& b : payload) b = static_cast<std::uint8_t>(i * 31 + (&b - payload.data()));
        for (auto b : s.seal_block(key, i, static_cast<BlockId>(i), payload)) ++real[b];
        for (auto b : s.seal_block(key, i, kDummy, zeros)) ++dummy[b];
    }
    CHECK(sim::chi_square_uniform(real).p_value > 0.001);
    CHECK(sim::chi_square_uniform(dummy).p_value > 0.001);
    CHECK(sim::chi_square_two_sample(real, dummy).p_value > 0.001);
}
