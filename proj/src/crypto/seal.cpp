// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "crypto/seal.hpp"

#include <sodium.h>

#include <cstring>

#include "core/error.hpp"

namespace partoram::crypto {

namespace {

void put_le64(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le64(const std::uint8_t* in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[i]} << (8 * i);
    return v;
}

std::array<std::uint8_t, 32> derive_aead(const Key128& master) {
    std::array<std::uint8_t, 32> out;
    static const char ctx[] = "partoram-aead";
    crypto_generichash(out.data(), out.size(), reinterpret_cast<const unsigned char*>(ctx),
                       sizeof(ctx) - 1, master.data(), master.size());
    return out;
}

Key128 derive_mac(const Key128& master, std::uint8_t which) {
    Key128 out;
    std::uint8_t ctx[] = {'m', 'a', 'c', which};
    crypto_generichash(out.data(), out.size(), ctx, sizeof(ctx), master.data(), master.size());
    return out;
}

std::array<std::uint8_t, 32> aead_key(const LevelKey& key) {
    return key.derived ? key.aead : derive_aead(key.master);
}

Key128 mac_key(const LevelKey& key, std::uint8_t which) {
    return key.derived ? key.mac[which] : derive_mac(key.master, which);
}

// Test-mode tag: two SipHash lanes over index || nonce || body.
void checksum_tag(const LevelKey& key, std::int64_t index, const std::uint8_t* nonce,
                  const std::uint8_t* body, std::size_t len, std::uint8_t* tag) {
    std::vector<std::uint8_t> msg(8 + kNonceBytes + len);
    put_le64(msg.data(), static_cast<std::uint64_t>(index));
    std::memcpy(msg.data() + 8, nonce, kNonceBytes);
    if (len) std::memcpy(msg.data() + 8 + kNonceBytes, body, len);
    for (std::uint8_t lane = 0; lane < 2; ++lane) {
        auto k = mac_key(key, lane);
        crypto_shorthash(tag + 8 * lane, msg.data(), msg.size(), k.data());
    }
}

}  // namespace

Sealer::Sealer(CipherMode mode, std::uint64_t seed)
    : mode_(mode), rng_(derive_rng(seed, streams::kKeys)) {
    ensure_init();
}

void Sealer::fill_random(std::uint8_t* out, std::size_t n) {
    if (mode_ == CipherMode::Aead) {
        randombytes_buf(out, n);
        return;
    }
    while (n > 0) {
        std::uint64_t v = rng_();
        std::size_t take = n < 8 ? n : 8;
        for (std::size_t i = 0; i < take; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
        out += take;
        n -= take;
    }
}

LevelKey Sealer::fresh_key(bool subkeys) {
    LevelKey k;
    fill_random(k.master.data(), k.master.size());
    if (!subkeys) return k;
    if (mode_ == CipherMode::Aead) {
        k.aead = derive_aead(k.master);
    } else {
        k.mac[0] = derive_mac(k.master, 0);
        k.mac[1] = derive_mac(k.master, 1);
    }
    k.derived = true;
    return k;
}

CipherBlock Sealer::seal(const LevelKey& key, std::int64_t index,
                         std::span<const std::uint8_t> plaintext) {
    CipherBlock out(kNonceBytes + plaintext.size() + kTagBytes);
    std::uint8_t* nonce = out.data();
    fill_random(nonce, kNonceBytes);
    std::uint8_t* body = out.data() + kNonceBytes;
    if (mode_ == CipherMode::Aead) {
        auto k = aead_key(key);
        std::uint8_t ad[8];
        put_le64(ad, static_cast<std::uint64_t>(index));
        unsigned long long clen = 0;
        crypto_aead_chacha20poly1305_ietf_encrypt(body, &clen, plaintext.data(), plaintext.size(),
                                                  ad, sizeof(ad), nullptr, nonce, k.data());
        PARTORAM_CHECK(clen == plaintext.size() + kTagBytes, "unexpected ciphertext length");
    } else {
        if (!plaintext.empty()) std::memcpy(body, plaintext.data(), plaintext.size());
        checksum_tag(key, index, nonce, body, plaintext.size(), body + plaintext.size());
    }
    return out;
}

std::vector<std::uint8_t> Sealer::open(const LevelKey& key, std::int64_t index,
                                       std::span<const std::uint8_t> sealed) const {
    if (sealed.size() < kNonceBytes + kTagBytes)
        throw IntegrityViolation("sealed message too short");
    const std::uint8_t* nonce = sealed.data();
    const std::uint8_t* body = sealed.data() + kNonceBytes;
    std::size_t plen = sealed.size() - kNonceBytes - kTagBytes;
    std::vector<std::uint8_t> out(plen);
    if (mode_ == CipherMode::Aead) {
        auto k = aead_key(key);
        std::uint8_t ad[8];
        put_le64(ad, static_cast<std::uint64_t>(index));
        unsigned long long mlen = 0;
        if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &mlen, nullptr, body,
                                                      plen + kTagBytes, ad, sizeof(ad), nonce,
                                                      k.data()) != 0)
            throw IntegrityViolation("authentication tag mismatch at index " +
                                     std::to_string(index));
    } else {
        std::uint8_t tag[kTagBytes];
        checksum_tag(key, index, nonce, body, plen, tag);
        if (sodium_memcmp(tag, body + plen, kTagBytes) != 0)
            throw IntegrityViolation("checksum mismatch at index " + std::to_string(index));
        if (plen) std::memcpy(out.data(), body, plen);
    }
    return out;
}

CipherBlock Sealer::seal_block(const LevelKey& key, std::int64_t index, BlockId id,
                               std::span<const std::uint8_t> payload) {
    std::vector<std::uint8_t> pt(kIdBytes + payload.size());
    put_le64(pt.data(), id);
    if (!payload.empty()) std::memcpy(pt.data() + kIdBytes, payload.data(), payload.size());
    auto out = seal(key, index, pt);
    sodium_memzero(pt.data(), pt.size());
    return out;
}

Block Sealer::open_block(const LevelKey& key, std::int64_t index,
                         std::span<const std::uint8_t> sealed) const {
    auto pt = open(key, index, sealed);
    if (pt.size() < kIdBytes) throw IntegrityViolation("sealed block too short");
    Block b;
    b.id = get_le64(pt.data());
    b.payload.assign(pt.begin() + kIdBytes, pt.end());
    return b;
}

}  // namespace partoram::crypto
