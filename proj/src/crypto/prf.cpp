// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "crypto/prf.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <vector>

#include "core/error.hpp"

namespace partoram::crypto {

void ensure_init() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw InternalError("libsodium initialization failed");
    });
}

namespace {

void put_le(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le(const std::uint8_t* in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{in[i]} << (8 * i);
    return v;
}

}  // namespace

std::uint64_t prf(const Key128& key, std::string_view label,
                  std::initializer_list<std::uint64_t> inputs) {
    std::uint8_t stack[128];
    std::vector<std::uint8_t> heap;
    std::size_t len = 1 + label.size() + 8 * inputs.size();
    std::uint8_t* buf = stack;
    if (len > sizeof(stack)) {
        heap.resize(len);
        buf = heap.data();
    }
    buf[0] = static_cast<std::uint8_t>(label.size());
    std::memcpy(buf + 1, label.data(), label.size());
    std::size_t off = 1 + label.size();
    for (auto v : inputs) {
        put_le(buf + off, v);
        off += 8;
    }
    std::uint8_t out[crypto_shorthash_BYTES];
    crypto_shorthash(out, buf, len, key.data());
    return get_le(out);
}

std::uint64_t prf2(const Key128& key, std::uint64_t a, std::uint64_t b) {
    std::uint8_t buf[16];
    put_le(buf, a);
    put_le(buf + 8, b);
    std::uint8_t out[crypto_shorthash_BYTES];
    crypto_shorthash(out, buf, sizeof(buf), key.data());
    return get_le(out);
}

Key128 random_key() {
    ensure_init();
    Key128 k;
    randombytes_buf(k.data(), k.size());
    return k;
}

}  // namespace partoram::crypto
