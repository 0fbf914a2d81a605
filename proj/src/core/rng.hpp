// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace partoram {

using Rng = std::mt19937_64;

// Independent stream for a (seed, purpose) pair.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6f72616du};
    return Rng(seq);
}

// Unbiased draw from [0, n) using Lemire's multiply-shift rejection.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t x = rng();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto l = static_cast<std::uint64_t>(m);
    if (l < n) {
        std::uint64_t t = (0 - n) % n;
        while (l < t) {
            x = rng();
            m = static_cast<__uint128_t>(x) * n;
            l = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace streams {
inline constexpr std::uint64_t kSlots = 1;
inline constexpr std::uint64_t kEviction = 2;
inline constexpr std::uint64_t kSetup = 3;
inline constexpr std::uint64_t kKeys = 4;
inline constexpr std::uint64_t kShuffle = 5;
inline constexpr std::uint64_t kWorkload = 6;
inline constexpr std::uint64_t kPrfKeys = 7;
}  // namespace streams

}  // namespace partoram
