// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace partoram::crypto {

using Key128 = std::array<std::uint8_t, 16>;

// Ensures libsodium is initialized; safe to call repeatedly.
void ensure_init();

// Keyed 64-bit PRF (SipHash-2-4) over a domain-separation label and integer inputs.
std::uint64_t prf(const Key128& key, std::string_view label,
                  std::initializer_list<std::uint64_t> inputs);

// Two-word fast path used by the permutation rounds.
std::uint64_t prf2(const Key128& key, std::uint64_t a, std::uint64_t b);

Key128 random_key();

}  // namespace partoram::crypto
