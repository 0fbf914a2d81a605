// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "crypto/prf.hpp"

namespace partoram::crypto {

// Small-domain permutation on [0, d): a 4-round balanced Feistel network over
// an even number of bits >= ceil(log2 d), restricted to [0, d) by cycle-walking.
class Prp {
public:
    Prp() = default;
    Prp(const Key128& key, std::uint64_t domain);

    std::uint64_t apply(std::uint64_t i) const;
    std::uint64_t invert(std::uint64_t j) const;
    std::uint64_t domain() const { return domain_; }

private:
    std::uint64_t encrypt_once(std::uint64_t x) const;
    std::uint64_t decrypt_once(std::uint64_t x) const;
    std::uint64_t round(unsigned r, std::uint64_t half) const;

    Key128 key_{};
    std::uint64_t domain_ = 0;
    unsigned half_bits_ = 0;
    std::uint64_t half_mask_ = 0;
};

inline constexpr unsigned kFeistelRounds = 4;

std::uint64_t prp_apply(const Key128& key, std::uint64_t domain, std::uint64_t i);
std::uint64_t prp_invert(const Key128& key, std::uint64_t domain, std::uint64_t j);

}  // namespace partoram::crypto
