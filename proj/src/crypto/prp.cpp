// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "crypto/prp.hpp"

#include "core/error.hpp"

namespace partoram::crypto {

Prp::Prp(const Key128& key, std::uint64_t domain) : key_(key), domain_(domain) {
    if (domain == 0) throw DomainError("permutation domain must be positive");
    unsigned bits = 0;
    while ((std::uint64_t{1} << bits) < domain) ++bits;
    half_bits_ = (bits + 1) / 2;
    half_mask_ = half_bits_ == 0 ? 0 : ((std::uint64_t{1} << half_bits_) - 1);
}

std::uint64_t Prp::round(unsigned r, std::uint64_t half) const {
    return prf2(key_, (std::uint64_t{r} << 56) | domain_, half) & half_mask_;
}

std::uint64_t Prp::encrypt_once(std::uint64_t x) const {
    std::uint64_t l = x >> half_bits_;
    std::uint64_t r = x & half_mask_;
    for (unsigned i = 0; i < kFeistelRounds; ++i) {
        std::uint64_t nl = r;
        r = l ^ round(i, r);
        l = nl;
    }
    return (l << half_bits_) | r;
}

std::uint64_t Prp::decrypt_once(std::uint64_t x) const {
    std::uint64_t l = x >> half_bits_;
    std::uint64_t r = x & half_mask_;
    for (unsigned i = kFeistelRounds; i-- > 0;) {
        std::uint64_t nr = l;
        l = r ^ round(i, l);
        r = nr;
    }
    return (l << half_bits_) | r;
}

std::uint64_t Prp::apply(std::uint64_t i) const {
    if (i >= domain_) throw DomainError("permutation input out of domain");
    if (half_bits_ == 0) return 0;
    std::uint64_t x = encrypt_once(i);
    while (x >= domain_) x = encrypt_once(x);
    return x;
}

std::uint64_t Prp::invert(std::uint64_t j) const {
    if (j >= domain_) throw DomainError("permutation input out of domain");
    if (half_bits_ == 0) return 0;
    std::uint64_t x = decrypt_once(j);
    while (x >= domain_) x = decrypt_once(x);
    return x;
}

std::uint64_t prp_apply(const Key128& key, std::uint64_t domain, std::uint64_t i) {
    return Prp(key, domain).apply(i);
}

std::uint64_t prp_invert(const Key128& key, std::uint64_t domain, std::uint64_t j) {
    return Prp(key, domain).invert(j);
}

}  // namespace partoram::crypto
