// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace partoram::partition::codec {

using Bytes = std::vector<std::uint8_t>;
using Vec = std::vector<std::uint64_t>;

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;
inline constexpr std::size_t kBytesPerElem = 7;

std::uint64_t mul(std::uint64_t a, std::uint64_t b);
std::uint64_t add(std::uint64_t a, std::uint64_t b);
std::uint64_t sub(std::uint64_t a, std::uint64_t b);
std::uint64_t inv(std::uint64_t a);

std::size_t elems_for(std::size_t bytes);
Vec pack(const Bytes& row, std::size_t elems);
Bytes unpack(const Vec& elems, std::size_t bytes);

// Level upload compression over GF(2^61 - 1) with the 2k x k Vandermonde
// matrix M[r][c] = (r + 1)^c. `rows` has 2k entries; only the k rows listed
// in `positions` matter. Returns x (k vectors) with (M x)[r] = rows[r] for
// every r in positions.
std::vector<Vec> compress_upload(const std::vector<Bytes>& rows,
                                 const std::vector<std::uint32_t>& positions);

// Server side: y = M x for all 2k rows, each unpacked to `row_bytes` bytes.
std::vector<Bytes> decompress_upload(const std::vector<Vec>& x, std::size_t row_bytes);

// Fixed-width wire form of one vector: 8 bytes big-endian per element.
Bytes encode_vec(const Vec& v);
Vec decode_vec(const Bytes& b);

}  // namespace partoram::partition::codec
