// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "partition/codec.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace partoram::partition::codec {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    __uint128_t m = static_cast<__uint128_t>(a) * b;
    std::uint64_t lo = static_cast<std::uint64_t>(m) & kPrime;
    std::uint64_t hi = static_cast<std::uint64_t>(m >> 61);
    std::uint64_t r = lo + hi;
    if (r >= kPrime) r -= kPrime;
    return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = a + b;
    if (r >= kPrime) r -= kPrime;
    return r;
}

std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

std::uint64_t inv(std::uint64_t a) {
    if (a % kPrime == 0) throw InternalError("inverse of zero");
    std::uint64_t result = 1, base = a % kPrime, e = kPrime - 2;
    while (e) {
        if (e & 1) result = mul(result, base);
        base = mul(base, base);
        e >>= 1;
    }
    return result;
}

std::size_t elems_for(std::size_t bytes) { return (bytes + kBytesPerElem - 1) / kBytesPerElem; }

Vec pack(const Bytes& row, std::size_t elems) {
    Vec v(elems, 0);
    for (std::size_t i = 0; i < row.size(); ++i)
        v[i / kBytesPerElem] |= std::uint64_t{row[i]} << (8 * (i % kBytesPerElem));
    return v;
}

Bytes unpack(const Vec& elems, std::size_t bytes) {
    Bytes out(bytes, 0);
    for (std::size_t i = 0; i < bytes; ++i)
        out[i] = static_cast<std::uint8_t>(elems[i / kBytesPerElem] >> (8 * (i % kBytesPerElem)));
    return out;
}

namespace {

void batch_invert(std::vector<std::uint64_t>& v) {
    if (v.empty()) return;
    std::vector<std::uint64_t> prefix(v.size());
    std::uint64_t acc = 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        prefix[i] = acc;
        acc = mul(acc, v[i]);
    }
    std::uint64_t inv_acc = inv(acc);
    for (std::size_t i = v.size(); i-- > 0;) {
        std::uint64_t vi = v[i];
        v[i] = mul(inv_acc, prefix[i]);
        inv_acc = mul(inv_acc, vi);
    }
}

}  // namespace

std::vector<Vec> compress_upload(const std::vector<Bytes>& rows,
                                 const std::vector<std::uint32_t>& positions) {
    std::size_t k = positions.size();
    if (rows.size() != 2 * k) throw DomainError("compression needs exactly 2k rows for k positions");
    if (k == 0) return {};
    std::size_t row_bytes = rows[positions[0]].size();
    std::size_t cols = elems_for(row_bytes);
    std::vector<std::uint64_t> pts(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (positions[i] >= 2 * k) throw DomainError("position out of range");
        pts[i] = positions[i] + 1;
    }
    {
        auto sorted = pts;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DomainError("positions must be distinct");
    }
    // Inverses of a_j - a_{j-d} for every divided-difference step d.
    std::vector<std::uint64_t> denom;
    denom.reserve(k * (k - 1) / 2);
    for (std::size_t d = 1; d < k; ++d)
        for (std::size_t j = d; j < k; ++j) denom.push_back(sub(pts[j], pts[j - d]));
    batch_invert(denom);

    std::vector<Vec> x(k, Vec(cols, 0));
    std::vector<std::uint64_t> dd(k), coef(k);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto& row = rows[positions[i]];
            if (row.size() != row_bytes) throw DomainError("rows must have equal length");
            std::uint64_t e = 0;
            for (std::size_t b = 0; b < kBytesPerElem; ++b) {
                std::size_t idx = c * kBytesPerElem + b;
                if (idx < row_bytes) e |= std::uint64_t{row[idx]} << (8 * b);
            }
            dd[i] = e;
        }
        // Newton coefficients, computed in place from the highest index down.
        std::size_t di = 0;
        for (std::size_t d = 1; d < k; ++d) {
            std::size_t base = di;
            for (std::size_t j = k - 1; j >= d; --j) {
                dd[j] = mul(sub(dd[j], dd[j - 1]), denom[base + (j - d)]);
                if (j == d) break;
            }
            di += k - d;
        }
        // Newton form to monomial coefficients.
        std::fill(coef.begin(), coef.end(), 0);
        for (std::size_t i = k; i-- > 0;) {
            // coef <- coef * (t - pts[i]) + dd[i]
            for (std::size_t t = k - 1; t > 0; --t)
                coef[t] = sub(coef[t - 1], mul(coef[t], pts[i]));
            coef[0] = sub(0, mul(coef[0], pts[i]));
            coef[0] = add(coef[0], dd[i]);
        }
        for (std::size_t i = 0; i < k; ++i) x[i][c] = coef[i];
    }
    return x;
}

std::vector<Bytes> decompress_upload(const std::vector<Vec>& x, std::size_t row_bytes) {
    std::size_t k = x.size();
    if (k == 0) return {};
    std::size_t cols = x[0].size();
    std::vector<Bytes> out(2 * k);
    Vec y(cols);
    for (std::size_t r = 0; r < 2 * k; ++r) {
        std::uint64_t a = r + 1;
        std::fill(y.begin(), y.end(), 0);
        for (std::size_t i = k; i-- > 0;) {
            if (x[i].size() != cols) throw DomainError("ragged compressed upload");
            for (std::size_t c = 0; c < cols; ++c) y[c] = add(mul(y[c], a), x[i][c] % kPrime);
        }
        out[r] = unpack(y, row_bytes);
    }
    return out;
}

Bytes encode_vec(const Vec& v) {
    Bytes b(v.size() * 8);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (int j = 0; j < 8; ++j) b[i * 8 + j] = static_cast<std::uint8_t>(v[i] >> (56 - 8 * j));
    return b;
}

Vec decode_vec(const Bytes& b) {
    if (b.size() % 8 != 0) throw DomainError("encoded vector length must be a multiple of 8");
    Vec v(b.size() / 8, 0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (int j = 0; j < 8; ++j) v[i] = (v[i] << 8) | b[i * 8 + j];
    return v;
}

}  // namespace partoram::partition::codec
