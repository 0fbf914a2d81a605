// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "framework/eviction.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace partoram::framework {

namespace {

double truncated_mean(double q, std::uint32_t c) {
    double num = 0, den = 0, w = 1;
    for (std::uint32_t k = 0; k <= c; ++k) {
        num += k * w;
        den += w;
        w *= q;
    }
    return num / den;
}

}  // namespace

BoundedGeometric::BoundedGeometric(double nu) {
    if (!(nu >= 0) || !std::isfinite(nu)) throw ConfigError("eviction rate must be finite and >= 0");
    c_ = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(4 * nu)));
    if (nu > 0) {
        double lo = 0, hi = 1;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (truncated_mean(mid, c_) < nu ? lo : hi) = mid;
        }
        ratio_ = 0.5 * (lo + hi);
    }
    pmf_.resize(c_ + 1);
    double w = 1, total = 0;
    for (std::uint32_t k = 0; k <= c_; ++k) {
        pmf_[k] = w;
        total += w;
        w *= ratio_;
    }
    double acc = 0;
    cdf_.resize(c_ + 1);
    for (std::uint32_t k = 0; k <= c_; ++k) {
        pmf_[k] /= total;
        acc += pmf_[k];
        cdf_[k] = acc;
    }
    cdf_.back() = 1.0;
}

std::uint32_t BoundedGeometric::sample(Rng& rng) const {
    double u = uniform_unit(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), c_));
}

double BoundedGeometric::mean() const {
    double m = 0;
    for (std::uint32_t k = 0; k <= c_; ++k) m += k * pmf_[k];
    return m;
}

Evictor::Evictor(EvictAlgo algo, double nu, std::uint32_t partitions, Rng rng)
    : algo_(algo), nu_(nu), partitions_(partitions), law_(nu), rng_(std::move(rng)) {
    if (algo_ == EvictAlgo::Random && std::floor(nu_) != nu_)
        throw ConfigError("random eviction needs an integer rate");
}

void Evictor::next(std::vector<std::uint32_t>& out) {
    if (algo_ == EvictAlgo::Random) {
        auto count = static_cast<std::uint32_t>(nu_);
        for (std::uint32_t j = 0; j < count; ++j)
            out.push_back(static_cast<std::uint32_t>(uniform_below(rng_, partitions_)));
        return;
    }
    std::uint32_t num = nu_ > 0 ? law_.sample(rng_) : 0;
    for (std::uint32_t j = 0; j < num; ++j) {
        out.push_back(ecnt_);
        ecnt_ = (ecnt_ + 1) % partitions_;
    }
}

}  // namespace partoram::framework
