// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "core/config.hpp"
#include "core/rng.hpp"

namespace partoram::framework {

// Geometric law truncated to {0, ..., c}: Pr[num = k] proportional to ratio^k,
// with ratio fitted so the mean equals nu. c = max(1, ceil(4 nu)).
class BoundedGeometric {
public:
    explicit BoundedGeometric(double nu);

    std::uint32_t sample(Rng& rng) const;
    double mean() const;
    double ratio() const { return ratio_; }
    std::uint32_t max_value() const { return c_; }
    const std::vector<double>& pmf() const { return pmf_; }

private:
    std::uint32_t c_ = 1;
    double ratio_ = 0;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

// Chooses the partitions that background eviction writes to after an access.
class Evictor {
public:
    Evictor(EvictAlgo algo, double nu, std::uint32_t partitions, Rng rng);

    // Appends this access's eviction targets to `out`.
    void next(std::vector<std::uint32_t>& out);

    EvictAlgo algo() const { return algo_; }
    std::uint32_t ecnt() const { return ecnt_; }
    const BoundedGeometric& law() const { return law_; }

private:
    EvictAlgo algo_;
    double nu_;
    std::uint32_t partitions_;
    std::uint32_t ecnt_ = 0;
    BoundedGeometric law_;
    Rng rng_;
};

}  // namespace partoram::framework
