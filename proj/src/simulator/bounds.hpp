// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "simulator/experiment.hpp"

namespace partoram::sim {

struct BoundParams {
    double k = 1.0;
    double c = 2.0;
};

// sqrt(N) + 4 sqrt(k + c) N^(1/4) sqrt(ln N)
double cache_bound(std::uint64_t n, const BoundParams& b);
// sqrt(N) + (k + c) ln N
double partition_bound(std::uint64_t n, const BoundParams& b);
// 1.15 sqrt(N)
double empirical_partition_bound(std::uint64_t n);

// One cache slot as a queue: each step adds a block w.p. p and evicts one
// (if any) w.p. q, independently: X' = max(X + A - E, 0).
struct MarkovResult {
    double p = 0;
    double q = 0;
    double rho = 0;
    std::uint64_t steps = 0;
    std::vector<double> empirical;
    std::vector<double> theory;  // rho^i (1 - rho)
    double tv = 0;
    double mean_empirical = 0;
    double mean_theory = 0;  // rho / (1 - rho)
    double mean_rel_error = 0;
};

MarkovResult markov_slot_chain(double p, double q, std::uint64_t steps, std::uint64_t seed);

struct BoundsReport {
    BoundParams params;
    std::uint64_t n = 0;
    MarkovResult markov;
    bool markov_ok = false;  // TV < 0.02 and mean within 5%
    std::uint64_t cache_peak = 0;
    double cache_limit = 0;
    bool cache_ok = false;
    std::uint64_t max_load = 0;
    double load_limit_analytic = 0;
    double load_limit_empirical = 0;
    bool load_analytic_ok = false;
    bool load_empirical_ok = false;
    std::uint64_t max_latency = 0;
    std::uint64_t tau = 0;
    std::uint64_t max_step_work = 0;
    std::uint64_t budget = 0;
    bool latency_ok = false;
    bool budget_ok = false;

    bool all_ok() const;
    std::string to_json() const;
};

// (a) single-slot chain at p = 1/P, q = nu/P; (b) cache high-water; (c) partition
// loads; (d) job latency and per-step work of a concurrent run.
BoundsReport validate_bounds(const OramConfig& cfg, const BoundParams& b, const Workload& w,
                             std::uint64_t markov_steps);

}  // namespace partoram::sim
