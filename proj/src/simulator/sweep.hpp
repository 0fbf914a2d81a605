// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "simulator/experiment.hpp"

namespace partoram::sim {

enum class SweepAxis { EvictionRate, ClientStorageK };

SweepAxis parse_axis(const std::string& s);
std::string to_string(SweepAxis a);
// "0.5,1,2,4" or "start:stop:step" (inclusive); empty string gives no points.
std::vector<double> parse_range(const std::string& s);

struct SweepResult {
    SweepAxis axis = SweepAxis::EvictionRate;
    std::vector<double> values;
    std::vector<double> k;  // client storage in units of sqrt(N) blocks
    std::vector<ExperimentResult> rows;
    // eviction-rate: cache peak nonincreasing (and strictly decreasing) in nu;
    // client-storage-k: overhead nonincreasing in k.
    bool monotone = true;
    bool strictly_monotone = true;
    std::string csv;
};

// Both axes vary the background eviction rate nu; the k axis reports each
// point's client storage and orders points by it.
SweepResult run_sweep(const OramConfig& base, const Workload& w, SweepAxis axis,
                      const std::vector<double>& values, bool timing);

}  // namespace partoram::sim
