// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "framework/client.hpp"
#include "recursion/stack.hpp"
#include "simulator/workload.hpp"

namespace partoram::sim {

struct RunOptions {
    std::vector<framework::TraceEvent>* trace = nullptr;
    bool record_steps = false;
    // Store per stack level; memory backend when empty.
    recursion::StoreFactory make_store;
    std::function<void(std::uint64_t done, std::uint64_t total)> progress;
};

struct ExperimentResult {
    OramConfig config;
    Workload workload;
    Geometry geometry;
    std::uint64_t ops = 0;
    std::uint32_t depth = 0;
    std::uint64_t blocks_up = 0;
    std::uint64_t blocks_down = 0;
    std::uint64_t bytes_up = 0;
    std::uint64_t bytes_down = 0;
    std::uint64_t meta_bytes = 0;
    double overhead = 0;  // blocks transferred per access, all stack levels
    std::uint64_t cache_peak = 0;
    std::uint64_t cache_peak_sum = 0;  // over stack levels
    std::uint64_t client_peak = 0;
    std::uint64_t max_load = 0;
    std::uint64_t peak_server_blocks = 0;
    std::uint64_t forced_reshuffles = 0;
    std::uint64_t max_step_work = 0;
    std::uint64_t step_budget = 0;
    std::uint64_t max_job_latency = 0;
    std::uint64_t latency_violations = 0;
    std::uint64_t fallbacks = 0;
    double wall_seconds = 0;
    recursion::StackReport stack;
    std::vector<std::uint32_t> per_step_work;
};

ExperimentResult run_experiment(const OramConfig& cfg, const Workload& w,
                                 const RunOptions& opts = {});

std::string csv_header(bool timing);
std::string csv_row(const ExperimentResult& r, bool timing);
// Six significant digits, as used in every CSV float column.
std::string fmt6(double v);

struct OracleResult {
    bool ok = true;
    std::uint64_t ops = 0;
    std::int64_t divergence_op = -1;
    BlockId id = kDummy;
    std::string detail;
};

// Replays the workload against the ORAM and a plain dictionary, comparing
// every returned payload. `fault_at` >= 0 drops the position-map update of
// that operation (harness self-test).
OracleResult run_oracle(const OramConfig& cfg, const Workload& w, std::int64_t fault_at = -1,
                        const RunOptions& opts = {});

}  // namespace partoram::sim
