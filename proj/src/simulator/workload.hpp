// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace partoram::sim {

enum class WorkloadKind { RoundRobin, Uniform, Zipf, SingleHot };

struct Workload {
    WorkloadKind kind = WorkloadKind::RoundRobin;
    std::uint64_t length = 0;  // 0: 3N
    double zipf_s = 1.0;
    double write_fraction = 0.5;
    BlockId hot_id = 0;
};

// "roundrobin", "uniform", "zipf" or "zipf:<s>", "singlehot" or "singlehot:<id>".
Workload parse_workload(const std::string& spec);
std::string to_string(const Workload& w);

struct Request {
    Op op = Op::Read;
    BlockId id = 0;
};

class WorkloadGen {
public:
    WorkloadGen(const Workload& w, std::uint64_t n, Rng rng);

    Request next();
    std::uint64_t length() const { return length_; }

private:
    Workload w_;
    std::uint64_t n_;
    std::uint64_t length_;
    std::uint64_t i_ = 0;
    Rng rng_;
    std::vector<double> zipf_cdf_;
};

}  // namespace partoram::sim
