// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulator/workload.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace partoram::sim {

Workload parse_workload(const std::string& spec) {
    Workload w;
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
        return c == '-' || c == '_' ? '\0' : static_cast<char>(std::tolower(c));
    });
    name.erase(std::remove(name.begin(), name.end(), '\0'), name.end());
    try {
        if (name == "roundrobin" || name == "rr") {
            w.kind = WorkloadKind::RoundRobin;
        } else if (name == "uniform") {
            w.kind = WorkloadKind::Uniform;
        } else if (name == "zipf") {
            w.kind = WorkloadKind::Zipf;
            if (!arg.empty()) w.zipf_s = std::stod(arg);
        } else if (name == "singlehot" || name == "hot") {
            w.kind = WorkloadKind::SingleHot;
            if (!arg.empty()) w.hot_id = std::stoull(arg);
        } else {
            throw ConfigError("unknown workload: " + spec);
        }
    } catch (const std::logic_error&) {
        throw ConfigError("bad workload argument: " + spec);
    }
    if (w.kind == WorkloadKind::Zipf && !(w.zipf_s > 0)) throw ConfigError("zipf exponent must be > 0");
    return w;
}

std::string to_string(const Workload& w) {
    switch (w.kind) {
        case WorkloadKind::RoundRobin: return "roundrobin";
        case WorkloadKind::Uniform: return "uniform";
        case WorkloadKind::Zipf: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "zipf:%g", w.zipf_s);
            return buf;
        }
        case WorkloadKind::SingleHot: return "singlehot:" + std::to_string(w.hot_id);
    }
    return "?";
}

WorkloadGen::WorkloadGen(const Workload& w, std::uint64_t n, Rng rng)
    : w_(w), n_(n), length_(w.length ? w.length : 3 * n), rng_(std::move(rng)) {
    if (n_ == 0) throw ConfigError("workload needs n >= 1");
    if (w_.kind == WorkloadKind::SingleHot && w_.hot_id >= n_)
        throw ConfigError("hot id out of range");
    if (w_.kind == WorkloadKind::Zipf) {
        zipf_cdf_.resize(n_);
        double acc = 0;
        for (std::uint64_t i = 0; i < n_; ++i) {
            acc += 1.0 / std::pow(static_cast<double>(i + 1), w_.zipf_s);
            zipf_cdf_[i] = acc;
        }
        for (auto& v : zipf_cdf_) v /= acc;
    }
}

Request WorkloadGen::next() {
    Request r;
    r.op = uniform_unit(rng_) < w_.write_fraction ? Op::Write : Op::Read;
    switch (w_.kind) {
        case WorkloadKind::RoundRobin: r.id = i_ % n_; break;
        case WorkloadKind::Uniform: r.id = uniform_below(rng_, n_); break;
        case WorkloadKind::Zipf: {
            auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), uniform_unit(rng_));
            r.id = std::min<std::uint64_t>(static_cast<std::uint64_t>(it - zipf_cdf_.begin()), n_ - 1);
            break;
        }
        case WorkloadKind::SingleHot: r.id = w_.hot_id; break;
    }
    ++i_;
    return r;
}

}  // namespace partoram::sim
