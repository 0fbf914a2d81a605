// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulator/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "core/error.hpp"

namespace partoram::sim {

SweepAxis parse_axis(const std::string& s) {
    if (s == "eviction-rate" || s == "nu" || s == "eviction_rate") return SweepAxis::EvictionRate;
    if (s == "client-storage-k" || s == "k" || s == "client_storage_k") return SweepAxis::ClientStorageK;
    throw ConfigError("unknown sweep axis: " + s);
}

std::string to_string(SweepAxis a) {
    return a == SweepAxis::EvictionRate ? "eviction-rate" : "client-storage-k";
}

std::vector<double> parse_range(const std::string& s) {
    std::vector<double> out;
    if (s.empty()) return out;
    try {
        if (s.find(':') != std::string::npos) {
            std::vector<double> parts;
            std::stringstream ss(s);
            std::string tok;
            while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
            if (parts.size() != 3 || !(parts[2] > 0)) throw ConfigError("range must be start:stop:step");
            for (double v = parts[0]; v <= parts[1] + 1e-9 * std::fabs(parts[2]); v += parts[2])
                out.push_back(v);
            return out;
        }
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) out.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
        throw ConfigError("bad sweep range: " + s);
    }
    return out;
}

SweepResult run_sweep(const OramConfig& base, const Workload& w, SweepAxis axis,
                      const std::vector<double>& values, bool timing) {
    SweepResult r;
    r.axis = axis;
    r.values = values;
    const double sq = std::sqrt(static_cast<double>(base.n));
    for (double v : values) {
        OramConfig c = base;
        c.nu = v;
        r.rows.push_back(run_experiment(c, w));
        r.k.push_back(static_cast<double>(r.rows.back().client_peak) / sq);
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    if (axis == SweepAxis::EvictionRate)
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    else
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return r.k[a] < r.k[b]; });
    for (std::size_t j = 1; j < order.size(); ++j) {
        const auto& prev = r.rows[order[j - 1]];
        const auto& cur = r.rows[order[j]];
        if (axis == SweepAxis::EvictionRate) {
            if (cur.cache_peak > prev.cache_peak) r.monotone = false;
            if (cur.cache_peak >= prev.cache_peak) r.strictly_monotone = false;
        } else {
            if (cur.overhead > prev.overhead) r.monotone = false;
            if (cur.overhead >= prev.overhead) r.strictly_monotone = false;
        }
    }
    std::ostringstream o;
    o << "axis,value,k," << csv_header(timing) << '\n';
    for (std::size_t j = 0; j < values.size(); ++j)
        o << to_string(axis) << ',' << fmt6(values[j]) << ',' << fmt6(r.k[j]) << ','
          << csv_row(r.rows[j], timing) << '\n';
    r.csv = o.str();
    return r;
}

}  // namespace partoram::sim
