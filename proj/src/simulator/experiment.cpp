// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulator/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "blockstore/accounting.hpp"
#include "core/error.hpp"

namespace partoram::sim {

namespace {

recursion::StoreFactory store_factory(const RunOptions& opts) {
    if (opts.make_store) return opts.make_store;
    return [](std::uint32_t) { return std::shared_ptr<store::BlockStore>(store::make_memory_store()); };
}

Payload random_payload(Rng& rng, std::uint32_t bytes) {
    Payload p(bytes);
    for (std::uint32_t i = 0; i < bytes; i += 8) {
        std::uint64_t v = rng();
        for (std::uint32_t b = 0; b < 8 && i + b < bytes; ++b)
            p[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    return p;
}

}  // namespace

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

ExperimentResult run_experiment(const OramConfig& cfg, const Workload& w, const RunOptions& opts) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    recursion::RecursionStack stack(cfg, store_factory(opts), opts.record_steps);
    auto& top = stack.top();
    top.set_trace(opts.trace);
    WorkloadGen gen(w, cfg.n, derive_rng(cfg.seed, streams::kWorkload));
    Rng data_rng = derive_rng(cfg.seed, streams::kWorkload + 100);
    const std::uint32_t pb = top.payload_bytes();
    const std::uint64_t total = gen.length();
    const std::uint64_t tick = std::max<std::uint64_t>(1, total / 20);
    for (std::uint64_t i = 0; i < total; ++i) {
        Request r = gen.next();
        if (r.op == Op::Write) {
            Payload data = random_payload(data_rng, pb);
            top.access(Op::Write, r.id, &data);
        } else {
            top.access(Op::Read, r.id);
        }
        if (opts.progress && (i + 1) % tick == 0) opts.progress(i + 1, total);
    }
    top.set_trace(nullptr);

    ExperimentResult res;
    res.config = cfg;
    res.workload = w;
    res.geometry = top.geometry();
    res.ops = total;
    res.stack = stack.report();
    res.depth = res.stack.depth;
    for (std::size_t l = 0; l <= res.depth; ++l) {
        auto s = stack.level(l).stats();
        res.blocks_up += s.transfer.blocks_up;
        res.blocks_down += s.transfer.blocks_down;
        res.bytes_up += s.transfer.bytes_up;
        res.bytes_down += s.transfer.bytes_down;
        res.meta_bytes += s.transfer.meta_bytes;
    }
    auto s = top.stats();
    res.overhead = total ? static_cast<double>(res.blocks_up + res.blocks_down) / total : 0.0;
    res.cache_peak = s.cache_peak;
    res.cache_peak_sum = res.stack.cache_peak_sum;
    res.client_peak = s.client_blocks_peak;
    res.max_load = s.engine.max_load;
    res.peak_server_blocks = s.transfer.peak_server_blocks;
    res.forced_reshuffles = s.engine.forced_reshuffles;
    if (s.amortizer) {
        res.max_step_work = s.amortizer->max_step_work;
        res.step_budget = s.amortizer->budget;
        res.max_job_latency = s.amortizer->max_latency;
        res.latency_violations = s.amortizer->latency_violations;
        res.fallbacks = s.amortizer->fallbacks;
        res.per_step_work = s.amortizer->per_step_work;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::string csv_header(bool timing) {
    std::string h =
        "n,block_size,partitions,capacity,levels,nu,evict,piggyback,concurrent,recursive,"
        "compression,delete_on_read,payload_mode,workload,ops,seed,depth,blocks_up,blocks_down,"
        "bytes_up,bytes_down,meta_bytes,overhead,cache_peak,cache_peak_over_sqrt_n,"
        "cache_peak_sum,client_peak,max_load,max_load_over_sqrt_n,peak_server_blocks,"
        "peak_server_over_n,forced_reshuffles,max_step_work,step_budget,max_job_latency,"
        "latency_violations";
    if (timing) h += ",wall_seconds";
    return h;
}

std::string csv_row(const ExperimentResult& r, bool timing) {
    const auto& c = r.config;
    const double sq = std::sqrt(static_cast<double>(c.n));
    std::ostringstream o;
    auto b = [](bool v) { return v ? "1" : "0"; };
    o << c.n << ',' << c.block_size << ',' << r.geometry.partitions << ',' << r.geometry.capacity
      << ',' << r.geometry.levels << ',' << fmt6(c.nu) << ',' << to_string(c.evict_algo) << ','
      << b(c.piggyback) << ',' << b(c.concurrent) << ',' << b(c.recursive) << ','
      << b(c.compression) << ',' << b(c.delete_on_read) << ',' << to_string(c.payload_mode) << ','
      << to_string(r.workload) << ',' << r.ops << ',' << c.seed << ',' << r.depth << ','
      << r.blocks_up << ',' << r.blocks_down << ',' << r.bytes_up << ',' << r.bytes_down << ','
      << r.meta_bytes << ',' << fmt6(r.overhead) << ',' << r.cache_peak << ','
      << fmt6(r.cache_peak / sq) << ',' << r.cache_peak_sum << ',' << r.client_peak << ','
      << r.max_load << ',' << fmt6(r.max_load / sq) << ',' << r.peak_server_blocks << ','
      << fmt6(static_cast<double>(r.peak_server_blocks) / static_cast<double>(c.n)) << ','
      << r.forced_reshuffles << ',' << r.max_step_work << ',' << r.step_budget << ','
      << r.max_job_latency << ',' << r.latency_violations;
    if (timing) o << ',' << fmt6(r.wall_seconds);
    return o.str();
}

OracleResult run_oracle(const OramConfig& cfg_in, const Workload& w, std::int64_t fault_at,
                        const RunOptions& opts) {
    OramConfig cfg = cfg_in;
    cfg.payload_mode = PayloadMode::Full;
    OracleResult out;
    std::unordered_map<BlockId, Payload> ref;
    try {
        recursion::RecursionStack stack(cfg, store_factory(opts));
        auto& top = stack.top();
        WorkloadGen gen(w, cfg.n, derive_rng(cfg.seed, streams::kWorkload));
        Rng data_rng = derive_rng(cfg.seed, streams::kWorkload + 100);
        const Payload zeros(top.payload_bytes(), 0);
        for (std::uint64_t i = 0; i < gen.length(); ++i) {
            Request r = gen.next();
            if (static_cast<std::int64_t>(i) == fault_at) {
                auto* local = dynamic_cast<framework::LocalDirectory*>(&top.directory());
                if (!local) throw ConfigError("fault injection needs a resident position map");
                local->skip_next_update();
            }
            Payload got;
            Payload data;
            if (r.op == Op::Write) {
                data = random_payload(data_rng, top.payload_bytes());
                got = top.access(Op::Write, r.id, &data);
            } else {
                got = top.access(Op::Read, r.id);
            }
            auto it = ref.find(r.id);
            const Payload& want = it == ref.end() ? zeros : it->second;
            ++out.ops;
            if (got != want) {
                out.ok = false;
                out.divergence_op = static_cast<std::int64_t>(i);
                out.id = r.id;
                out.detail = "payload mismatch for id " + std::to_string(r.id) + " at op " +
                             std::to_string(i);
                return out;
            }
            if (r.op == Op::Write) ref[r.id] = std::move(data);
        }
    } catch (const Error& e) {
        out.ok = false;
        out.divergence_op = static_cast<std::int64_t>(out.ops);
        out.detail = std::string("error at op ") + std::to_string(out.ops) + ": " + e.what();
    }
    return out;
}

}  // namespace partoram::sim
