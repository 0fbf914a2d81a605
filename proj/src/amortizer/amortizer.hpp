// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"
#include "partition/engine.hpp"

namespace partoram::amortizer {

struct AmortizerStats {
    std::uint64_t budget = 0;
    std::uint64_t tau = 0;
    std::uint64_t steps = 0;
    std::uint64_t jobs_enqueued = 0;
    std::uint64_t jobs_merged = 0;
    std::uint64_t jobs_completed = 0;
    std::uint64_t max_latency = 0;
    std::uint64_t latency_violations = 0;
    std::uint64_t max_step_work = 0;
    std::uint64_t total_step_work = 0;
    std::uint64_t fallbacks = 0;
    std::uint64_t overrun_work = 0;
    std::uint64_t pending_peak = 0;
    std::uint64_t read_draw_reals = 0;
    std::vector<std::uint32_t> per_step_work;
};

// Levels a job rebuilds when partition writes c_start..c_end-1 are merged
// into it: inputs are the filled levels at c_start, outputs those at c_end,
// and lambda the highest level touched (top when the counter wraps).
struct JobShape {
    std::uint8_t lambda = 0;
    std::vector<std::uint8_t> inputs;
    std::vector<std::uint8_t> outputs;
};

JobShape plan_job(const Geometry& g, std::uint64_t c_start, std::uint64_t c_end);

// Spreads level reshuffles over time steps. Each pRead or pWrite is one step;
// every step runs at most `budget` block transfers of queued shuffle work.
class Amortizer {
public:
    Amortizer(partition::Engine& engine, double w, bool eager_exhaustion_check,
              bool record_steps, Rng rng);
    ~Amortizer();

    // cp_read. `old` is the id's previous position: Server reads the block,
    // Pending serves it from a job buffer, anything else is a dummy read.
    Payload read(std::uint32_t p, const Position& old, BlockId id);
    // cp_write: advances C_p and enqueues (or merges) the shuffle job.
    void write(std::uint32_t p, partition::Entry entry);
    // Runs every queued job to completion outside the step budget.
    void drain();

    const AmortizerStats& stats() const { return stats_; }
    std::uint64_t pending_blocks() const { return pending_; }
    std::size_t queued_jobs() const { return queue_.size(); }

private:
    struct Job;

    void plan(Job& job) const;
    void freeze(Job& job);
    void freeze_level(std::uint32_t p, std::uint8_t level, Job* owner);
    void start(Job& job);
    std::uint64_t advance(Job& job, std::uint64_t budget);
    void build(Job& job);
    void install_output(Job& job);
    void complete_head();
    void do_work();
    void fallback(std::uint32_t p);
    bool exhausted(std::uint32_t p) const;
    Job* job_holding(std::uint32_t p, BlockId id);
    void add_pending(Job& job, BlockId id, Payload payload);
    Job*& owner(std::uint32_t p, std::uint8_t level);

    partition::Engine& engine_;
    std::uint64_t budget_;
    bool eager_check_;
    bool record_steps_;
    Rng rng_;
    std::deque<std::unique_ptr<Job>> queue_;
    std::vector<Job*> queued_of_;   // not yet started, per partition
    std::vector<Job*> current_of_;  // started, per partition
    std::vector<Job*> owners_;      // per (partition, level) frozen owner
    std::uint64_t step_ = 0;
    std::uint64_t pending_ = 0;
    AmortizerStats stats_;
};

}  // namespace partoram::amortizer
