// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "amortizer/amortizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace partoram::amortizer {

using partition::Entry;
using partition::PreparedLevel;

struct Amortizer::Job {
    std::uint32_t p = 0;
    std::uint64_t c_start = 0;
    std::uint64_t c_end = 0;
    std::uint8_t lambda = 0;
    std::vector<std::uint8_t> inputs;
    std::vector<std::uint8_t> outputs;
    std::map<BlockId, Payload> beta;
    std::uint64_t enqueued_at = 0;
    bool started = false;
    bool built = false;
    std::size_t in_cursor = 0;
    std::vector<PreparedLevel> prepared;
    std::size_t out_cursor = 0;

    bool covers_input(std::uint8_t l) const {
        return std::find(inputs.begin(), inputs.end(), l) != inputs.end();
    }
    bool done() const { return built && out_cursor == prepared.size(); }
};

Amortizer::Amortizer(partition::Engine& engine, double w, bool eager_exhaustion_check,
                     bool record_steps, Rng rng)
    : engine_(engine),
      eager_check_(eager_exhaustion_check),
      record_steps_(record_steps),
      rng_(std::move(rng)) {
    const auto& g = engine_.geo();
    double lg = std::log2(static_cast<double>(std::max<std::uint32_t>(g.capacity, 2)));
    budget_ = static_cast<std::uint64_t>(std::floor(w * lg));
    if (budget_ == 0) throw ConfigError("amortizer budget must be at least one block per step");
    queued_of_.assign(g.partitions, nullptr);
    current_of_.assign(g.partitions, nullptr);
    owners_.assign(std::size_t{g.partitions} * g.levels, nullptr);
    stats_.budget = budget_;
    stats_.tau = g.partitions;
}

Amortizer::~Amortizer() = default;

Amortizer::Job*& Amortizer::owner(std::uint32_t p, std::uint8_t level) {
    return owners_[std::size_t{p} * engine_.geo().levels + level];
}

JobShape plan_job(const Geometry& g, std::uint64_t c_start, std::uint64_t c_end) {
    const std::uint64_t period = g.counter_period();
    const std::uint64_t a = c_start % period;
    const std::uint64_t b = c_end % period;
    const bool cross = c_start / period != c_end / period;
    JobShape s;
    std::uint32_t hi;
    if (cross) {
        s.lambda = static_cast<std::uint8_t>(g.top());
        hi = g.top();
    } else {
        s.lambda = static_cast<std::uint8_t>(63 - __builtin_clzll(a ^ b));
        hi = s.lambda + 1u;
    }
    for (std::uint32_t l = 0; l < hi; ++l) {
        if ((a >> l) & 1) s.inputs.push_back(static_cast<std::uint8_t>(l));
        if ((b >> l) & 1) s.outputs.push_back(static_cast<std::uint8_t>(l));
    }
    if (cross) {
        s.inputs.push_back(static_cast<std::uint8_t>(g.top()));
        s.outputs.push_back(static_cast<std::uint8_t>(g.top()));
    }
    return s;
}

void Amortizer::plan(Job& job) const {
    auto s = plan_job(engine_.geo(), job.c_start, job.c_end);
    job.lambda = s.lambda;
    job.inputs = std::move(s.inputs);
    job.outputs = std::move(s.outputs);
}

void Amortizer::freeze_level(std::uint32_t p, std::uint8_t level, Job* job) {
    auto& lv = engine_.part(p).levels[level];
    lv.pool = engine_.choose_unread(p, level, nullptr);
    lv.frozen = true;
    owner(p, level) = job;
}

void Amortizer::freeze(Job& job) {
    for (auto l : job.inputs) {
        const auto& lv = engine_.part(job.p).levels[l];
        if (lv.filled && !lv.frozen) freeze_level(job.p, l, &job);
    }
}

void Amortizer::add_pending(Job& job, BlockId id, Payload payload) {
    engine_.locator().place_pending(id, job.p);
    bool fresh = job.beta.try_emplace(id, std::move(payload)).second;
    PARTORAM_CHECK(fresh, "block already pending in the job");
    ++pending_;
    stats_.pending_peak = std::max(stats_.pending_peak, pending_);
}

Amortizer::Job* Amortizer::job_holding(std::uint32_t p, BlockId id) {
    for (Job* j : {current_of_[p], queued_of_[p]})
        if (j && j->beta.count(id)) return j;
    return nullptr;
}

bool Amortizer::exhausted(std::uint32_t p) const {
    for (const auto& lv : engine_.part(p).levels)
        if (lv.filled && !lv.frozen && lv.reads >= lv.half) return true;
    return false;
}

void Amortizer::start(Job& job) {
    for (auto l : job.inputs) {
        const auto& lv = engine_.part(job.p).levels[l];
        if (!lv.filled || !lv.frozen || owner(job.p, l) != &job)
            throw InternalError("shuffle job inputs are not frozen for it");
    }
    queued_of_[job.p] = nullptr;
    current_of_[job.p] = &job;
    job.started = true;
}

void Amortizer::build(Job& job) {
    std::vector<Entry> entries;
    entries.reserve(job.beta.size());
    for (const auto& [id, payload] : job.beta) entries.push_back(Entry{id, payload});
    engine_.counters().shuffle_buffer_peak =
        std::max<std::uint64_t>(engine_.counters().shuffle_buffer_peak, entries.size());
    auto split = engine_.distribute(job.outputs, std::move(entries));
    job.prepared.reserve(job.outputs.size());
    for (std::size_t o = 0; o < job.outputs.size(); ++o)
        job.prepared.push_back(engine_.prepare(job.p, job.outputs[o], std::move(split[o])));
    job.built = true;
}

void Amortizer::install_output(Job& job) {
    auto& prep = job.prepared[job.out_cursor];
    const std::uint8_t level = prep.level;
    engine_.install(job.p, std::move(prep), [&job](BlockId id) { return job.beta.count(id) > 0; });
    for (auto id : engine_.part(job.p).levels[level].ids) {
        if (job.beta.erase(id)) --pending_;
    }
    ++job.out_cursor;
    Job* next = queued_of_[job.p];
    if (next && next->covers_input(level)) freeze_level(job.p, level, next);
}

std::uint64_t Amortizer::advance(Job& job, std::uint64_t budget) {
    std::uint64_t spent = 0;
    auto& ps = engine_.part(job.p);
    const bool full = engine_.params().payload_mode == PayloadMode::Full;
    while (job.in_cursor < job.inputs.size()) {
        const std::uint8_t l = job.inputs[job.in_cursor];
        auto& lv = ps.levels[l];
        if (!lv.pool.empty()) {
            if (spent >= budget) return spent;
            const std::size_t n = std::min<std::uint64_t>(budget - spent, lv.pool.size());
            std::vector<std::uint32_t> chunk(lv.pool.end() - n, lv.pool.end());
            lv.pool.resize(lv.pool.size() - n);
            std::vector<std::pair<std::uint32_t, std::uint32_t>> by_offset;
            by_offset.reserve(n);
            for (auto i : chunk) by_offset.emplace_back(lv.offset(i), i);
            std::sort(by_offset.begin(), by_offset.end());
            std::vector<store::FetchRequest> reqs;
            std::vector<bool> live;
            reqs.reserve(n);
            for (const auto& [off, i] : by_offset) {
                live.push_back(engine_.is_live_real(job.p, l, i));
                reqs.push_back(engine_.take(job.p, l, i));
            }
            auto blocks = engine_.store().fetch_blocks(reqs);
            for (std::size_t j = 0; j < n; ++j) {
                if (!live[j] && !full) continue;
                Block b = engine_.open_fetched(job.p, l, by_offset[j].second, blocks[j]);
                if (live[j]) add_pending(job, b.id, std::move(b.payload));
            }
            spent += n;
        }
        if (lv.pool.empty()) {
            engine_.retire(job.p, l);
            owner(job.p, l) = nullptr;
            ++job.in_cursor;
        }
    }
    if (!job.built) build(job);
    while (job.out_cursor < job.prepared.size()) {
        auto& prep = job.prepared[job.out_cursor];
        if (!prep.uploaded()) {
            if (spent >= budget) return spent;
            spent += engine_.upload(job.p, prep, static_cast<std::uint32_t>(
                                                     std::min<std::uint64_t>(budget - spent, UINT32_MAX)));
        }
        if (prep.uploaded()) install_output(job);
    }
    return spent;
}

void Amortizer::complete_head() {
    Job& job = *queue_.front();
    const std::uint64_t latency = step_ - job.enqueued_at;
    stats_.max_latency = std::max(stats_.max_latency, latency);
    if (latency > stats_.tau) ++stats_.latency_violations;
    ++stats_.jobs_completed;
    pending_ -= job.beta.size();
    PARTORAM_CHECK(job.beta.empty(), "completed job still holds pending blocks");
    current_of_[job.p] = nullptr;
    queue_.pop_front();
}

void Amortizer::do_work() {
    std::uint64_t left = budget_;
    std::uint64_t work = 0;
    while (left > 0 && !queue_.empty()) {
        Job& job = *queue_.front();
        if (!job.started) start(job);
        std::uint64_t spent = advance(job, left);
        left -= spent;
        work += spent;
        if (job.done())
            complete_head();
        else if (spent == 0)
            break;
    }
    PARTORAM_CHECK(work <= budget_, "shuffle work exceeded the step budget");
    stats_.max_step_work = std::max(stats_.max_step_work, work);
    stats_.total_step_work += work;
    if (record_steps_) stats_.per_step_work.push_back(static_cast<std::uint32_t>(work));
}

void Amortizer::drain() {
    while (!queue_.empty()) {
        Job& job = *queue_.front();
        if (!job.started) start(job);
        stats_.overrun_work += advance(job, UINT64_MAX);
        complete_head();
    }
}

void Amortizer::fallback(std::uint32_t p) {
    ++stats_.fallbacks;
    while (current_of_[p] || queued_of_[p]) {
        Job& job = *queue_.front();
        if (!job.started) start(job);
        stats_.overrun_work += advance(job, UINT64_MAX);
        complete_head();
    }
    engine_.ensure_readable(p, nullptr);
}

Payload Amortizer::read(std::uint32_t p, const Position& old, BlockId id) {
    ++step_;
    ++stats_.steps;
    Payload out;
    partition::ReadTarget target;
    bool have_target = false;
    if (old.kind == PositionKind::Pending) {
        Job* j = job_holding(p, id);
        if (!j) throw InternalError("pending block is not held by any job");
        auto it = j->beta.find(id);
        out = std::move(it->second);
        j->beta.erase(it);
        --pending_;
        engine_.note_load(p, -1);
    } else if (old.kind == PositionKind::Server) {
        target = partition::ReadTarget{id, old.level, old.index};
        have_target = true;
    }
    if (exhausted(p)) throw InternalError("a level ran out of unread slots");

    enum class Src : std::uint8_t { Target, Draw, Dummy };
    struct Pick {
        std::uint8_t level;
        std::uint32_t index;
        Src src;
        bool live;
    };
    auto& ps = engine_.part(p);
    std::vector<store::FetchRequest> reqs;
    std::vector<Pick> picks;
    bool found = false;
    for (std::uint32_t li = 0; li < ps.levels.size(); ++li) {
        auto& lv = ps.levels[li];
        if (!lv.filled) continue;
        const auto l = static_cast<std::uint8_t>(li);
        if (have_target && target.level == l) {
            if (target.index >= lv.k || lv.ids[target.index] != id)
                throw InternalError("position map points at a slot without the block");
            if (lv.frozen) {
                auto it = std::find(lv.pool.begin(), lv.pool.end(), target.index);
                if (it == lv.pool.end()) throw InternalError("frozen level lost a live block");
                *it = lv.pool.back();
                lv.pool.pop_back();
            }
            picks.push_back(Pick{l, target.index, Src::Target, true});
            found = true;
        } else if (lv.frozen) {
            if (lv.pool.empty()) continue;
            auto at = uniform_below(rng_, lv.pool.size());
            std::uint32_t i = lv.pool[at];
            lv.pool[at] = lv.pool.back();
            lv.pool.pop_back();
            picks.push_back(Pick{l, i, Src::Draw, engine_.is_live_real(p, l, i)});
        } else {
            picks.push_back(Pick{l, engine_.next_dummy(p, l), Src::Dummy, false});
        }
        reqs.push_back(engine_.take(p, l, picks.back().index));
    }
    if (have_target && !found) throw InternalError("read target level is not filled");
    auto blocks = engine_.store().fetch_blocks(reqs);
    const bool full = engine_.params().payload_mode == PayloadMode::Full;
    for (std::size_t j = 0; j < picks.size(); ++j) {
        const auto& pk = picks[j];
        if (!pk.live && !full) continue;
        Block b = engine_.open_fetched(p, pk.level, pk.index, blocks[j]);
        if (pk.src == Src::Target) {
            out = std::move(b.payload);
        } else if (pk.live) {
            Job* j_owner = owner(p, pk.level);
            PARTORAM_CHECK(j_owner != nullptr, "frozen level without an owning job");
            add_pending(*j_owner, b.id, std::move(b.payload));
            ++stats_.read_draw_reals;
        }
    }
    if (have_target) engine_.note_load(p, -1);
    ++engine_.counters().reads;
    if (eager_check_ && exhausted(p)) fallback(p);
    do_work();
    return out;
}

void Amortizer::write(std::uint32_t p, Entry entry) {
    ++step_;
    ++stats_.steps;
    auto& ps = engine_.part(p);
    const std::uint64_t c0 = ps.writes;
    ps.writes = c0 + 1;
    ++engine_.counters().writes;
    Job* job = queued_of_[p];
    if (job) {
        job->c_end = ps.writes;
        plan(*job);
        ++stats_.jobs_merged;
    } else {
        PARTORAM_CHECK(!current_of_[p] || current_of_[p]->started, "two unstarted jobs for a partition");
        queue_.push_back(std::make_unique<Job>());
        job = queue_.back().get();
        job->p = p;
        job->c_start = c0;
        job->c_end = c0 + 1;
        job->enqueued_at = step_;
        plan(*job);
        queued_of_[p] = job;
        ++stats_.jobs_enqueued;
    }
    if (current_of_[p]) {
        // A running and a queued job: sizes 2^a and 2^b total at most 2 * 2^max(a, b).
        PARTORAM_CHECK(current_of_[p] != job, "merged into a running job");
    }
    if (is_dummy(entry.id)) {
        ++engine_.counters().dummy_writes;
    } else {
        engine_.note_load(p, +1);
        add_pending(*job, entry.id, std::move(entry.payload));
    }
    freeze(*job);
    do_work();
}

}  // namespace partoram::amortizer
