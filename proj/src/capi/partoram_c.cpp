// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "partoram/partoram.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "blockstore/accounting.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "json.hpp"
#include "recursion/stack.hpp"
#include "remote/server.hpp"
#include "simulator/bounds.hpp"
#include "simulator/experiment.hpp"
#include "simulator/sweep.hpp"
#include "simulator/workload.hpp"

struct po_config {
    partoram::OramConfig cfg;
};

struct po_oram {
    std::unique_ptr<partoram::recursion::RecursionStack> stack;
};

struct po_server {
    std::unique_ptr<partoram::remote::Server> server;
};

namespace {

using namespace partoram;
using nlohmann::json;

thread_local std::string g_last_error;

class ArgumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <typename F>
po_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return PO_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<po_status>(e.code());
    } catch (const ArgumentError& e) {
        g_last_error = e.what();
        return PO_ERR_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return PO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return PO_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

struct Backend {
    enum Kind { Memory, File, Remote } kind = Memory;
    std::string arg;
};

Backend parse_backend(const char* spec) {
    std::string s = spec == nullptr ? "mem" : spec;
    if (s.empty() || s == "mem" || s == "memory") return {};
    auto colon = s.find(':');
    std::string head = s.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "file" && !rest.empty()) return {Backend::File, rest};
    if (head == "remote" && !rest.empty()) return {Backend::Remote, rest};
    throw ConfigError("unknown backend: " + s);
}

recursion::StoreFactory make_factory(const OramConfig& cfg, const Backend& b) {
    if (b.kind == Backend::Memory) return {};
    if (cfg.recursive && cfg.n > cfg.recursion_threshold)
        throw ConfigError("recursion is only supported with the memory backend");
    if (b.kind == Backend::File) {
        std::string dir = b.arg;
        return [dir](std::uint32_t) {
            return std::shared_ptr<store::BlockStore>(store::make_file_store(dir));
        };
    }
    std::string addr = b.arg;
    return [addr](std::uint32_t) { return remote::connect_store(addr); };
}

sim::Workload workload_of(const char* spec, std::uint64_t ops) {
    auto w = sim::parse_workload(spec == nullptr ? "uniform" : spec);
    if (ops > 0) w.length = ops;
    return w;
}

json transfer_json(const store::TransferStats& t) {
    return {{"blocks_up", t.blocks_up},
            {"blocks_down", t.blocks_down},
            {"bytes_up", t.bytes_up},
            {"bytes_down", t.bytes_down},
            {"meta_bytes", t.meta_bytes},
            {"peak_server_blocks", t.peak_server_blocks},
            {"resident_blocks", t.resident_blocks},
            {"fetch_batches", t.fetch_batches}};
}

json result_json(const sim::ExperimentResult& r, bool timing) {
    json j = {{"n", r.config.n},
              {"block_size", r.config.block_size},
              {"partitions", r.geometry.partitions},
              {"levels", r.geometry.levels},
              {"capacity", r.geometry.capacity},
              {"workload", sim::to_string(r.workload)},
              {"ops", r.ops},
              {"depth", r.depth},
              {"blocks_up", r.blocks_up},
              {"blocks_down", r.blocks_down},
              {"bytes_up", r.bytes_up},
              {"bytes_down", r.bytes_down},
              {"meta_bytes", r.meta_bytes},
              {"overhead", r.overhead},
              {"cache_peak", r.cache_peak},
              {"cache_peak_sum", r.cache_peak_sum},
              {"client_peak", r.client_peak},
              {"max_load", r.max_load},
              {"peak_server_blocks", r.peak_server_blocks},
              {"forced_reshuffles", r.forced_reshuffles},
              {"max_step_work", r.max_step_work},
              {"step_budget", r.step_budget},
              {"max_job_latency", r.max_job_latency},
              {"latency_violations", r.latency_violations},
              {"fallbacks", r.fallbacks}};
    if (timing) j["wall_seconds"] = r.wall_seconds;
    j["warnings"] = recursion::config_warnings(r.config);
    json levels = json::array();
    for (const auto& l : r.stack.levels)
        levels.push_back({{"capacity", l.capacity},
                          {"partitions", l.partitions},
                          {"cache_peak", l.cache_peak},
                          {"server_peak_blocks", l.server_peak_blocks},
                          {"blocks_transferred", l.blocks_transferred},
                          {"ops", l.ops}});
    j["stack"] = {{"depth", r.stack.depth},
                  {"alpha", r.stack.alpha},
                  {"resident_entries", r.stack.resident_entries},
                  {"shuffle_buffer_peak", r.stack.shuffle_buffer_peak},
                  {"levels", levels}};
    return j;
}

}  // namespace

extern "C" {

const char* po_last_error(void) { return g_last_error.c_str(); }

const char* po_status_name(po_status s) {
    switch (s) {
        case PO_OK: return "ok";
        case PO_ERR_DOMAIN: return "domain error";
        case PO_ERR_CONFIG: return "config error";
        case PO_ERR_PROTOCOL: return "protocol error";
        case PO_ERR_INTEGRITY: return "integrity violation";
        case PO_ERR_TRANSPORT: return "transport error";
        case PO_ERR_CAPACITY: return "capacity violation";
        case PO_ERR_IO: return "io error";
        case PO_ERR_INTERNAL: return "internal error";
        case PO_ERR_ARGUMENT: return "invalid argument";
    }
    return "unknown status";
}

void po_string_free(char* s) { std::free(s); }

po_status po_config_new(po_config** out) {
    return guarded([&] {
        need(out, "out");
        *out = new po_config();
    });
}

void po_config_free(po_config* cfg) { delete cfg; }

po_status po_config_set(po_config* cfg, const char* key, const char* value) {
    return guarded([&] {
        need(cfg, "config");
        need(key, "key");
        need(value, "value");
        cfg->cfg.set(key, value);
    });
}

po_status po_config_load_file(po_config* cfg, const char* path) {
    return guarded([&] {
        need(cfg, "config");
        need(path, "path");
        for (const auto& [k, v] : parse_kv_text(read_text_file(path))) cfg->cfg.set(k, v);
    });
}

po_status po_config_validate(const po_config* cfg) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.validate();
    });
}

po_status po_config_to_json(const po_config* cfg, char** out) {
    return guarded([&] {
        need(cfg, "config");
        need(out, "out");
        json j = json::object();
        for (const auto& [k, v] : cfg->cfg.to_map()) j[k] = v;
        *out = dup_string(j.dump(2));
    });
}

po_status po_config_warnings(const po_config* cfg, char** out) {
    return guarded([&] {
        need(cfg, "config");
        need(out, "out");
        std::string text;
        for (const auto& w : recursion::config_warnings(cfg->cfg)) text += w + "\n";
        *out = dup_string(text);
    });
}

po_status po_oram_open(const po_config* cfg, const char* backend, po_oram** out) {
    return guarded([&] {
        need(cfg, "config");
        need(out, "out");
        cfg->cfg.validate();
        auto factory = make_factory(cfg->cfg, parse_backend(backend));
        auto h = std::make_unique<po_oram>();
        h->stack = std::make_unique<recursion::RecursionStack>(cfg->cfg, factory);
        *out = h.release();
    });
}

void po_oram_close(po_oram* oram) { delete oram; }

size_t po_oram_block_size(const po_oram* oram) {
    if (oram == nullptr) return 0;
    return oram->stack->top().payload_bytes();
}

po_status po_oram_read(po_oram* oram, uint64_t id, uint8_t* out, size_t out_len) {
    return guarded([&] {
        need(oram, "oram");
        need(out, "out");
        auto& top = oram->stack->top();
        if (out_len != top.payload_bytes()) throw ArgumentError("buffer size must equal block size");
        auto data = oram->stack->access(Op::Read, id);
        std::memcpy(out, data.data(), data.size());
    });
}

po_status po_oram_write(po_oram* oram, uint64_t id, const uint8_t* data, size_t len) {
    return guarded([&] {
        need(oram, "oram");
        need(data, "data");
        auto& top = oram->stack->top();
        if (len != top.payload_bytes()) throw ArgumentError("data size must equal block size");
        Payload p(data, data + len);
        oram->stack->access(Op::Write, id, &p);
    });
}

po_status po_oram_stats_json(po_oram* oram, char** out) {
    return guarded([&] {
        need(oram, "oram");
        need(out, "out");
        auto s = oram->stack->top().stats();
        json j = {{"ops", s.ops},
                  {"cache_blocks", s.cache_blocks},
                  {"cache_peak", s.cache_peak},
                  {"pending_blocks", s.pending_blocks},
                  {"client_blocks_peak", s.client_blocks_peak},
                  {"posmap_bytes", s.posmap_bytes},
                  {"max_load", s.engine.max_load},
                  {"forced_reshuffles", s.engine.forced_reshuffles},
                  {"levels_built", s.engine.levels_built},
                  {"transfer", transfer_json(s.transfer)}};
        if (s.amortizer) {
            const auto& a = *s.amortizer;
            j["amortizer"] = {{"budget", a.budget},
                              {"tau", a.tau},
                              {"steps", a.steps},
                              {"jobs_completed", a.jobs_completed},
                              {"max_latency", a.max_latency},
                              {"max_step_work", a.max_step_work},
                              {"fallbacks", a.fallbacks}};
        }
        j["depth"] = oram->stack->depth();
        *out = dup_string(j.dump(2));
    });
}

po_status po_simulate(const po_config* cfg, const char* workload, uint64_t ops, int timing,
                      const char* backend, char** csv_out, char** json_out) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.validate();
        sim::RunOptions opts;
        opts.make_store = make_factory(cfg->cfg, parse_backend(backend));
        auto r = sim::run_experiment(cfg->cfg, workload_of(workload, ops), opts);
        bool t = timing != 0;
        if (csv_out != nullptr)
            *csv_out = dup_string(sim::csv_header(t) + "\n" + sim::csv_row(r, t) + "\n");
        if (json_out != nullptr) *json_out = dup_string(result_json(r, t).dump(2));
    });
}

po_status po_sweep(const po_config* cfg, const char* workload, uint64_t ops, const char* axis,
                   const char* range, int timing, char** csv_out, int* monotone) {
    return guarded([&] {
        need(cfg, "config");
        need(axis, "axis");
        need(range, "range");
        cfg->cfg.validate();
        auto values = sim::parse_range(range);
        auto r = sim::run_sweep(cfg->cfg, workload_of(workload, ops), sim::parse_axis(axis),
                                values, timing != 0);
        if (csv_out != nullptr) *csv_out = dup_string(r.csv);
        if (monotone != nullptr) *monotone = r.monotone ? 1 : 0;
    });
}

po_status po_validate_bounds(const po_config* cfg, double k, double c, const char* workload,
                             uint64_t ops, uint64_t markov_steps, char** json_out, int* ok) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.validate();
        auto r = sim::validate_bounds(cfg->cfg, sim::BoundParams{k, c},
                                      workload_of(workload, ops), markov_steps);
        if (json_out != nullptr) *json_out = dup_string(r.to_json());
        if (ok != nullptr) *ok = r.all_ok() ? 1 : 0;
    });
}

po_status po_oracle(const po_config* cfg, const char* workload, uint64_t ops, int64_t fault_at,
                    char** json_out, int* ok) {
    return guarded([&] {
        need(cfg, "config");
        cfg->cfg.validate();
        auto r = sim::run_oracle(cfg->cfg, workload_of(workload, ops), fault_at);
        json j = {{"ok", r.ok}, {"ops", r.ops}, {"divergence_op", r.divergence_op}};
        if (!r.ok) {
            j["id"] = r.id;
            j["detail"] = r.detail;
        }
        if (json_out != nullptr) *json_out = dup_string(j.dump(2));
        if (ok != nullptr) *ok = r.ok ? 1 : 0;
    });
}

po_status po_server_start(const char* bind_addr, const char* backend, po_server** out,
                          uint16_t* port) {
    return guarded([&] {
        need(bind_addr, "bind address");
        need(out, "out");
        auto b = parse_backend(backend);
        std::shared_ptr<store::BlockStore> st;
        if (b.kind == Backend::Memory) st = store::make_memory_store();
        else if (b.kind == Backend::File) st = store::make_file_store(b.arg);
        else throw ConfigError("a server cannot use a remote backend");
        auto h = std::make_unique<po_server>();
        h->server = std::make_unique<remote::Server>(st);
        h->server->bind(bind_addr);
        h->server->start();
        if (port != nullptr) *port = h->server->port();
        *out = h.release();
    });
}

void po_server_stop(po_server* server) {
    if (server == nullptr) return;
    try {
        server->server->stop();
    } catch (...) {
    }
    delete server;
}

}  // extern "C"
