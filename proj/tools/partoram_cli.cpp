// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "partoram/partoram.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

// Owned C string returned by the library.
struct CStr {
    char* p = nullptr;
    ~CStr() { po_string_free(p); }
    std::string str() const { return p == nullptr ? std::string() : std::string(p); }
};

struct ErrorExit {
    po_status status;
    std::string message;
};

void check(po_status s) {
    if (s != PO_OK) throw ErrorExit{s, po_last_error()};
}

// Config flags shared by the experiment subcommands. Values stay textual and
// go through the library parser, so "2^20" and "4KB" work here too.
struct ConfigFlags {
    std::string config_file;
    std::vector<std::pair<const char*, std::string>> values;
    std::vector<std::string> overrides;
    std::string workload = "uniform";
    std::uint64_t ops = 0;
    bool piggyback = true;
    bool concurrent = false;
    bool recursive = false;
    bool compress = false;
    bool delete_on_read = false;
    CLI::App* app = nullptr;

    void add_to(CLI::App* sub) {
        app = sub;
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        values = {{"n", ""},           {"block_size", ""}, {"nu", ""},
                  {"evict", ""},       {"seed", ""},       {"partitions", ""},
                  {"capacity", ""},    {"payload_mode", ""}, {"cipher", ""},
                  {"budget_w", ""},    {"alpha", ""},      {"recursion_threshold", ""}};
        sub->add_option("--config", config_file, "flat key = value config file")
            ->check(CLI::ExistingFile);
        sub->add_option("--n", values[0].second, "number of blocks");
        sub->add_option("--block-size", values[1].second, "block size in bytes");
        sub->add_option("--nu", values[2].second, "background eviction rate");
        sub->add_option("--evict", values[3].second, "eviction algorithm")
            ->check(CLI::IsMember({"seq", "rand"}));
        sub->add_option("--seed", values[4].second, "master seed");
        sub->add_option("--partitions", values[5].second, "partition count (default ceil(sqrt N))");
        sub->add_option("--capacity", values[6].second, "partition capacity override");
        sub->add_option("--payload-mode", values[7].second, "full or metadata");
        sub->add_option("--cipher", values[8].second, "aead or test");
        sub->add_option("--budget-w", values[9].second, "per-step work budget multiplier");
        sub->add_option("--alpha", values[10].second, "position-map entries per block");
        sub->add_option("--recursion-threshold", values[11].second, "stop recursing at this size");
        sub->add_flag("--piggyback,!--no-piggyback", piggyback, "piggybacked eviction");
        sub->add_flag("--concurrent", concurrent, "amortized concurrent shuffling");
        sub->add_flag("--recursive", recursive, "store the position map recursively");
        sub->add_flag("--compress", compress, "compress level uploads");
        sub->add_flag("--delete-on-read", delete_on_read, "server frees blocks once read");
        sub->add_option("--set", overrides, "extra key=value config setting")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        sub->add_option("--workload", workload,
                        "roundrobin, uniform, zipf[:s] or singlehot[:id]");
        sub->add_option("--ops", ops, "operations to run (default 3N)");
    }

    po_config* build() const {
        po_config* cfg = nullptr;
        check(po_config_new(&cfg));
        try {
            if (!config_file.empty()) check(po_config_load_file(cfg, config_file.c_str()));
            for (const auto& [key, value] : values)
                if (!value.empty()) check(po_config_set(cfg, key, value.c_str()));
            auto flag = [&](const char* opt, const char* key, bool v) {
                if (app->count(opt) > 0) check(po_config_set(cfg, key, v ? "true" : "false"));
            };
            flag("--piggyback", "piggyback", piggyback);
            flag("--concurrent", "concurrent", concurrent);
            flag("--recursive", "recursive", recursive);
            flag("--compress", "compression", compress);
            flag("--delete-on-read", "delete_on_read", delete_on_read);
            for (const auto& kv : overrides) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ErrorExit{PO_ERR_ARGUMENT, "--set expects key=value: " + kv};
                check(po_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
            }
            check(po_config_validate(cfg));
            char* warnings = nullptr;
            check(po_config_warnings(cfg, &warnings));
            std::string text = warnings;
            po_string_free(warnings);
            for (std::size_t at = 0, nl; (nl = text.find('\n', at)) != std::string::npos; at = nl + 1)
                std::cerr << "warning: " << text.substr(at, nl - at) << '\n';
        } catch (...) {
            po_config_free(cfg);
            throw;
        }
        return cfg;
    }
};

struct ConfigHandle {
    po_config* p;
    ~ConfigHandle() { po_config_free(p); }
};

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw ErrorExit{PO_ERR_IO, "cannot write " + path};
    out << text;
}

std::string backend_spec(const std::string& backend, const std::string& dir,
                         const std::string& remote) {
    if (!remote.empty()) return "remote:" + remote;
    if (backend == "file") {
        if (dir.empty()) throw ErrorExit{PO_ERR_ARGUMENT, "--backend file needs --dir"};
        return "file:" + dir;
    }
    return "mem";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partitioned ORAM simulator and storage server"};
    app.require_subcommand(1);

    ConfigFlags sim_flags;
    std::string sim_csv, sim_json, sim_backend = "mem", sim_dir, sim_remote;
    bool sim_timing = false;
    auto* sim = app.add_subcommand("simulate", "run one workload and report transfer counts");
    sim_flags.add_to(sim);
    sim->add_option("--csv", sim_csv, "CSV output path (default stdout)");
    sim->add_option("--json", sim_json, "JSON summary output path");
    sim->add_flag("--timing", sim_timing, "add a wall_seconds column");
    sim->add_option("--backend", sim_backend, "storage backend")
        ->check(CLI::IsMember({"mem", "file"}));
    sim->add_option("--dir", sim_dir, "directory for the file backend");
    sim->add_option("--remote", sim_remote, "host:port of a storage server");

    ConfigFlags vb_flags;
    double vb_k = 1.0, vb_c = 2.0;
    std::uint64_t vb_steps = 2000000;
    std::string vb_json;
    auto* vb = app.add_subcommand("validate-bounds", "check cache, load and latency bounds");
    vb_flags.add_to(vb);
    vb->add_option("--k", vb_k, "bound parameter k");
    vb->add_option("--c", vb_c, "bound parameter c");
    vb->add_option("--markov-steps", vb_steps, "steps of the single-slot chain");
    vb->add_option("--json", vb_json, "report path (default stdout)");

    ConfigFlags or_flags;
    std::int64_t or_fault = -1;
    bool or_expect = false;
    auto* orc = app.add_subcommand("oracle", "compare every result with a plain dictionary");
    or_flags.add_to(orc);
    orc->add_option("--fault-at", or_fault, "drop the position-map update of this operation");
    orc->add_flag("--expect-divergence", or_expect, "succeed only if a divergence is caught");

    ConfigFlags sw_flags;
    std::string sw_axis = "eviction-rate", sw_range = "0.5,1,2,4", sw_csv;
    bool sw_timing = false, sw_assert = false;
    auto* sw = app.add_subcommand("sweep", "vary the eviction rate and tabulate the results");
    sw_flags.add_to(sw);
    sw->add_option("--axis", sw_axis, "eviction-rate or client-storage-k")
        ->check(CLI::IsMember({"eviction-rate", "client-storage-k"}));
    sw->add_option("--range", sw_range, "comma list or start:stop:step; empty for no points")
        ->expected(0, 1);
    sw->add_option("--csv", sw_csv, "CSV output path (default stdout)");
    sw->add_flag("--timing", sw_timing, "add a wall_seconds column");
    sw->add_flag("--assert-monotone", sw_assert, "fail unless the trend is monotone");

    std::string sv_bind = "127.0.0.1:7070", sv_backend = "mem", sv_dir;
    auto* sv = app.add_subcommand("serve", "run a block storage server");
    sv->add_option("--bind", sv_bind, "host:port to listen on (port 0 picks one)");
    sv->add_option("--backend", sv_backend, "storage backend")
        ->check(CLI::IsMember({"mem", "file"}));
    sv->add_option("--dir", sv_dir, "directory for the file backend");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            ConfigHandle cfg{sim_flags.build()};
            std::string backend = backend_spec(sim_backend, sim_dir, sim_remote);
            CStr csv, json;
            check(po_simulate(cfg.p, sim_flags.workload.c_str(), sim_flags.ops, sim_timing,
                              backend.c_str(), &csv.p, &json.p));
            emit(csv.str(), sim_csv);
            if (!sim_json.empty()) emit(json.str(), sim_json);
            return 0;
        }
        if (vb->parsed()) {
            ConfigHandle cfg{vb_flags.build()};
            CStr json;
            int ok = 0;
            check(po_validate_bounds(cfg.p, vb_k, vb_c, vb_flags.workload.c_str(), vb_flags.ops,
                                     vb_steps, &json.p, &ok));
            emit(json.str(), vb_json);
            return ok ? 0 : kExitFail;
        }
        if (orc->parsed()) {
            ConfigHandle cfg{or_flags.build()};
            CStr json;
            int ok = 0;
            check(po_oracle(cfg.p, or_flags.workload.c_str(), or_flags.ops, or_fault, &json.p,
                            &ok));
            emit(json.str(), "");
            bool pass = or_expect ? !ok : ok;
            return pass ? 0 : kExitFail;
        }
        if (sw->parsed()) {
            ConfigHandle cfg{sw_flags.build()};
            CStr csv;
            int monotone = 0;
            check(po_sweep(cfg.p, sw_flags.workload.c_str(), sw_flags.ops, sw_axis.c_str(),
                           sw_range.c_str(), sw_timing, &csv.p, &monotone));
            emit(csv.str(), sw_csv);
            if (sw_assert && !monotone) {
                std::cerr << "sweep: trend is not monotone\n";
                return kExitFail;
            }
            return 0;
        }
        if (sv->parsed()) {
            sigset_t set;
            sigemptyset(&set);
            sigaddset(&set, SIGINT);
            sigaddset(&set, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &set, nullptr);
            std::string backend = backend_spec(sv_backend, sv_dir, "");
            po_server* server = nullptr;
            std::uint16_t port = 0;
            check(po_server_start(sv_bind.c_str(), backend.c_str(), &server, &port));
            std::cout << "listening on port " << port << std::endl;
            int sig = 0;
            sigwait(&set, &sig);
            po_server_stop(server);
            return 0;
        }
    } catch (const ErrorExit& e) {
        std::cerr << "error: " << po_status_name(e.status) << ": " << e.message << '\n';
        return kExitError;
    }
    return kExitError;
}
