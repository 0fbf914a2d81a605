// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulator/bounds.hpp"

#include <cmath>
#include "json.hpp"

#include "core/error.hpp"
#include "simulator/stats_math.hpp"

namespace partoram::sim {

double cache_bound(std::uint64_t n, const BoundParams& b) {
    const double N = static_cast<double>(n);
    return std::sqrt(N) + 4.0 * std::sqrt(b.k + b.c) * std::pow(N, 0.25) * std::sqrt(std::log(N));
}

double partition_bound(std::uint64_t n, const BoundParams& b) {
    const double N = static_cast<double>(n);
    return std::sqrt(N) + (b.k + b.c) * std::log(N);
}

double empirical_partition_bound(std::uint64_t n) { return 1.15 * std::sqrt(static_cast<double>(n)); }

MarkovResult markov_slot_chain(double p, double q, std::uint64_t steps, std::uint64_t seed) {
    if (!(p > 0 && p < 1 && q > 0 && q < 1)) throw DomainError("chain probabilities must be in (0, 1)");
    MarkovResult r;
    r.p = p;
    r.q = q;
    r.rho = p * (1 - q) / (q * (1 - p));
    r.steps = steps;
    Rng rng = derive_rng(seed, 0x6d61726b);
    std::vector<std::uint64_t> hist(1, 0);
    std::uint64_t x = 0;
    double sum = 0;
    for (std::uint64_t t = 0; t < steps; ++t) {
        bool add = uniform_unit(rng) < p;
        bool evict = uniform_unit(rng) < q;
        x += add;
        if (evict && x > 0) --x;
        if (x >= hist.size()) hist.resize(x + 1, 0);
        ++hist[x];
        sum += static_cast<double>(x);
    }
    r.empirical.resize(hist.size());
    for (std::size_t i = 0; i < hist.size(); ++i)
        r.empirical[i] = steps ? static_cast<double>(hist[i]) / static_cast<double>(steps) : 0;
    r.theory.resize(hist.size() + 1);
    double mass = 0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        r.theory[i] = std::pow(r.rho, static_cast<double>(i)) * (1 - r.rho);
        mass += r.theory[i];
    }
    // Remaining tail mass beyond the largest observed occupancy.
    r.theory.back() = std::max(0.0, 1.0 - mass);
    r.tv = tv_distance(r.empirical, r.theory);
    r.mean_empirical = steps ? sum / static_cast<double>(steps) : 0;
    r.mean_theory = r.rho / (1 - r.rho);
    r.mean_rel_error = std::fabs(r.mean_empirical - r.mean_theory) / r.mean_theory;
    return r;
}

bool BoundsReport::all_ok() const {
    return markov_ok && cache_ok && load_analytic_ok && load_empirical_ok && latency_ok && budget_ok;
}

std::string BoundsReport::to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["k"] = params.k;
    j["c"] = params.c;
    j["markov"] = {{"p", markov.p},
                   {"q", markov.q},
                   {"rho", markov.rho},
                   {"steps", markov.steps},
                   {"tv", markov.tv},
                   {"mean_empirical", markov.mean_empirical},
                   {"mean_theory", markov.mean_theory},
                   {"ok", markov_ok}};
    j["cache"] = {{"peak", cache_peak}, {"limit", cache_limit}, {"ok", cache_ok}};
    j["partition_load"] = {{"max", max_load},
                           {"analytic_limit", load_limit_analytic},
                           {"analytic_ok", load_analytic_ok},
                           {"empirical_limit", load_limit_empirical},
                           {"empirical_ok", load_empirical_ok}};
    j["concurrency"] = {{"max_latency", max_latency},
                        {"tau", tau},
                        {"latency_ok", latency_ok},
                        {"max_step_work", max_step_work},
                        {"budget", budget},
                        {"budget_ok", budget_ok}};
    j["ok"] = all_ok();
    return j.dump(2);
}

BoundsReport validate_bounds(const OramConfig& cfg, const BoundParams& b, const Workload& w,
                             std::uint64_t markov_steps) {
    if (!(b.k > 0 && b.c > 0)) throw ConfigError("bound parameters k and c must be > 0");
    BoundsReport r;
    r.params = b;
    r.n = cfg.n;
    const Geometry g = Geometry::derive(cfg);
    const double P = g.partitions;
    r.markov = markov_slot_chain(1.0 / P, std::min(0.999, cfg.nu / P), markov_steps, cfg.seed);
    r.markov_ok = r.markov.tv < 0.02 && r.markov.mean_rel_error < 0.05;

    OramConfig plain = cfg;
    plain.concurrent = false;
    auto res = run_experiment(plain, w);
    r.cache_peak = res.cache_peak;
    r.cache_limit = cache_bound(cfg.n, b);
    r.cache_ok = static_cast<double>(r.cache_peak) <= r.cache_limit;
    r.max_load = res.max_load;
    r.load_limit_analytic = partition_bound(cfg.n, b);
    r.load_limit_empirical = empirical_partition_bound(cfg.n);
    r.load_analytic_ok = static_cast<double>(r.max_load) <= r.load_limit_analytic;
    r.load_empirical_ok = static_cast<double>(r.max_load) <= r.load_limit_empirical;

    OramConfig conc = cfg;
    conc.concurrent = true;
    auto cres = run_experiment(conc, w);
    r.max_latency = cres.max_job_latency;
    r.tau = cres.geometry.partitions;
    r.latency_ok = cres.latency_violations == 0;
    r.max_step_work = cres.max_step_work;
    r.budget = cres.step_budget;
    r.budget_ok = r.max_step_work <= r.budget;
    return r;
}

}  // namespace partoram::sim
