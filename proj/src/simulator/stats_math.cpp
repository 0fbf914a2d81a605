// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "simulator/stats_math.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace partoram::sim {

double chi_square_sf(double statistic, double dof) {
    if (dof <= 0) return 1.0;
    boost::math::chi_squared dist(dof);
    return boost::math::cdf(boost::math::complement(dist, std::max(0.0, statistic)));
}

ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts) {
    ChiSquare r;
    if (counts.size() < 2) return r;
    double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (total == 0) return r;
    double e = total / static_cast<double>(counts.size());
    for (auto c : counts) r.statistic += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
    r.dof = static_cast<double>(counts.size() - 1);
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                const std::vector<std::uint64_t>& b) {
    if (a.size() != b.size()) throw DomainError("histograms differ in bin count");
    ChiSquare r;
    double na = std::accumulate(a.begin(), a.end(), 0.0);
    double nb = std::accumulate(b.begin(), b.end(), 0.0);
    if (na == 0 || nb == 0) return r;
    std::size_t used = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double col = static_cast<double>(a[i] + b[i]);
        if (col == 0) continue;
        ++used;
        double ea = col * na / (na + nb);
        double eb = col * nb / (na + nb);
        r.statistic += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    if (used < 2) return r;
    r.dof = static_cast<double>(used - 1);
    r.p_value = chi_square_sf(r.statistic, r.dof);
    return r;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t n = std::max(a.size(), b.size());
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = i < a.size() ? a[i] : 0.0;
        double y = i < b.size() ? b[i] : 0.0;
        s += std::fabs(x - y);
    }
    return 0.5 * s;
}

}  // namespace partoram::sim
