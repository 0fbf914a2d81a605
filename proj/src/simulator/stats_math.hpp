// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace partoram::sim {

struct ChiSquare {
    double statistic = 0;
    double dof = 0;
    double p_value = 1;
};

// Goodness of fit against the uniform law over all bins.
ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts);
// Homogeneity of two histograms over the same bins (2 x K contingency table).
ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& a,
                                const std::vector<std::uint64_t>& b);
double chi_square_sf(double statistic, double dof);

// Total variation distance between two laws on the same support.
double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace partoram::sim
