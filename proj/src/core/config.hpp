// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace partoram {

enum class EvictAlgo { Sequential, Random };
enum class PayloadMode { Full, MetadataOnly };
enum class CipherMode { Aead, Test };
enum class CapacityMode { Empirical, Analytic };
enum class PosMapMode { Plain, CounterCompressed };

struct OramConfig {
    std::uint64_t n = 1024;
    std::uint32_t block_size = 64;
    std::uint32_t partitions = 0;  // 0: ceil(sqrt(n))
    double nu = 1.0;
    EvictAlgo evict_algo = EvictAlgo::Sequential;
    bool piggyback = true;
    bool concurrent = false;
    bool delete_on_read = false;
    bool compression = false;
    bool recursive = false;
    std::uint64_t recursion_threshold = 1024;
    std::uint32_t alpha = 0;  // 0: derived from block size
    std::uint64_t seed = 1;
    PayloadMode payload_mode = PayloadMode::Full;
    CipherMode cipher = CipherMode::Aead;
    CapacityMode capacity_mode = CapacityMode::Empirical;
    std::uint32_t capacity = 0;  // 0: derived from capacity_mode
    double bound_k = 1.0;
    double bound_c = 2.0;
    PosMapMode posmap = PosMapMode::Plain;
    double budget_w = 16.0;

    // Sets one field from its textual key/value form. Unknown keys throw ConfigError.
    void set(const std::string& key, const std::string& value);
    // Throws ConfigError on inconsistent settings.
    void validate() const;
    std::map<std::string, std::string> to_map() const;
};

// Parses flat `key = value` text; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_kv_text(const std::string& text);
std::string read_text_file(const std::string& path);

bool parse_bool(const std::string& v);
std::string to_string(EvictAlgo a);
std::string to_string(PayloadMode m);
std::string to_string(CipherMode m);
std::string to_string(CapacityMode m);
std::string to_string(PosMapMode m);

// Derived partition layout.
struct Geometry {
    std::uint64_t n = 0;
    std::uint32_t partitions = 0;
    std::uint32_t levels = 0;    // L
    std::uint32_t capacity = 0;  // S
    std::vector<std::uint32_t> level_sizes;

    std::uint32_t top() const { return levels - 1; }
    std::uint32_t size(std::uint32_t level) const { return level_sizes[level]; }
    std::uint32_t half(std::uint32_t level) const { return level_sizes[level] / 2; }
    // Max real blocks a level may hold.
    std::uint32_t real_cap(std::uint32_t level) const { return level_sizes[level] / 2; }
    // Period of the binary counter formed by the non-top levels.
    std::uint64_t counter_period() const { return std::uint64_t{1} << (levels - 1); }

    static Geometry derive(const OramConfig& cfg);
    static Geometry derive(std::uint64_t n, std::uint32_t partitions, std::uint32_t capacity);
};

std::uint32_t ceil_sqrt(std::uint64_t n);
std::uint32_t ceil_log2(std::uint64_t n);
std::uint32_t empirical_capacity(std::uint64_t n);
std::uint32_t analytic_capacity(std::uint64_t n, double k, double c);

}  // namespace partoram
